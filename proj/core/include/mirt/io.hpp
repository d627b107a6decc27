#pragma once

#include <filesystem>
#include <iosfwd>

#include "mirt/grid.hpp"
#include "mirt/transform.hpp"

namespace mirt {

// Binary little-endian volume files: 4-byte magic ("MRS0" scalar, "MRV0" vector, "MRT1"
// tensor), u32 nx ny nz, f64 origin[3], f64 spacing[3], then f64 values with components
// innermost and x fastest.
//
// Sinogram files: "MSN1", u32 n_t n_alpha n_beta, f64 t0 t1 alpha_min alpha_max, then
// records (t, alpha, beta, chanA, chanB) as f64 with t fastest.

template <int C>
void write_field(std::ostream& os, const Field<C>& f);
template <int C>
Field<C> read_field(std::istream& is);

template <int C>
void save_field(const std::filesystem::path& path, const Field<C>& f);
template <int C>
Field<C> load_field(const std::filesystem::path& path);

void write_sinogram(std::ostream& os, const Sinogram& s);
Sinogram read_sinogram(std::istream& is);
void save_sinogram(const std::filesystem::path& path, const Sinogram& s);
Sinogram load_sinogram(const std::filesystem::path& path);

}  // namespace mirt
