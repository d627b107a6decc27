#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "mirt/grid.hpp"

namespace mirt {

/// Half-spectrum index space of a real-to-complex DFT over a Grid3 (periodic extension of
/// the grid box). The x axis is halved, ky and kz run over the full range.
///
/// Forward transform is unnormalized, inverse divides by the voxel count.
class SpectralLayout {
 public:
  SpectralLayout() = default;
  explicit SpectralLayout(const Grid3& grid);

  const Grid3& grid() const { return grid_; }
  int half_x() const { return grid_.counts[0] / 2 + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(half_x()) * grid_.counts[1] * grid_.counts[2];
  }
  std::size_t index(int kx, int ky, int kz) const {
    return static_cast<std::size_t>(kx) +
           static_cast<std::size_t>(half_x()) *
               (static_cast<std::size_t>(ky) + static_cast<std::size_t>(grid_.counts[1]) * kz);
  }
  std::array<int, 3> coords(std::size_t index) const;

  /// Signed integer frequency in [-n/2, n/2) for storage index k on the given axis.
  int signed_frequency(int axis, int k) const {
    const int n = grid_.counts[axis];
    return k < (n + 1) / 2 ? k : k - n;
  }
  /// True when the storage index is the unpaired Nyquist frequency of an even axis.
  bool is_nyquist(int axis, int k) const {
    const int n = grid_.counts[axis];
    return n % 2 == 0 && k == n / 2;
  }
  bool has_nyquist(std::size_t index) const;

  /// Physical angular wavevector 2 pi m / (n h) in rad per length unit.
  Vec3 wavevector(std::size_t index) const;
  /// Wavevector used for differentiation: Nyquist components set to zero so that odd
  /// multipliers keep real fields real.
  Vec3 derivative_wavevector(std::size_t index) const;
  /// 2 when the conjugate partner -k is not stored in the half spectrum, 1 otherwise.
  int conjugate_multiplicity(std::size_t index) const;

 private:
  Grid3 grid_;
};

/// Half-spectrum of a C-component real field, components innermost.
template <int C>
struct Spectrum {
  SpectralLayout layout;
  std::vector<std::complex<double>> values;

  std::complex<double>& at(std::size_t k, int c) { return values[k * C + c]; }
  const std::complex<double>& at(std::size_t k, int c) const { return values[k * C + c]; }
};

using SpectralTensorField = Spectrum<9>;

template <int C>
Spectrum<C> forward_fft(const Field<C>& field);

template <int C>
Field<C> inverse_fft(const Spectrum<C>& spectrum);

}  // namespace mirt
