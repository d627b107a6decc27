#include "mirt/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "mirt/error.hpp"

static_assert(std::endian::native == std::endian::little, "file formats assume little-endian");

namespace mirt {
namespace {

template <int C>
constexpr const char* magic_for() {
  if constexpr (C == 1) return "MRS0";
  if constexpr (C == 3) return "MRV0";
  return "MRT1";
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("unexpected end of file");
  return v;
}

void expect_magic(std::istream& is, const char* magic) {
  char buf[4];
  if (!is.read(buf, 4)) throw FormatError("missing file magic");
  if (std::memcmp(buf, magic, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + magic);
}

void check_stream(const std::ostream& os) {
  if (!os) throw FormatError("write failed");
}

}  // namespace

template <int C>
void write_field(std::ostream& os, const Field<C>& f) {
  os.write(magic_for<C>(), 4);
  for (int ax = 0; ax < 3; ++ax) put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().counts[ax]));
  for (int ax = 0; ax < 3; ++ax) put<double>(os, f.grid().origin[ax]);
  for (int ax = 0; ax < 3; ++ax) put<double>(os, f.grid().spacing[ax]);
  os.write(reinterpret_cast<const char*>(f.data().data()),
           static_cast<std::streamsize>(f.data().size() * sizeof(double)));
  check_stream(os);
}

template <int C>
Field<C> read_field(std::istream& is) {
  expect_magic(is, magic_for<C>());
  Grid3 g;
  for (int ax = 0; ax < 3; ++ax) {
    const auto n = get<std::uint32_t>(is);
    if (n == 0 || n > (1u << 12)) throw FormatError("implausible grid size");
    g.counts[ax] = static_cast<int>(n);
  }
  for (int ax = 0; ax < 3; ++ax) g.origin[ax] = get<double>(is);
  for (int ax = 0; ax < 3; ++ax) g.spacing[ax] = get<double>(is);
  std::vector<double> values(g.voxel_count() * C);
  if (!is.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw FormatError("truncated field data");
  return Field<C>(g, std::move(values));
}

template <int C>
void save_field(const std::filesystem::path& path, const Field<C>& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_field(os, f);
}

template <int C>
Field<C> load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  return read_field<C>(is);
}

void write_sinogram(std::ostream& os, const Sinogram& s) {
  s.validate();
  os.write("MSN1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_t));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_alpha));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_beta));
  put<double>(os, s.t0);
  put<double>(os, s.t1);
  put<double>(os, s.alpha_min);
  put<double>(os, s.alpha_max);
  const double dt = (s.t1 - s.t0) / s.n_t;
  const double da = (s.alpha_max - s.alpha_min) / s.n_alpha;
  const double db = 2.0 * std::numbers::pi / s.n_beta;
  std::size_t i = 0;
  for (int n = 0; n < s.n_beta; ++n)
    for (int m = 0; m < s.n_alpha; ++m)
      for (int k = 0; k < s.n_t; ++k, ++i) {
        put<double>(os, s.t0 + (k + 0.5) * dt);
        put<double>(os, s.alpha_min + (m + 0.5) * da);
        put<double>(os, n * db);
        put<double>(os, s.chan_a[i]);
        put<double>(os, s.chan_b[i]);
      }
  check_stream(os);
}

Sinogram read_sinogram(std::istream& is) {
  expect_magic(is, "MSN1");
  Sinogram s;
  s.n_t = static_cast<int>(get<std::uint32_t>(is));
  s.n_alpha = static_cast<int>(get<std::uint32_t>(is));
  s.n_beta = static_cast<int>(get<std::uint32_t>(is));
  if (s.n_t < 1 || s.n_alpha < 1 || s.n_beta < 1 || s.n_t > (1 << 16) || s.n_alpha > (1 << 16) ||
      s.n_beta > (1 << 16))
    throw FormatError("implausible sinogram dimensions");
  s.t0 = get<double>(is);
  s.t1 = get<double>(is);
  s.alpha_min = get<double>(is);
  s.alpha_max = get<double>(is);
  const std::size_t n = static_cast<std::size_t>(s.n_t) * s.n_alpha * s.n_beta;
  s.chan_a.resize(n);
  s.chan_b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    get<double>(is);  // t
    get<double>(is);  // alpha
    get<double>(is);  // beta
    s.chan_a[i] = get<double>(is);
    s.chan_b[i] = get<double>(is);
  }
  return s;
}

void save_sinogram(const std::filesystem::path& path, const Sinogram& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_sinogram(os, s);
}

Sinogram load_sinogram(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  return read_sinogram(is);
}

#define MIRT_IO_INSTANTIATE(C)                                              \
  template void write_field<C>(std::ostream&, const Field<C>&);             \
  template Field<C> read_field<C>(std::istream&);                           \
  template void save_field<C>(const std::filesystem::path&, const Field<C>&); \
  template Field<C> load_field<C>(const std::filesystem::path&);

MIRT_IO_INSTANTIATE(1)
MIRT_IO_INSTANTIATE(3)
MIRT_IO_INSTANTIATE(9)

}  // namespace mirt
