#include "mirt/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>

#include "mirt/error.hpp"

namespace mirt {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralLayout::SpectralLayout(const Grid3& grid) : grid_(grid) {}

std::array<int, 3> SpectralLayout::coords(std::size_t index) const {
  const auto hx = static_cast<std::size_t>(half_x());
  const auto ny = static_cast<std::size_t>(grid_.counts[1]);
  return {static_cast<int>(index % hx), static_cast<int>((index / hx) % ny),
          static_cast<int>(index / (hx * ny))};
}

bool SpectralLayout::has_nyquist(std::size_t index) const {
  const auto k = coords(index);
  return is_nyquist(0, k[0]) || is_nyquist(1, k[1]) || is_nyquist(2, k[2]);
}

Vec3 SpectralLayout::wavevector(std::size_t index) const {
  const auto k = coords(index);
  Vec3 xi;
  for (int d = 0; d < 3; ++d) {
    const double period = grid_.counts[d] * grid_.spacing[d];
    xi[d] = 2.0 * std::numbers::pi * signed_frequency(d, k[d]) / period;
  }
  return xi;
}

Vec3 SpectralLayout::derivative_wavevector(std::size_t index) const {
  const auto k = coords(index);
  Vec3 xi = wavevector(index);
  for (int d = 0; d < 3; ++d)
    if (is_nyquist(d, k[d])) xi[d] = 0.0;
  return xi;
}

int SpectralLayout::conjugate_multiplicity(std::size_t index) const {
  const int kx = coords(index)[0];
  if (kx == 0 || is_nyquist(0, kx)) return 1;
  return 2;
}

template <int C>
Spectrum<C> forward_fft(const Field<C>& field) {
  const Grid3& g = field.grid();
  Spectrum<C> out{SpectralLayout(g), {}};
  out.values.assign(out.layout.size() * C, {0.0, 0.0});
  std::vector<double> in(field.values().begin(), field.values().end());
  const int dims[3] = {g.counts[2], g.counts[1], g.counts[0]};
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_many_dft_r2c(3, dims, C, in.data(), nullptr, C, 1,
                                  reinterpret_cast<fftw_complex*>(out.values.data()), nullptr, C,
                                  1, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw: failed to create r2c plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

template <int C>
Field<C> inverse_fft(const Spectrum<C>& spectrum) {
  const Grid3& g = spectrum.layout.grid();
  Field<C> out(g);
  // c2r destroys its input.
  std::vector<std::complex<double>> in = spectrum.values;
  const int dims[3] = {g.counts[2], g.counts[1], g.counts[0]};
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_many_dft_c2r(3, dims, C, reinterpret_cast<fftw_complex*>(in.data()), nullptr,
                                  C, 1, out.data().data(), nullptr, C, 1, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw: failed to create c2r plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  out *= 1.0 / static_cast<double>(g.voxel_count());
  return out;
}

template Spectrum<1> forward_fft(const Field<1>&);
template Spectrum<3> forward_fft(const Field<3>&);
template Spectrum<9> forward_fft(const Field<9>&);
template Field<1> inverse_fft(const Spectrum<1>&);
template Field<3> inverse_fft(const Spectrum<3>&);
template Field<9> inverse_fft(const Spectrum<9>&);

}  // namespace mirt
