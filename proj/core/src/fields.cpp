#include "mirt/fields.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <complex>

#include "mirt/error.hpp"

namespace mirt {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

using Basis4 = Eigen::Matrix<double, 9, 4>;

Basis4 complement_basis(const Vec3& xi) {
  Basis4 b;
  for (int j = 0; j < 3; ++j) b.col(j) = outer_flat(xi, Vec3::Unit(j));
  b.col(3) = identity_flat();
  return b;
}

// Maps a 9-vector to the coefficients of its orthogonal projection onto the complement
// basis: a = (B^T B)^{-1} B^T f.
Eigen::Matrix<double, 4, 9> complement_coefficients(const Basis4& b) {
  const Eigen::Matrix4d gram = b.transpose() * b;
  return gram.ldlt().solve(b.transpose());
}

}  // namespace

Mat9 sol_projector(const Vec3& xi) {
  if (!(xi.norm() > 0.0)) throw ValidationError("sol_projector: xi must be nonzero");
  const Basis4 b = complement_basis(xi);
  Mat9 p = Mat9::Identity() - b * complement_coefficients(b);
  return 0.5 * (p + p.transpose());
}

Mat9 trace_free_projector() {
  const Vec9 id = identity_flat();
  return Mat9::Identity() - id * id.transpose() / 3.0;
}

Tensor2Field sym_derivative(const VectorField& u) {
  const auto uh = forward_fft(u);
  Spectrum<9> out{uh.layout, std::vector<cplx>(uh.layout.size() * 9)};
  for (std::size_t k = 0; k < uh.layout.size(); ++k) {
    const Vec3 xi = uh.layout.derivative_wavevector(k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.at(k, flat_index(i, j)) = 0.5 * kI * (xi[j] * uh.at(k, i) + xi[i] * uh.at(k, j));
  }
  return inverse_fft(out);
}

Tensor2Field dprime(const VectorField& u) {
  const auto uh = forward_fft(u);
  Spectrum<9> out{uh.layout, std::vector<cplx>(uh.layout.size() * 9)};
  for (std::size_t k = 0; k < uh.layout.size(); ++k) {
    const Vec3 xi = uh.layout.derivative_wavevector(k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.at(k, flat_index(i, j)) = kI * xi[i] * uh.at(k, j);
  }
  return inverse_fft(out);
}

Tensor2Field lambda_embed(const ScalarField& w) {
  Tensor2Field out(w.grid());
  for (std::size_t v = 0; v < w.voxel_count(); ++v)
    for (int i = 0; i < 3; ++i) out.at(v, flat_index(i, i)) = w.at(v);
  return out;
}

VectorField delta_prime(const Tensor2Field& f) {
  const auto fh = forward_fft(f);
  Spectrum<3> out{fh.layout, std::vector<cplx>(fh.layout.size() * 3)};
  for (std::size_t k = 0; k < fh.layout.size(); ++k) {
    const Vec3 xi = fh.layout.derivative_wavevector(k);
    for (int j = 0; j < 3; ++j) {
      cplx s = 0.0;
      for (int i = 0; i < 3; ++i) s += xi[i] * fh.at(k, flat_index(i, j));
      out.at(k, j) = kI * s;
    }
  }
  return inverse_fft(out);
}

ScalarField mu_trace(const Tensor2Field& f) {
  ScalarField out(f.grid());
  for (std::size_t v = 0; v < f.voxel_count(); ++v)
    out.at(v) = f.at(v, 0) + f.at(v, 4) + f.at(v, 8);
  return out;
}

template <int C>
void check_support_margin(const Field<C>& f, int margin_voxels, double tolerance) {
  const Grid3& g = f.grid();
  const double peak = f.max_abs();
  if (peak == 0.0) return;
  double shell = 0.0;
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    const auto c = g.coords(v);
    bool in_shell = false;
    for (int d = 0; d < 3; ++d)
      in_shell |= c[d] < margin_voxels || c[d] >= g.counts[d] - margin_voxels;
    if (!in_shell) continue;
    for (int comp = 0; comp < C; ++comp) shell = std::max(shell, std::abs(f.at(v, comp)));
  }
  if (shell > tolerance * peak)
    throw MarginError("field is not supported away from the grid boundary (margin max " +
                      std::to_string(shell / peak) + " of peak)");
}

template void check_support_margin(const Field<1>&, int, double);
template void check_support_margin(const Field<3>&, int, double);
template void check_support_margin(const Field<9>&, int, double);

Decomposition decompose(const Tensor2Field& f, const DecomposeOptions& options) {
  f.validate();
  if (options.check_margin)
    check_support_margin(f, options.margin_voxels, options.margin_tolerance);

  const auto fh = forward_fft(f);
  const auto& layout = fh.layout;
  Spectrum<9> fs{layout, std::vector<cplx>(layout.size() * 9)};
  Spectrum<3> uh{layout, std::vector<cplx>(layout.size() * 3)};
  Spectrum<1> wh{layout, std::vector<cplx>(layout.size())};

  for (std::size_t k = 0; k < layout.size(); ++k) {
    Vec9 re, im;
    for (int c = 0; c < 9; ++c) {
      re[c] = fh.at(k, c).real();
      im[c] = fh.at(k, c).imag();
    }
    const Vec3 xi = layout.derivative_wavevector(k);
    if (xi.norm() == 0.0) {
      // A decaying d'u carries no mean: the trace goes to w and u(0) = 0.
      const cplx tr = (fh.at(k, 0) + fh.at(k, 4) + fh.at(k, 8)) / 3.0;
      for (int c = 0; c < 9; ++c) fs.at(k, c) = fh.at(k, c);
      for (int i = 0; i < 3; ++i) fs.at(k, flat_index(i, i)) -= tr;
      wh.at(k, 0) = tr;
      continue;
    }
    const Basis4 b = complement_basis(xi);
    const Eigen::Matrix<double, 4, 9> p = complement_coefficients(b);
    const Eigen::Vector4d a_re = p * re;
    const Eigen::Vector4d a_im = p * im;
    const Vec9 s_re = re - b * a_re;
    const Vec9 s_im = im - b * a_im;
    for (int c = 0; c < 9; ++c) fs.at(k, c) = {s_re[c], s_im[c]};
    // complement = sum_j a_j (xi (x) e_j) + a_4 Id and (d'u)^ = i xi (x) u^, so u^_j = -i a_j.
    for (int j = 0; j < 3; ++j) uh.at(k, j) = -kI * cplx(a_re[j], a_im[j]);
    wh.at(k, 0) = {a_re[3], a_im[3]};
  }
  return {inverse_fft(fs), inverse_fft(uh), inverse_fft(wh)};
}

Tensor2Field solenoidal_projection(const Tensor2Field& f) {
  auto fh = forward_fft(f);
  const Mat9 dc = trace_free_projector();
  for (std::size_t k = 0; k < fh.layout.size(); ++k) {
    const Vec3 xi = fh.layout.derivative_wavevector(k);
    const Mat9 p = xi.norm() == 0.0 ? dc : sol_projector(xi);
    Vec9 re, im;
    for (int c = 0; c < 9; ++c) {
      re[c] = fh.at(k, c).real();
      im[c] = fh.at(k, c).imag();
    }
    const Vec9 pr = p * re;
    const Vec9 pi = p * im;
    for (int c = 0; c < 9; ++c) fh.at(k, c) = {pr[c], pi[c]};
  }
  return inverse_fft(fh);
}

}  // namespace mirt
