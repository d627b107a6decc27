#include "mirt/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mirt/error.hpp"
#include "mirt/fields.hpp"

namespace mirt {
namespace {

using cplx = std::complex<double>;

/// chi and pinv(A_0(x, xi0)) at one point, or chi = 0.
struct LocalSymbol {
  double chi = 0.0;
  Mat9 pinv;
};

LocalSymbol local_symbol(const Curve& curve, const CutoffSpec& spec, const IntersectionSet& set,
                         const Vec3& x, const Vec3& xi0) {
  LocalSymbol ls;
  double chi = cutoff_from_set(curve, spec, set);
  if (chi == 0.0) return ls;
  const auto sym = assemble_symbol(x, xi0, set.points);
  Eigen::SelfAdjointEigenSolver<Mat9> es(sym.a0);
  const auto& lam = es.eigenvalues();  // ascending
  const double lmax = lam[8];
  if (!(lmax > 0.0)) return ls;
  int rank = 0;
  for (int i = 0; i < 9; ++i) rank += std::abs(lam[i]) > spec.tau_rank * lmax;
  if (rank != 5) return ls;
  chi *= smoothstep((lam[4] / lmax - spec.min_condition) / spec.min_condition);
  if (chi == 0.0) return ls;
  ls.chi = chi;
  ls.pinv.setZero();
  for (int i = 4; i < 9; ++i) {
    const Vec9 v = es.eigenvectors().col(i);
    ls.pinv += (v * v.transpose()) / lam[i];
  }
  return ls;
}

LocalSymbol local_symbol(const Curve& curve, const CutoffSpec& spec, const PlaneSweep& sweep,
                         const Vec3& x) {
  return local_symbol(curve, spec, sweep.intersect(x), x, sweep.normal());
}

Vec9 real_part(const Spectrum<9>& s, std::size_t k) {
  Vec9 v;
  for (int c = 0; c < 9; ++c) v[c] = s.at(k, c).real();
  return v;
}

Vec9 imag_part(const Spectrum<9>& s, std::size_t k) {
  Vec9 v;
  for (int c = 0; c < 9; ++c) v[c] = s.at(k, c).imag();
  return v;
}

}  // namespace

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

double cutoff_from_set(const Curve& curve, const CutoffSpec& spec, const IntersectionSet& set) {
  if (set.degenerate) return 0.0;
  if (classify(set, spec.geometry) != CovectorClass::kXiPrime) return 0.0;
  if (static_cast<int>(set.points.size()) < spec.min_intersections) return 0.0;
  const double end_width = 2.0 * std::numbers::pi * spec.taper;
  double chi = 1.0;
  for (const auto& p : set.points) {
    chi *= smoothstep((std::abs(p.s1) - spec.tau_sigma) / spec.tau_sigma);
    const double polar = std::acos(std::min(1.0, std::abs(p.omega.z())));
    chi *= smoothstep((polar - spec.pole_band) / spec.taper);
    for (const auto& piece : curve.pieces()) {
      if (piece.closed || p.t < piece.t0 || p.t > piece.t1) continue;
      chi *= smoothstep(std::min(p.t - piece.t0, piece.t1 - p.t) / end_width);
    }
    if (chi == 0.0) return 0.0;
  }
  return chi;
}

double cutoff_chi(const Curve& curve, const CutoffSpec& spec, const Vec3& x, const Vec3& xi) {
  const double len = xi.norm();
  if (!(len > 0.0)) throw ValidationError("cutoff: xi must be nonzero");
  const PlaneSweep sweep(curve, xi / len, spec.geometry);
  return local_symbol(curve, spec, sweep, x).chi;
}

Tensor2Field apply_parametrix(const Tensor2Field& nf, const Curve& curve, const CutoffSpec& spec,
                              const ParametrixOptions& options) {
  return apply_parametrix_spectrum(forward_fft(nf), curve, spec, options);
}

Tensor2Field apply_parametrix_spectrum(const SpectralTensorField& nf_hat, const Curve& curve,
                                       const CutoffSpec& spec, const ParametrixOptions& options) {
  const auto& layout = nf_hat.layout;
  const Grid3& grid = layout.grid();
  const double inv_n = 1.0 / static_cast<double>(grid.voxel_count());
  Tensor2Field out(grid);
  double* ov = out.data().data();
  const long n_vox = static_cast<long>(grid.voxel_count());

  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout.has_nyquist(k)) continue;
    const Vec3 xi = layout.wavevector(k);
    const double len = xi.norm();
    if (len == 0.0) continue;
    const Vec3 xi0 = xi / len;
    const Vec9 fr = real_part(nf_hat, k), fi = imag_part(nf_hat, k);
    if (fr.isZero(0.0) && fi.isZero(0.0)) continue;
    const Mat9 proj = sol_projector(xi0);
    const double coef = layout.conjugate_multiplicity(k) * len * inv_n;
    const PlaneSweep sweep(curve, xi0, spec.geometry);

    std::optional<LocalSymbol> frozen;
    if (options.frozen_point) {
      frozen = local_symbol(curve, spec, sweep, *options.frozen_point);
      if (frozen->chi == 0.0) continue;
    }

#pragma omp parallel for schedule(dynamic, 64)
    for (long v = 0; v < n_vox; ++v) {
      const Vec3 x = grid.position(static_cast<std::size_t>(v));
      const LocalSymbol ls = frozen ? *frozen : local_symbol(curve, spec, sweep, x);
      if (ls.chi == 0.0) continue;
      const double phase = xi.dot(x - grid.origin);
      const Vec9 yr = proj * (ls.pinv * fr);
      const Vec9 yi = proj * (ls.pinv * fi);
      const Vec9 val = (coef * ls.chi) * (std::cos(phase) * yr - std::sin(phase) * yi);
      double* o = ov + v * 9;
      for (int c = 0; c < 9; ++c) o[c] += val[c];
    }
  }
  return out;
}

VoxelEvaluation evaluate_parametrix_voxel(const SpectralTensorField& nf_hat, const Curve& curve,
                                          const CutoffSpec& spec, std::size_t voxel) {
  const auto& layout = nf_hat.layout;
  const Grid3& grid = layout.grid();
  const auto& n = grid.counts;
  const Vec3 x = grid.position(voxel);
  const double inv_n = 1.0 / static_cast<double>(grid.voxel_count());
  Eigen::Matrix<cplx, 9, 1> acc = Eigen::Matrix<cplx, 9, 1>::Zero();

  for (int kz = 0; kz < n[2]; ++kz)
    for (int ky = 0; ky < n[1]; ++ky)
      for (int kx = 0; kx < n[0]; ++kx) {
        if (layout.is_nyquist(0, kx) || layout.is_nyquist(1, ky) || layout.is_nyquist(2, kz))
          continue;
        if (kx == 0 && ky == 0 && kz == 0) continue;
        const bool stored = kx < layout.half_x();
        const std::size_t k = stored ? layout.index(kx, ky, kz)
                                     : layout.index((n[0] - kx) % n[0], (n[1] - ky) % n[1],
                                                    (n[2] - kz) % n[2]);
        Eigen::Matrix<cplx, 9, 1> f;
        for (int c = 0; c < 9; ++c) f[c] = stored ? nf_hat.at(k, c) : std::conj(nf_hat.at(k, c));
        const Vec3 xi = stored ? layout.wavevector(k) : Vec3(-layout.wavevector(k));
        const double len = xi.norm();
        const Vec3 xi0 = xi / len;
        const LocalSymbol ls = local_symbol(curve, spec, PlaneSweep(curve, xi0, spec.geometry), x);
        if (ls.chi == 0.0) continue;
        const Mat9 b = sol_projector(xi0) * ls.pinv;
        const cplx e = std::polar(1.0, xi.dot(x - grid.origin));
        acc += (e * ls.chi * len * inv_n) * (b.cast<cplx>() * f);
      }
  VoxelEvaluation ev;
  ev.real_part = acc.real();
  ev.imag_part = acc.imag();
  return ev;
}

Mask default_mask(const Tensor2Field& f_ref, double fraction) {
  const std::size_t nv = f_ref.voxel_count();
  std::vector<double> energy(nv);
  double emax = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    double e = 0.0;
    for (double x : f_ref.voxel(v)) e += x * x;
    energy[v] = e;
    emax = std::max(emax, e);
  }
  Mask m(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) m[v] = emax > 0.0 && energy[v] > fraction * emax;
  return m;
}

double calibrate(const Tensor2Field& f_rec, const Tensor2Field& f_ref, const Mask& mask) {
  if (!(f_rec.grid() == f_ref.grid()) || mask.size() != f_ref.voxel_count())
    throw ValidationError("calibrate: grid or mask mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (!mask[v]) continue;
    for (int c = 0; c < 9; ++c) {
      num += f_rec.at(v, c) * f_ref.at(v, c);
      den += f_rec.at(v, c) * f_rec.at(v, c);
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

ReconReport error_report(const Tensor2Field& f_rec, const Tensor2Field& f_ref, const Mask& mask) {
  ReconReport rep;
  rep.calibration = calibrate(f_rec, f_ref, mask);
  const double c = rep.calibration;
  double ref2 = 0.0, err2 = 0.0;
  std::array<double, 9> comp{};
  double sr = 0.0, sf = 0.0, srr = 0.0, sff = 0.0, srf = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (!mask[v]) continue;
    ++rep.mask_voxels;
    for (int k = 0; k < 9; ++k) {
      const double r = f_rec.at(v, k), f = f_ref.at(v, k);
      const double d = c * r - f;
      err2 += d * d;
      comp[k] += d * d;
      ref2 += f * f;
      sr += r;
      sf += f;
      srr += r * r;
      sff += f * f;
      srf += r * f;
      ++count;
    }
  }
  if (rep.mask_voxels == 0) throw ValidationError("error report: mask is empty");
  if (!(ref2 > 0.0)) throw ValidationError("error report: reference vanishes on the mask");
  rep.relative_l2 = std::sqrt(err2 / ref2);
  for (int k = 0; k < 9; ++k) rep.component_errors[k] = std::sqrt(comp[k] / ref2);
  const double nn = static_cast<double>(count);
  const double cov = srf - sr * sf / nn;
  const double var_r = srr - sr * sr / nn, var_f = sff - sf * sf / nn;
  rep.correlation = var_r > 0.0 && var_f > 0.0 ? cov / std::sqrt(var_r * var_f) : 0.0;
  return rep;
}

std::string format_recon_report(const ReconReport& r, bool include_runtime) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "relative_l2 = " << r.relative_l2 << "\n";
  os << "correlation = " << r.correlation << "\n";
  os << "calibration = " << r.calibration << "\n";
  os << "mask_voxels = " << r.mask_voxels << "\n";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      os << "component_error_" << i + 1 << j + 1 << " = " << r.component_errors[flat_index(i, j)]
         << "\n";
  if (include_runtime) os << "runtime_seconds = " << r.seconds << "\n";
  return os.str();
}

ReconstructionResult reconstruct(const Tensor2Field& f, const LineSet& lines,
                                 const CutoffSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  ReconstructionResult res;
  res.nf = normal_op(f, lines);
  res.f_rec = apply_parametrix(res.nf, lines.curve(), spec);
  res.f_solenoidal = solenoidal_projection(f);
  res.report = error_report(res.f_rec, res.f_solenoidal, default_mask(res.f_solenoidal));
  res.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace mirt
