#include "mirt/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mirt/error.hpp"
#include "mirt/fields.hpp"
#include "mirt/rng.hpp"

namespace mirt {

SymbolMatrix assemble_symbol(const Vec3& x, const Vec3& xi,
                             const std::vector<Intersection>& points) {
  const double len = xi.norm();
  if (!(len > 0.0)) throw ValidationError("symbol: xi must be nonzero");
  const Vec3 xi0 = xi / len;
  SymbolMatrix s;
  s.x = x;
  s.xi = xi;
  for (const auto& p : points) {
    if (!p.transversal || !(p.r > 0.0)) continue;
    SymbolRecord rec;
    rec.t = p.t;
    rec.s1 = p.s1;
    rec.r = p.r;
    // Remove the root-finding residual so omega lies exactly in the plane.
    rec.omega = (p.omega - p.omega.dot(xi0) * xi0).normalized();
    rec.omega_beta = xi0;
    rec.omega_alpha = xi0.cross(rec.omega);
    rec.weight = 2.0 * std::numbers::pi / (len * std::abs(p.s1) * p.r);
    rec.va = outer_flat(rec.omega, rec.omega_alpha);
    rec.vb = outer_flat(rec.omega, rec.omega_beta);
    s.a0 += rec.weight * (rec.va * rec.va.transpose() + rec.vb * rec.vb.transpose());
    s.records.push_back(rec);
  }
  std::sort(s.records.begin(), s.records.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });
  return s;
}

SymbolMatrix principal_symbol(const Curve& curve, const Vec3& x, const Vec3& xi,
                              const SymbolTolerances& tol) {
  const auto set = PlaneSweep(curve, xi, tol.geometry).intersect(x);
  if (set.degenerate) throw DegeneratePlane("symbol: plane contains an arc of the curve");
  for (const auto& p : set.points)
    if (std::abs(p.s1) <= tol.tau_sigma)
      throw SigmaProximity("symbol: intersection within tau_sigma of Sigma");
  if (classify(set, tol.geometry) != CovectorClass::kXiPrime)
    throw NotElliptic("symbol: covector is not in Xi'");
  return assemble_symbol(x, xi, set.points);
}

Mat9 kronecker_symbol(const SymbolMatrix& symbol) {
  Mat9 k = Mat9::Zero();
  for (const auto& rec : symbol.records) {
    const Mat3 oo = rec.omega * rec.omega.transpose();
    const Mat3 perp = Mat3::Identity() - oo;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            k(flat_index(i, j), flat_index(a, b)) += rec.weight * oo(i, a) * perp(j, b);
  }
  return k;
}

Vec9 symmetric_singular_values(const Mat9& m) {
  Eigen::SelfAdjointEigenSolver<Mat9> es(m, Eigen::EigenvaluesOnly);
  Vec9 s = es.eigenvalues().cwiseAbs();
  std::sort(s.data(), s.data() + 9, std::greater<>());
  return s;
}

int numerical_rank(const Mat9& m, double tau_rank) {
  const Vec9 s = symmetric_singular_values(m);
  if (s[0] == 0.0) return 0;
  return static_cast<int>((s.array() > tau_rank * s[0]).count());
}

Basis5 basis5(const SymbolMatrix& symbol, double tau_rank) {
  if (symbol.records.size() < 3) throw RankDeficient("basis5: fewer than three intersections");
  Basis5 b;
  for (int q = 0; q < 3; ++q) b.columns.col(q) = symbol.records[q].va;
  for (int q = 0; q < 2; ++q) b.columns.col(3 + q) = symbol.records[q].vb;
  Eigen::JacobiSVD<Eigen::Matrix<double, 9, 5>> svd(b.columns);
  b.certificate = svd.singularValues().minCoeff();
  if (!(b.certificate > tau_rank))
    throw RankDeficient("basis5: tensors are linearly dependent (certificate " +
                        std::to_string(b.certificate) + ")");
  return b;
}

Mat9 symmetric_pinv(const Mat9& m, double tau_rank) {
  Eigen::SelfAdjointEigenSolver<Mat9> es(m);
  const auto& lam = es.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  Mat9 p = Mat9::Zero();
  for (int i = 0; i < 9; ++i) {
    if (lmax > 0.0 && std::abs(lam[i]) > tau_rank * lmax) {
      const Vec9 v = es.eigenvectors().col(i);
      p += (v * v.transpose()) / lam[i];
    }
  }
  return p;
}

Mat9 parametrix_symbol(const SymbolMatrix& symbol, double tau_rank) {
  const int rank = numerical_rank(symbol.a0, tau_rank);
  if (rank != 5)
    throw RankDeficient("parametrix: rank(A_0) = " + std::to_string(rank) + ", expected 5");
  return sol_projector(symbol.xi) * symmetric_pinv(symbol.a0, tau_rank);
}

SymbolSampling sample_symbols(const Curve& curve, const SymbolSamplingOptions& opt) {
  if (opt.points < 1 || opt.max_draws < 1)
    throw ValidationError("symbol sampling: counts must be positive");
  SymbolSampling out;
  while (static_cast<int>(out.samples.size()) < opt.points && out.draws < opt.max_draws) {
    CounterRng rng(opt.seed,
                   stream_id(Stream::kSymbolSample, static_cast<std::uint64_t>(out.draws++)));
    const Vec3 x = rng.in_ball(opt.ball_center, opt.ball_radius);
    const Vec3 xi = rng.uniform(0.5, 2.0) * rng.unit_vector();
    SymbolMatrix sym;
    try {
      sym = principal_symbol(curve, x, xi, opt.tolerances);
    } catch (const SigmaProximity&) {
      ++out.skipped;
      continue;
    } catch (const NotElliptic&) {
      ++out.skipped;
      continue;
    } catch (const DegeneratePlane&) {
      ++out.skipped;
      continue;
    }
    SymbolSample smp;
    smp.x = x;
    smp.xi = xi;
    smp.intersections = static_cast<int>(sym.records.size());
    smp.singular_values = symmetric_singular_values(sym.a0);
    smp.rank = numerical_rank(sym.a0, opt.tolerances.tau_rank);
    const double norm = sym.a0.norm();
    const Mat9 proj = sol_projector(xi);
    smp.kronecker_defect = (sym.a0 - kronecker_symbol(sym)).norm() / norm;
    smp.range_defect = ((Mat9::Identity() - proj) * sym.a0).norm() / norm;
    try {
      smp.certificate = basis5(sym, opt.tolerances.tau_rank).certificate;
    } catch (const RankDeficient&) {
      smp.certificate = 0.0;
    }
    try {
      smp.parametrix_defect = (parametrix_symbol(sym, opt.tolerances.tau_rank) * sym.a0 - proj).norm();
    } catch (const RankDeficient&) {
      smp.parametrix_defect = std::numeric_limits<double>::infinity();
    }
    out.samples.push_back(smp);
  }
  return out;
}

EllipticityReport ellipticity_check(double alpha1, double alpha2, double alpha3, double beta1,
                                    double min_separation, double singular_threshold) {
  const double al[3] = {alpha1, alpha2, alpha3};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(std::sin(al[i] - al[j])) <= min_separation)
        throw AdmissibilityError("ellipticity: alpha_" + std::to_string(i + 1) + " and alpha_" +
                                 std::to_string(j + 1) + " differ by a multiple of pi");

  EllipticityReport rep;
  std::copy(al, al + 3, rep.alpha);
  rep.beta1 = beta1;
  const double sb = std::sin(beta1), cb = std::cos(beta1);
  const Vec3 xi(-sb, cb, 0.0);

  // Row for sum_ij a_i b_j f_ij, i.e. the flattened a (x) b.
  auto row = [](const Vec3& a, const Vec3& b) -> Eigen::Matrix<double, 1, 9> {
    return outer_flat(a, b).transpose();
  };
  auto omega = [&](double a) {
    return Vec3(std::sin(a) * cb, std::sin(a) * sb, std::cos(a));
  };
  auto omega_alpha = [&](double a) {
    return Vec3(std::cos(a) * cb, std::cos(a) * sb, -std::sin(a));
  };

  int r = 0;
  for (int q = 0; q < 3; ++q) rep.system.row(r++) = row(omega(al[q]), omega_alpha(al[q]));
  for (int q = 0; q < 2; ++q) rep.system.row(r++) = row(omega(al[q]), xi);
  for (int q = 0; q < 2; ++q) rep.system.row(r++) = row(xi, omega_alpha(al[q]));
  rep.system.row(r++) = row(xi, xi);
  rep.system.row(r++) = identity_flat().transpose();
  for (int j = 0; j < 3; ++j) rep.system.row(r++) = row(xi, Vec3::Unit(j));

  Eigen::Matrix<double, 12, 9> scaled = rep.system;
  for (int i = 0; i < 12; ++i) scaled.row(i).normalize();
  Eigen::JacobiSVD<Eigen::Matrix<double, 12, 9>> svd(scaled);
  rep.min_singular = svd.singularValues().minCoeff();
  rep.trivial_nullspace = rep.min_singular > singular_threshold;

  Eigen::Matrix2d a;
  a << -std::cos(alpha1), std::sin(alpha1), -std::cos(alpha2), std::sin(alpha2);
  Eigen::Matrix2d b;
  b << sb, -cb, cb, sb;
  rep.det_a = a.determinant();
  rep.det_a_expected = std::sin(alpha1 - alpha2);
  rep.det_b = b.determinant();
  return rep;
}

EllipticitySweep ellipticity_sweep(int tuples, std::uint64_t seed, double draw_separation) {
  if (tuples < 1) throw ValidationError("ellipticity sweep: tuple count must be positive");
  EllipticitySweep sw;
  sw.tuples = tuples;
  sw.worst_min_singular = std::numeric_limits<double>::infinity();
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < tuples; ++i) {
    CounterRng rng(seed, stream_id(Stream::kEllipticity, static_cast<std::uint64_t>(i)));
    double al[3];
    for (;;) {
      for (double& a : al) a = rng.uniform(0.0, two_pi);
      if (std::abs(std::sin(al[0] - al[1])) > draw_separation &&
          std::abs(std::sin(al[0] - al[2])) > draw_separation &&
          std::abs(std::sin(al[1] - al[2])) > draw_separation)
        break;
    }
    const double beta1 = rng.uniform(0.0, two_pi);
    const auto rep = ellipticity_check(al[0], al[1], al[2], beta1);
    sw.trivial += rep.trivial_nullspace;
    sw.worst_min_singular = std::min(sw.worst_min_singular, rep.min_singular);
    sw.max_det_a_error = std::max(sw.max_det_a_error, std::abs(rep.det_a - rep.det_a_expected));
    sw.max_det_b_error = std::max(sw.max_det_b_error, std::abs(rep.det_b - 1.0));
  }
  return sw;
}

}  // namespace mirt
