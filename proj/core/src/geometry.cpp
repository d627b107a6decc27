#include "mirt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "mirt/error.hpp"
#include "mirt/rng.hpp"

namespace mirt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Safeguarded Newton iteration for a root of f on [lo, hi], f(lo) and f(hi) of opposite sign.
template <typename F>
double bracketed_newton(F&& f_and_df, double lo, double hi) {
  auto [f_lo, d_lo] = f_and_df(lo);
  if (f_lo == 0.0) return lo;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [f, df] = f_and_df(t);
    if (f == 0.0) return t;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = t;
      f_lo = f;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      break;
    double next = df != 0.0 ? t - f / df : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

Vec3 random_band_direction(CounterRng& rng, double pole_band) {
  const double zmax = std::cos(pole_band);
  const double z = rng.uniform(-zmax, zmax);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double rho = std::sqrt(1.0 - z * z);
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace

SphericalFrame frame_at(double alpha, double beta) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sb = std::sin(beta), cb = std::cos(beta);
  SphericalFrame f;
  f.alpha = alpha;
  f.beta = beta;
  f.xi = {sa * cb, sa * sb, ca};
  f.xi_alpha = {ca * cb, ca * sb, -sa};
  f.xi_beta = {-sb, cb, 0.0};
  return f;
}

SphericalFrame frame_of(const Vec3& xi, double pole_band) {
  if (std::abs(xi.norm() - 1.0) > 1e-12) throw ValidationError("frame_of: xi must be a unit vector");
  const double alpha = std::acos(std::clamp(xi.z(), -1.0, 1.0));
  if (alpha < pole_band || alpha > std::numbers::pi - pole_band)
    throw PoleError("frame_of: polar angle " + std::to_string(alpha) + " outside the pole band");
  double beta = std::atan2(xi.y(), xi.x());
  if (beta < 0.0) beta += kTwoPi;
  return frame_at(alpha, beta);
}

PlaneSweep::PlaneSweep(const Curve& curve, const Vec3& xi, const GeometryTolerances& tol)
    : curve_(&curve), tol_(tol) {
  const double len = xi.norm();
  if (!(len > 0.0)) throw ValidationError("plane sweep: xi must be nonzero");
  normal_ = xi / len;

  for (const auto& piece : curve.pieces()) {
    PieceSweep ps;
    ps.t0 = piece.t0;
    ps.t1 = piece.t1;
    ps.closed = piece.closed;
    const int n = std::max(
        16, static_cast<int>(std::ceil(tol_.samples_per_period * piece.length() / kTwoPi)));
    const double dt = piece.length() / n;
    std::vector<double> d(n + 1);
    ps.t.resize(n + 1);
    ps.g.resize(n + 1);
    double max_d = 0.0, max_speed = 0.0;
    for (int i = 0; i <= n; ++i) {
      ps.t[i] = piece.t0 + i * dt;
      const auto e = curve.eval(ps.t[i]);
      ps.g[i] = e.position.dot(normal_);
      d[i] = e.d1.dot(normal_);
      max_d = std::max(max_d, std::abs(d[i]));
      max_speed = std::max(max_speed, e.d1.norm());
    }

    std::vector<Breakpoint> extrema;
    if (max_d > 1e-12 * max_speed) {
      auto deriv = [&](double t) {
        const auto e = curve.eval(t);
        return std::pair{e.d1.dot(normal_), e.d2.dot(normal_)};
      };
      for (int i = 0; i < n; ++i) {
        const bool neg_a = d[i] < 0.0, neg_b = d[i + 1] < 0.0;
        if (neg_a == neg_b) continue;
        const double te = bracketed_newton(deriv, ps.t[i], ps.t[i + 1]);
        extrema.push_back({te, curve.position(te).dot(normal_)});
      }
    }
    if (extrema.empty() && piece.closed) ps.flat = true;
    if (max_d <= 1e-12 * max_speed) ps.flat = true;
    if (ps.flat) {
      ps.flat_value = ps.g[0];
      pieces_.push_back(std::move(ps));
      continue;
    }

    // Monotone runs between consecutive breakpoints; interior samples give the bracket.
    std::vector<Breakpoint> bps;
    if (!piece.closed) bps.push_back({piece.t0, ps.g.front()});
    bps.insert(bps.end(), extrema.begin(), extrema.end());
    if (!piece.closed) bps.push_back({piece.t1, ps.g.back()});
    ps.breakpoints = bps;
    if (piece.closed) bps.push_back({extrema.front().t + piece.length(), extrema.front().g});

    for (std::size_t b = 0; b + 1 < bps.size(); ++b) {
      Run run{bps[b].t, bps[b + 1].t, bps[b].g, bps[b + 1].g, 0, 0};
      run.sample_begin = ps.t.size();
      // Interior samples, copied into the tail of the sample arrays so that runs which
      // wrap around a closed piece are contiguous too.
      std::vector<double> ts, gs;
      ts.push_back(run.t_lo);
      gs.push_back(run.g_lo);
      for (int i = 0; i < n; ++i) {
        for (int wrap = 0; wrap < (piece.closed ? 2 : 1); ++wrap) {
          const double t = ps.t[i] + wrap * piece.length();
          if (t > run.t_lo && t < run.t_hi) {
            ts.push_back(t);
            gs.push_back(ps.g[i]);
          }
        }
      }
      if (!piece.closed && ps.t[n] > run.t_lo && ps.t[n] < run.t_hi) {
        ts.push_back(ps.t[n]);
        gs.push_back(ps.g[n]);
      }
      ts.push_back(run.t_hi);
      gs.push_back(run.g_hi);
      std::vector<std::size_t> order(ts.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto a, auto b2) { return ts[a] < ts[b2]; });
      run.sample_begin = ps.t.size();
      for (auto i : order) {
        ps.t.push_back(ts[i]);
        ps.g.push_back(gs[i]);
      }
      run.sample_end = ps.t.size();
      ps.runs.push_back(run);
    }
    pieces_.push_back(std::move(ps));
  }
}

double PlaneSweep::refine(const PieceSweep& ps, double lo, double hi, double c) const {
  const double period = ps.t1 - ps.t0;
  auto fn = [&](double t) {
    const auto e = curve_->eval(ps.closed && t >= ps.t1 ? t - period : t);
    return std::pair{e.position.dot(normal_) - c, e.d1.dot(normal_)};
  };
  return bracketed_newton(fn, lo, hi);
}

Intersection PlaneSweep::make_point(double t, const Vec3& x) const {
  const auto e = curve_->eval(t);
  Intersection q;
  q.t = t;
  q.s1 = e.d1.dot(normal_);
  q.s2 = e.d2.dot(normal_);
  q.transversal = std::abs(q.s1) >= tol_.tau_tan * e.d1.norm();
  const Vec3 chord = x - e.position;
  q.r = chord.norm();
  q.omega = q.r > 0.0 ? Vec3(chord / q.r) : Vec3::Zero();
  return q;
}

IntersectionSet PlaneSweep::intersect(const Vec3& x) const {
  IntersectionSet out;
  const double c = x.dot(normal_);
  const double tol = tol_.root_residual;
  std::vector<double> roots;
  for (const auto& ps : pieces_) {
    if (ps.flat) {
      if (std::abs(c - ps.flat_value) <= tol) out.degenerate = true;
      continue;
    }
    for (const auto& bp : ps.breakpoints)
      if (std::abs(c - bp.g) <= tol) roots.push_back(bp.t);
    for (const auto& run : ps.runs) {
      const double lo = std::min(run.g_lo, run.g_hi);
      const double hi = std::max(run.g_lo, run.g_hi);
      if (!(c > lo + tol && c < hi - tol)) continue;
      // Binary search for the bracketing pair of samples in the monotone run.
      const bool increasing = run.g_hi > run.g_lo;
      std::size_t a = run.sample_begin, b = run.sample_end - 1;
      while (b - a > 1) {
        const std::size_t mid = (a + b) / 2;
        if ((ps.g[mid] < c) == increasing)
          a = mid;
        else
          b = mid;
      }
      double t = refine(ps, ps.t[a], ps.t[b], c);
      if (ps.closed && t >= ps.t1) t -= ps.t1 - ps.t0;
      roots.push_back(t);
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double t : roots) {
    auto q = make_point(t, x);
    if (q.r > 0.0) out.points.push_back(q);
  }
  return out;
}

IntersectionSet plane_intersections(const Curve& curve, const Vec3& x, const Vec3& xi,
                                    const GeometryTolerances& tol) {
  auto set = PlaneSweep(curve, xi, tol).intersect(x);
  if (set.degenerate) throw DegeneratePlane("plane contains an arc of the curve");
  return set;
}

std::string to_string(CovectorClass c) {
  switch (c) {
    case CovectorClass::kXiPrime: return "XiPrime";
    case CovectorClass::kXiDoublePrime: return "XiDoublePrime";
    case CovectorClass::kOnSigmaBad: return "OnSigmaBad";
    case CovectorClass::kNotInXi: return "NotInXi";
    case CovectorClass::kDegenerate: return "Degenerate";
  }
  return "unknown";
}

bool has_independent_triple(const std::vector<Intersection>& points, double tau_indep) {
  const std::size_t n = points.size();
  auto independent = [&](std::size_t i, std::size_t j) {
    return points[i].omega.cross(points[j].omega).norm() > tau_indep;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!independent(i, j)) continue;
      for (std::size_t k = j + 1; k < n; ++k)
        if (independent(i, k) && independent(j, k)) return true;
    }
  return false;
}

CovectorClass classify(const IntersectionSet& set, const GeometryTolerances& tol) {
  if (set.degenerate) return CovectorClass::kDegenerate;
  if (!has_independent_triple(set.points, tol.tau_indep)) return CovectorClass::kNotInXi;
  bool tangential = false;
  for (const auto& q : set.points) {
    if (q.transversal) continue;
    tangential = true;
    if (std::abs(q.s2) <= tol.tau_tan) return CovectorClass::kOnSigmaBad;
  }
  return tangential ? CovectorClass::kXiDoublePrime : CovectorClass::kXiPrime;
}

CovectorClass classify_covector(const Curve& curve, const Vec3& x, const Vec3& xi,
                                const GeometryTolerances& tol) {
  return classify(PlaneSweep(curve, xi, tol).intersect(x), tol);
}

KTReport kt_check(const Curve& curve, const KTCheckOptions& opt) {
  if (opt.n_samples < 1) throw ValidationError("kt_check: n_samples must be >= 1");
  if (!(opt.ball_radius > 0.0)) throw ValidationError("kt_check: ball radius must be positive");
  KTReport rep;
  rep.n_samples = opt.n_samples;
  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < opt.n_samples; ++i) {
    CounterRng rng(opt.seed, stream_id(Stream::kKtDraw, static_cast<std::uint64_t>(i)));
    const Vec3 x = rng.in_ball(opt.ball_center, opt.ball_radius);
    const Vec3 xi = random_band_direction(rng, opt.pole_band);
    const auto set = PlaneSweep(curve, xi, opt.tolerances).intersect(x);
    const auto cls = classify(set, opt.tolerances);
    ++counts[static_cast<int>(cls)];
    if (cls != CovectorClass::kDegenerate)
      rep.max_intersections = std::max(rep.max_intersections, static_cast<int>(set.points.size()));
  }
  rep.n_degenerate = counts[static_cast<int>(CovectorClass::kDegenerate)];
  const double valid = std::max(1, opt.n_samples - rep.n_degenerate);
  rep.xi_prime = counts[static_cast<int>(CovectorClass::kXiPrime)] / valid;
  rep.xi_double_prime = counts[static_cast<int>(CovectorClass::kXiDoublePrime)] / valid;
  rep.on_sigma_bad = counts[static_cast<int>(CovectorClass::kOnSigmaBad)] / valid;
  rep.not_in_xi = counts[static_cast<int>(CovectorClass::kNotInXi)] / valid;

  for (int p = 0; p < opt.coverage_points; ++p) {
    CounterRng rng(opt.seed, stream_id(Stream::kKtCoverage, static_cast<std::uint64_t>(p)));
    KTCoverage cov;
    cov.x = rng.in_ball(opt.ball_center, opt.ball_radius);
    int good = 0, valid_dirs = 0;
    for (int d = 0; d < opt.coverage_directions; ++d) {
      const auto cls = classify_covector(curve, cov.x, random_band_direction(rng, opt.pole_band),
                                         opt.tolerances);
      if (cls == CovectorClass::kDegenerate) continue;
      ++valid_dirs;
      good += cls == CovectorClass::kXiPrime;
    }
    cov.xi_prime_fraction = valid_dirs > 0 ? static_cast<double>(good) / valid_dirs : 0.0;
    rep.coverage.push_back(cov);
  }
  return rep;
}

std::string format_kt_table(const KTReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "Kirillov-Tuy sampling (" << r.n_samples << " draws, " << r.n_degenerate
     << " degenerate excluded)\n";
  os << "  class            fraction\n";
  os << "  XiPrime          " << r.xi_prime << "\n";
  os << "  XiDoublePrime    " << r.xi_double_prime << "\n";
  os << "  OnSigmaBad       " << r.on_sigma_bad << "\n";
  os << "  NotInXi          " << r.not_in_xi << "\n";
  os << "  max intersections " << r.max_intersections << "\n";
  os << "  coverage (x -> XiPrime fraction of directions)\n";
  for (const auto& c : r.coverage)
    os << "    (" << std::setw(7) << c.x.x() << ", " << std::setw(7) << c.x.y() << ", "
       << std::setw(7) << c.x.z() << ")  " << c.xi_prime_fraction << "\n";
  return os.str();
}

std::string format_kt_keyvalue(const KTReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n_samples = " << r.n_samples << "\n";
  os << "n_degenerate = " << r.n_degenerate << "\n";
  os << "xi_prime_fraction = " << r.xi_prime << "\n";
  os << "xi_double_prime_fraction = " << r.xi_double_prime << "\n";
  os << "on_sigma_bad_fraction = " << r.on_sigma_bad << "\n";
  os << "not_in_xi_fraction = " << r.not_in_xi << "\n";
  os << "max_intersections = " << r.max_intersections << "\n";
  for (std::size_t i = 0; i < r.coverage.size(); ++i)
    os << "coverage_" << i << " = " << r.coverage[i].x.x() << " " << r.coverage[i].x.y() << " "
       << r.coverage[i].x.z() << " " << r.coverage[i].xi_prime_fraction << "\n";
  return os.str();
}

ConormalPoint conormal_coords(const Curve& curve, double t, double alpha, double beta, double s,
                              double z1, double z2, double pole_band) {
  if (z1 == 0.0 && z2 == 0.0) throw ValidationError("conormal_coords: (z1, z2) must be nonzero");
  if (alpha < pole_band || alpha > std::numbers::pi - pole_band)
    throw PoleError("conormal_coords: alpha outside the pole band");
  const auto frame = frame_at(alpha, beta);
  const auto e = curve.eval(t);
  ConormalPoint p;
  p.xi = z1 * frame.xi_alpha + z2 * frame.xi_beta;
  p.x = e.position + s * frame.xi;
  p.gamma_covector = {-p.xi.dot(e.d1), -s * z1, -s * z2 * std::sin(alpha)};
  return p;
}

double sigma_distance(const Curve& curve, double t, const Vec3& xi) {
  const double len = xi.norm();
  if (!(len > 0.0)) throw ValidationError("sigma_distance: xi must be nonzero");
  return curve.derivative(t).dot(xi / len);
}

}  // namespace mirt
