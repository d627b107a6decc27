#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mirt/curve.hpp"
#include "mirt/error.hpp"
#include "mirt/geometry.hpp"
#include "mirt/rng.hpp"

namespace mirt {
namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: dense sign-change scan of g(t) = (gamma(t) - x) . xi followed by plain bisection.
std::vector<double> brute_force_roots(const Curve& c, const Vec3& x, const Vec3& xi) {
  std::vector<double> roots;
  const Vec3 n = xi.normalized();
  auto g = [&](double t) { return (c.position(t) - x).dot(n); };
  for (const auto& piece : c.pieces()) {
    const int m = 200000;
    const double h = piece.length() / m;
    for (int i = 0; i < m; ++i) {
      double a = piece.t0 + i * h, b = a + h;
      if (!piece.closed && i == m - 1) b = piece.t1;
      double ga = g(a), gb = g(b);
      if (ga == 0.0) { roots.push_back(a); continue; }
      if (ga * gb > 0.0) continue;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (ga * gm <= 0.0) { b = mid; gb = gm; } else { a = mid; ga = gm; }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

TEST(Frames, OrthonormalAndRightHanded) {
  const auto f = frame_at(0.7, 2.1);
  EXPECT_NEAR(f.xi.norm(), 1.0, 1e-15);
  EXPECT_NEAR(f.xi.dot(f.xi_alpha), 0.0, 1e-15);
  EXPECT_NEAR(f.xi.dot(f.xi_beta), 0.0, 1e-15);
  EXPECT_NEAR(f.xi_alpha.dot(f.xi_beta), 0.0, 1e-15);
  EXPECT_LT((f.xi.cross(f.xi_alpha) - f.xi_beta).norm(), 1e-14);
}

TEST(Frames, FrameOfInvertsFrameAt) {
  const auto f = frame_at(1.2, 4.0);
  const auto g = frame_of(f.xi);
  EXPECT_NEAR(g.alpha, 1.2, 1e-12);
  EXPECT_NEAR(g.beta, 4.0, 1e-12);
  EXPECT_THROW(frame_of(Vec3(0, 0, 1)), PoleError);
  EXPECT_THROW(frame_of(Vec3(0, 0, -1)), PoleError);
  EXPECT_THROW(frame_of(Vec3(2, 0, 0)), ValidationError);
}

TEST(PlaneSweep, MatchesBruteForceOnHelix) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 x = rng.in_ball(Vec3::Zero(), 1.0);
    const Vec3 xi = rng.unit_vector();
    const auto expect = brute_force_roots(c, x, xi);
    const auto got = plane_intersections(c, x, xi);
    ASSERT_EQ(got.points.size(), expect.size()) << "trial " << trial;
    for (std::size_t q = 0; q < expect.size(); ++q) {
      EXPECT_NEAR(got.points[q].t, expect[q], 1e-9);
      const auto& p = got.points[q];
      EXPECT_LT(std::abs((c.position(p.t) - x).dot(xi)), 1e-10);
      EXPECT_NEAR((x - c.position(p.t)).norm(), p.r, 1e-12);
      EXPECT_NEAR(p.omega.norm(), 1.0, 1e-12);
      EXPECT_NEAR(p.s1, c.derivative(p.t).dot(xi), 1e-12);
    }
  }
}

TEST(PlaneSweep, MatchesBruteForceOnClosedCurves) {
  const Curve curves[] = {Curve::crown(2.0, 0.5, 3), Curve::two_circles(2.0, 1.0)};
  CounterRng rng(4, 0);
  for (const auto& c : curves)
    for (int trial = 0; trial < 20; ++trial) {
      const Vec3 x = rng.in_ball(Vec3::Zero(), 1.0);
      Vec3 xi = rng.unit_vector();
      if (std::abs(xi.z()) > 0.99) continue;
      const auto expect = brute_force_roots(c, x, xi);
      const auto got = plane_intersections(c, x, xi);
      ASSERT_EQ(got.points.size(), expect.size());
      for (std::size_t q = 0; q < expect.size(); ++q) EXPECT_NEAR(got.points[q].t, expect[q], 1e-9);
    }
}

TEST(PlaneSweep, OneSweepServesManyPoints) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const Vec3 xi = Vec3(0.3, 0.5, 0.6).normalized();
  const PlaneSweep sweep(c, xi);
  CounterRng rng(5, 0);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = rng.in_ball(Vec3::Zero(), 1.0);
    const auto a = sweep.intersect(x);
    const auto b = plane_intersections(c, x, xi);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t q = 0; q < a.points.size(); ++q) EXPECT_EQ(a.points[q].t, b.points[q].t);
  }
}

TEST(PlaneSweep, CirclePlaneIsDegenerate) {
  const Curve c = Curve::circle(2.0);
  EXPECT_THROW(plane_intersections(c, Vec3::Zero(), Vec3::UnitZ()), DegeneratePlane);
  EXPECT_EQ(classify_covector(c, Vec3::Zero(), Vec3::UnitZ()), CovectorClass::kDegenerate);
  EXPECT_EQ(classify_covector(c, Vec3(0, 0, 0.3), Vec3::UnitZ()), CovectorClass::kNotInXi);
}

TEST(PlaneSweep, CircleNeverHasThreeChords) {
  const Curve c = Curve::circle(2.0);
  CounterRng rng(6, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = rng.unit_vector();
    if (std::abs(xi.z()) > 0.99) continue;
    const auto set = plane_intersections(c, rng.in_ball(Vec3::Zero(), 1.0), xi);
    EXPECT_LE(set.points.size(), 2u);
  }
}

TEST(PlaneSweep, TangentialRootIsFlagged) {
  // The plane x = 2 touches the circle at t = 0 only.
  const Curve c = Curve::circle(2.0);
  const auto set = plane_intersections(c, Vec3(2.0, 0.3, 0.1), Vec3::UnitX());
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_FALSE(set.points[0].transversal);
  EXPECT_NEAR(set.points[0].t, 0.0, 1e-9);
  EXPECT_NEAR(set.points[0].s2, -2.0, 1e-9);
}

TEST(Classify, TangentialHelixPlaneIsXiDoublePrime) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const auto e = c.eval(0.0);
  const Vec3 xi = e.d1.cross(Vec3(1.0, 0.0, 0.5)).normalized();
  const Vec3 x = e.position + Vec3(-1.5, 0.0, -0.75);
  ASSERT_NEAR((x - e.position).dot(xi), 0.0, 1e-14);
  const auto set = plane_intersections(c, x, xi);
  bool found = false;
  for (const auto& p : set.points)
    if (!p.transversal) {
      found = true;
      EXPECT_NEAR(p.t, 0.0, 1e-6);
    }
  EXPECT_TRUE(found);
  const auto cls = classify(set);
  EXPECT_TRUE(cls == CovectorClass::kXiDoublePrime || cls == CovectorClass::kNotInXi);
}

TEST(Classify, IndependentTriple) {
  Intersection a, b, d;
  a.omega = Vec3::UnitX();
  b.omega = -Vec3::UnitX();
  d.omega = Vec3::UnitY();
  EXPECT_FALSE(has_independent_triple({a, b, d}, 1e-6));
  Intersection e;
  e.omega = Vec3(1, 1, 0).normalized();
  EXPECT_TRUE(has_independent_triple({a, d, e}, 1e-6));
}

TEST(KTCheck, HelixCoverageGrowsWithTurns) {
  KTCheckOptions opt;
  opt.n_samples = 400;
  const auto one = kt_check(Curve::helix(2.0, 1.0, 1.0), opt);
  const auto three = kt_check(Curve::helix(2.0, 1.0, 3.0), opt);
  EXPECT_LT(one.xi_prime, 0.2);
  EXPECT_GT(three.xi_prime, 0.95);
  EXPECT_GE(three.max_intersections, 3);
  const auto circ = kt_check(Curve::circle(2.0), opt);
  EXPECT_EQ(circ.xi_prime, 0.0);
  EXPECT_NEAR(circ.xi_prime + circ.xi_double_prime + circ.on_sigma_bad + circ.not_in_xi, 1.0,
              1e-12);
}

TEST(KTCheck, ReproducibleAndFormatted) {
  KTCheckOptions opt;
  opt.n_samples = 100;
  const Curve c = Curve::helix(2.0, 1.0, 2.0);
  const auto a = kt_check(c, opt);
  const auto b = kt_check(c, opt);
  EXPECT_EQ(a.xi_prime, b.xi_prime);
  EXPECT_NE(format_kt_keyvalue(a).find("xi_prime"), std::string::npos);
  EXPECT_FALSE(format_kt_table(a).empty());
  opt.n_samples = 0;
  EXPECT_THROW(kt_check(c, opt), ValidationError);
}

TEST(Conormal, CovectorAnnihilatesChordAndTangent) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const auto p = conormal_coords(c, 0.4, 1.1, 2.5, 0.8, 0.3, -0.7);
  const auto f = frame_at(1.1, 2.5);
  EXPECT_LT((p.x - c.position(0.4) - 0.8 * f.xi).norm(), 1e-14);
  EXPECT_NEAR(p.xi.dot(f.xi), 0.0, 1e-14);
  EXPECT_NEAR(p.gamma_covector[0], -p.xi.dot(c.derivative(0.4)), 1e-14);
  // d/dalpha and d/dbeta of x paired with xi.
  const double h = 1e-6;
  const Vec3 dxa = (c.position(0.4) + 0.8 * frame_at(1.1 + h, 2.5).xi - p.x) / h;
  const Vec3 dxb = (c.position(0.4) + 0.8 * frame_at(1.1, 2.5 + h).xi - p.x) / h;
  EXPECT_NEAR(p.gamma_covector[1], -p.xi.dot(dxa), 1e-5);
  EXPECT_NEAR(p.gamma_covector[2], -p.xi.dot(dxb), 1e-5);
  EXPECT_THROW(conormal_coords(c, 0, 0.01, 0, 1, 1, 0), PoleError);
  EXPECT_THROW(conormal_coords(c, 0, 1, 0, 1, 0, 0), ValidationError);
}

TEST(Sigma, DistanceIsNormalizedTangentComponent) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  EXPECT_NEAR(sigma_distance(c, 0.0, Vec3(0, 3, 0)), 2.0, 1e-14);
  EXPECT_THROW(sigma_distance(c, 0.0, Vec3::Zero()), ValidationError);
}

TEST(Curve, ValidateAndDerivatives) {
  const Curve c = Curve::crown(2.0, 0.5, 3);
  EXPECT_NO_THROW(c.validate());
  const double h = 1e-6, t = 0.9;
  EXPECT_LT(((c.position(t + h) - c.position(t - h)) / (2 * h) - c.derivative(t)).norm(), 1e-8);
  EXPECT_LT(((c.derivative(t + h) - c.derivative(t - h)) / (2 * h) - c.second_derivative(t)).norm(),
            1e-7);
  EXPECT_THROW(parse_curve_kind("spiral"), ValidationError);
  EXPECT_EQ(parse_curve_kind("two-circles"), CurveKind::kTwoCircles);
  EXPECT_NEAR(Curve::helix(2, 1, 3).t1(), 3 * kPi, 1e-14);
}

TEST(PlaneSweep, CircleAxisPlaneRoots) {
  const auto set = plane_intersections(Curve::circle(2.0), Vec3::Zero(), Vec3::UnitX());
  ASSERT_EQ(set.points.size(), 2u);
  EXPECT_NEAR(set.points[0].t, kPi / 2, 1e-10);
  EXPECT_NEAR(set.points[1].t, 3 * kPi / 2, 1e-10);
  EXPECT_TRUE(set.points[0].transversal);
  EXPECT_TRUE(set.points[1].transversal);
}

TEST(PlaneSweep, DoubledSamplingMovesNoRoot) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  GeometryTolerances fine;
  fine.samples_per_period *= 2;
  CounterRng rng(12, 0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = rng.in_ball(Vec3::Zero(), 1.0);
    const Vec3 xi = rng.unit_vector();
    const auto a = plane_intersections(c, x, xi);
    const auto b = plane_intersections(c, x, xi, fine);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t q = 0; q < a.points.size(); ++q) EXPECT_NEAR(a.points[q].t, b.points[q].t, 1e-8);
  }
}

TEST(Classify, InvariantUnderPositiveScaling) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  CounterRng rng(13, 0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = rng.in_ball(Vec3::Zero(), 1.0);
    const Vec3 xi = rng.unit_vector();
    EXPECT_EQ(classify_covector(c, x, xi), classify_covector(c, x, 7.5 * xi));
  }
}

TEST(Classify, HelixNearAxisHorizontalIsXiPrime) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  EXPECT_EQ(classify_covector(c, Vec3(0.05, -0.02, 0.1), Vec3(0.9, 0.3, 0.2).normalized()),
            CovectorClass::kXiPrime);
  const auto set = plane_intersections(c, Vec3(0.05, -0.02, 0.1), Vec3(0.9, 0.3, 0.2));
  EXPECT_TRUE(has_independent_triple(set.points, 1e-6));
}

TEST(Classify, CrownTangencyIsXiDoublePrime) {
  const Curve c = Curve::crown(2.0, 0.5, 3);
  const double ts = 0.3;
  const auto e = c.eval(ts);
  CounterRng rng(14, 0);
  bool found = false;
  for (int trial = 0; trial < 200 && !found; ++trial) {
    const Vec3 xi = e.d1.cross(rng.unit_vector()).normalized();
    Vec3 v = rng.in_ball(Vec3::Zero(), 1.0) - e.position;
    v -= v.dot(xi) * xi;
    const Vec3 x = e.position + v;
    if (x.norm() > 1.0) continue;
    const auto set = plane_intersections(c, x, xi);
    if (classify(set) != CovectorClass::kXiDoublePrime) continue;
    found = true;
    bool tangent_at_ts = false;
    for (const auto& p : set.points)
      if (!p.transversal) {
        tangent_at_ts |= std::abs(p.t - ts) < 1e-6;
        EXPECT_GT(std::abs(p.s2), 1e-6);
      }
    EXPECT_TRUE(tangent_at_ts);
  }
  EXPECT_TRUE(found);
}

TEST(Conormal, ClosedFormExamples) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const auto a = conormal_coords(c, 0.7, 1.0, 0.5, 0.0, 0.4, 0.9);
  EXPECT_EQ(a.gamma_covector[1], 0.0);
  EXPECT_EQ(a.gamma_covector[2], 0.0);
  const auto b = conormal_coords(c, 0.7, 1.0, 0.5, 2.0, 1.0, 0.0);
  EXPECT_NEAR(b.gamma_covector[0], -b.xi.dot(c.derivative(0.7)), 1e-14);
  EXPECT_NEAR(b.gamma_covector[1], -2.0, 1e-14);
  EXPECT_NEAR(b.gamma_covector[2], 0.0, 1e-14);
}

// The 1-form Gamma.d(t, alpha, beta) + xi.dx vanishes on tangent vectors of
// Z = {(line, x) : x on the line}.
TEST(Conormal, OneFormAnnihilatesIncidenceTangents) {
  const Curve c = Curve::crown(2.0, 0.5, 3);
  const double p0[4] = {0.8, 1.2, 2.0, 1.3};  // t, alpha, beta, s
  const auto cp = conormal_coords(c, p0[0], p0[1], p0[2], p0[3], 0.6, -0.8);
  auto point = [&](const double* p) {
    return Vec3(c.position(p[0]) + p[3] * frame_at(p[1], p[2]).xi);
  };
  for (double h : {1e-3, 5e-4}) {
    for (int dir = 0; dir < 4; ++dir) {
      double pp[4], pm[4];
      std::copy(p0, p0 + 4, pp);
      std::copy(p0, p0 + 4, pm);
      pp[dir] += h;
      pm[dir] -= h;
      const Vec3 dx = (point(pp) - point(pm)) / (2 * h);
      const double dline = dir < 3 ? 1.0 : 0.0;
      const double form = (dir < 3 ? dline * cp.gamma_covector[dir] : 0.0) + cp.xi.dot(dx);
      EXPECT_LT(std::abs(form), 10 * h * h) << "dir " << dir << " h " << h;
    }
  }
}

TEST(Sigma, SignChangesBracketTangentialPlanes) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const auto e = c.eval(1.0);
  const Vec3 xi = e.d1.cross(Vec3(0.2, -0.4, 1.0)).normalized();
  EXPECT_NEAR(sigma_distance(c, 1.0, xi), 0.0, 1e-14);
  EXPECT_LT(sigma_distance(c, 0.99, xi) * sigma_distance(c, 1.01, xi), 0.0);
  const Vec3 x = e.position + 0.5 * (Vec3::Zero() - e.position - (-e.position).dot(xi) * xi);
  const auto set = plane_intersections(c, x, xi);
  bool tangent = false;
  for (const auto& p : set.points)
    if (!p.transversal) tangent |= std::abs(p.t - 1.0) < 1e-6;
  EXPECT_TRUE(tangent);
  EXPECT_NEAR(sigma_distance(Curve::circle(2.0), 2.3, Vec3::UnitZ()), 0.0, 1e-15);
}

TEST(Frames, OrthonormalAcrossManyDirections) {
  CounterRng rng(15, 0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 xi = rng.unit_vector();
    if (std::abs(xi.z()) > std::cos(0.1)) continue;
    const auto f = frame_of(xi);
    worst = std::max({worst, std::abs(f.xi.dot(f.xi_alpha)), std::abs(f.xi.dot(f.xi_beta)),
                      std::abs(f.xi_alpha.dot(f.xi_beta))});
  }
  EXPECT_LE(worst, 1e-14);
  const auto e1 = frame_of(Vec3::UnitX());
  EXPECT_NEAR(e1.alpha, kPi / 2, 1e-15);
  EXPECT_LT((e1.xi_alpha - Vec3(0, 0, -1)).norm(), 1e-15);
  EXPECT_LT((e1.xi_beta - Vec3(0, 1, 0)).norm(), 1e-15);
}

}  // namespace
}  // namespace mirt
