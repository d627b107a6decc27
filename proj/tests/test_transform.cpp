#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mirt/error.hpp"
#include "mirt/fields.hpp"
#include "mirt/parallel.hpp"
#include "mirt/transform.hpp"

namespace mirt {
namespace {

constexpr double kPi = std::numbers::pi;

LineSetParams small_params() {
  LineSetParams p;
  p.n_t = 12;
  p.n_alpha = 6;
  p.n_beta = 12;
  return p;
}

Tensor2Field smooth_field(const Grid3& g, double width) {
  Tensor2Field f(g);
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    const Vec3 x = g.position(v);
    const double s = std::exp(-x.squaredNorm() / (2 * width * width));
    for (int c = 0; c < 9; ++c) f.at(v, c) = s * (1.0 + 0.1 * c) * (c % 2 ? x.y() : 1.0);
  }
  return f;
}

TEST(LineSet, SamplingLayout) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  const LineSet ls(c, Grid3::cube(10, 1.2), small_params());
  EXPECT_EQ(ls.size(), 12u * 6u * 12u);
  EXPECT_EQ(ls.index(1, 0, 0), 1u);
  EXPECT_EQ(ls.index(0, 1, 0), 12u);
  EXPECT_NEAR(ls.t0(), -3 * kPi, 1e-14);
  EXPECT_NEAR(ls.alpha_min(), ls.params().pole_band, 1e-14);
  EXPECT_NEAR(ls.beta(6), kPi, 1e-14);
  EXPECT_LE(ls.step(), 0.5 * ls.grid().min_spacing() + 1e-15);
}

TEST(LineSet, RejectsBadParameters) {
  const Curve c = Curve::helix(2.0, 1.0, 3.0);
  auto p = small_params();
  p.step_fraction = 0.8;
  EXPECT_THROW(LineSet(c, Grid3::cube(10, 1.2), p), ValidationError);
  p = small_params();
  p.n_alpha = 0;
  EXPECT_THROW(LineSet(c, Grid3::cube(10, 1.2), p), ValidationError);
}

TEST(Forward, LambdaFieldsVanishIdentically) {
  const auto g = Grid3::cube(10, 1.2);
  ScalarField w(g);
  for (std::size_t v = 0; v < g.voxel_count(); ++v) w.at(v) = std::cos(0.3 * v);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  const auto s = mirt_forward(lambda_embed(w), ls);
  EXPECT_LT(s.norm(), 1e-13 * w.norm());
}

// Line from gamma(pi) = (-2, 0, 0) along e1 through the center of a Gaussian: the e1 (x) e2
// component integrates to width * sqrt(2 pi) on the beta channel and nothing on alpha.
TEST(Forward, AnalyticLineIntegral) {
  const auto g = Grid3::cube(41, 2.0);
  const double width = 0.2;
  Tensor2Field f(g);
  for (std::size_t v = 0; v < g.voxel_count(); ++v)
    f.at(v, flat_index(0, 1)) = std::exp(-g.position(v).squaredNorm() / (2 * width * width));
  LineSetParams p;
  p.n_t = 33;
  p.n_alpha = 17;
  p.n_beta = 8;
  const LineSet ls(Curve::circle(2.0), g, p);
  ASSERT_NEAR(ls.t(16), kPi, 1e-14);
  ASSERT_NEAR(ls.alpha(8), kPi / 2, 1e-14);
  const auto s = mirt_forward(f, ls);
  const auto li = ls.index(16, 8, 0);
  EXPECT_NEAR(s.chan_b[li], width * std::sqrt(2 * kPi), 1e-4);
  EXPECT_NEAR(s.chan_a[li], 0.0, 1e-14);
}

TEST(Forward, ReversedDirectionKeepsPairNorm) {
  const auto g = Grid3::cube(12, 1.2);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  const auto s = mirt_forward(random_tensor_field(g, 4, 0), ls);
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < ls.n_t(); ++k)
    for (int m = 0; m < ls.n_alpha(); ++m)
      for (int n = 0; n < ls.n_beta(); ++n) {
        ASSERT_NEAR(ls.alpha(ls.n_alpha() - 1 - m), kPi - ls.alpha(m), 1e-14);
        const auto a = ls.index(k, m, n);
        const auto b = ls.index(k, ls.n_alpha() - 1 - m, (n + ls.n_beta() / 2) % ls.n_beta());
        const double na = std::hypot(s.chan_a[a], s.chan_b[a]);
        const double nb = std::hypot(s.chan_a[b], s.chan_b[b]);
        worst = std::max(worst, std::abs(na - nb));
        scale = std::max(scale, na);
        EXPECT_NEAR(s.chan_a[a], -s.chan_a[b], 1e-12 * (1 + scale));
        EXPECT_NEAR(s.chan_b[a], s.chan_b[b], 1e-12 * (1 + scale));
      }
  EXPECT_GT(scale, 0.0);
  EXPECT_LT(worst, 1e-12 * scale);
}

TEST(Forward, Linear) {
  const auto g = Grid3::cube(10, 1.2);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  const auto f1 = random_tensor_field(g, 1, 0);
  const auto f2 = random_tensor_field(g, 1, 1);
  auto lhs = mirt_forward(2.0 * f1 + f2, ls);
  auto rhs = mirt_forward(f1, ls);
  rhs *= 2.0;
  rhs += mirt_forward(f2, ls);
  auto diff = lhs;
  auto neg = rhs;
  neg *= -1.0;
  diff += neg;
  EXPECT_LT(diff.norm(), 1e-12 * lhs.norm());
}

TEST(Forward, GridMismatchRejected) {
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), Grid3::cube(10, 1.2), small_params());
  EXPECT_THROW(mirt_forward(Tensor2Field(Grid3::cube(12, 1.2)), ls), ValidationError);
}

TEST(Adjoint, IdentityHoldsToRoundoff) {
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), Grid3::cube(10, 1.2), small_params());
  const auto r = adjoint_test(ls, 3, 9);
  EXPECT_EQ(r.pairs, 3);
  EXPECT_LT(r.max_defect, 1e-12);
}

TEST(Adjoint, SingleLineStaysInItsTube) {
  const auto g = Grid3::cube(12, 1.2);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  auto s = Sinogram::zeros(ls);
  const int k = 5, m = 3, n = 4;
  s.chan_b[ls.index(k, m, n)] = 1.0;
  const auto back = mirt_adjoint(s, ls);
  const Vec3 src = ls.curve().position(ls.t(k));
  const Vec3 dir = frame_at(ls.alpha(m), ls.beta(n)).xi;
  const double tube = std::sqrt(3.0) * g.min_spacing() + 1e-12;
  double inside = 0.0;
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    const Vec3 d = g.position(v) - src;
    const double dist = (d - d.dot(dir) * dir).norm();
    double mag = 0.0;
    for (int c = 0; c < 9; ++c) mag += std::abs(back.at(v, c));
    if (dist > tube) EXPECT_EQ(mag, 0.0);
    else inside += mag;
  }
  EXPECT_GT(inside, 0.0);
}

TEST(Normal, SymmetricPositiveSemidefinite) {
  const auto g = Grid3::cube(10, 1.2);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  const auto f1 = random_tensor_field(g, 2, 0);
  const auto f2 = random_tensor_field(g, 2, 1);
  const auto n1 = normal_op(f1, ls);
  const auto n2 = normal_op(f2, ls);
  const double a = grid_inner(n1, f2), b = grid_inner(f1, n2);
  EXPECT_NEAR(a, b, 1e-12 * std::abs(a) + 1e-14);
  EXPECT_GE(grid_inner(n1, f1), 0.0);
  EXPECT_GE(grid_inner(n2, f2), 0.0);
}

TEST(Normal, PotentialFieldsAreNearlyInvisible) {
  const auto g = Grid3::cube(24, 1.2);
  VectorField u(g);
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    const Vec3 x = g.position(v);
    const double s = std::exp(-x.squaredNorm() / (2 * 0.2 * 0.2));
    u.at(v, 0) = s;
    u.at(v, 2) = -0.5 * s;
  }
  LineSetParams p = small_params();
  p.n_t = 24;
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, p);
  const auto du = dprime(u);
  const auto s = mirt_forward(du, ls);
  const auto ref = mirt_forward(smooth_field(g, 0.2) * (du.norm() / smooth_field(g, 0.2).norm()), ls);
  EXPECT_LT(s.norm(), 0.2 * ref.norm());
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  const auto g = Grid3::cube(10, 1.2);
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), g, small_params());
  const auto f = random_tensor_field(g, 3, 0);
  const auto sg = random_sinogram(ls, 3, 0);
  const int saved = thread_count();
  set_thread_count(1);
  const auto a1 = mirt_adjoint(sg, ls);
  const auto f1 = mirt_forward(f, ls);
  set_thread_count(4);
  const auto a4 = mirt_adjoint(sg, ls);
  const auto f4 = mirt_forward(f, ls);
  set_thread_count(saved);
  EXPECT_EQ(a1.data(), a4.data());
  EXPECT_EQ(f1.chan_a, f4.chan_a);
  EXPECT_EQ(f1.chan_b, f4.chan_b);
}

TEST(Sinogram, Compatibility) {
  const LineSet ls(Curve::helix(2.0, 1.0, 3.0), Grid3::cube(10, 1.2), small_params());
  auto s = Sinogram::zeros(ls);
  EXPECT_NO_THROW(s.check_compatible(ls));
  s.n_beta = 11;
  EXPECT_THROW(s.check_compatible(ls), ValidationError);
  auto t = Sinogram::zeros(ls);
  t.chan_a[0] = std::nan("");
  EXPECT_THROW(t.validate(), ValidationError);
}

}  // namespace
}  // namespace mirt
