#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mirt/error.hpp"
#include "mirt/fields.hpp"
#include "mirt/parallel.hpp"
#include "mirt/phantom.hpp"
#include "mirt/reconstruct.hpp"
#include "mirt/rng.hpp"
#include "mirt/spectral.hpp"
#include "mirt/symbol.hpp"
#include "mirt/transform.hpp"

namespace mirt {
namespace {

constexpr double kPi = std::numbers::pi;

const Curve& helix() {
  static const Curve c = Curve::helix(2.0, 1.0, 3.0);
  return c;
}

Tensor2Field smooth_tensor(const Grid3& g, std::uint64_t seed) {
  PhantomSpec spec;
  spec.kind = PhantomKind::kGaussianTensor;
  CounterRng rng(seed, 0);
  for (int i = 0; i < 9; ++i) spec.amplitude.data()[i] = rng.normal();
  spec.width = 0.2;
  return make_phantom(spec, g);
}

TEST(Smoothstep, C1Step) {
  EXPECT_EQ(smoothstep(-1.0), 0.0);
  EXPECT_EQ(smoothstep(2.0), 1.0);
  EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
  const double h = 1e-7;
  EXPECT_NEAR((smoothstep(h) - smoothstep(0.0)) / h, 0.0, 1e-6);
  EXPECT_NEAR((smoothstep(1.0) - smoothstep(1.0 - h)) / h, 0.0, 1e-6);
}

TEST(Cutoff, CircleIsZeroEverywhere) {
  const Curve circle = Curve::circle(2.0);
  CounterRng rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = rng.unit_vector();
    if (std::abs(xi.z()) > 0.99) continue;
    EXPECT_EQ(cutoff_chi(circle, CutoffSpec{}, rng.in_ball(Vec3::Zero(), 1.0), xi), 0.0);
  }
}

TEST(Cutoff, HelixInteriorIsOne) {
  const Vec3 x(0.211, -0.102, -0.002);
  const Vec3 xi(0.870, -0.270, 0.413);
  EXPECT_EQ(cutoff_chi(helix(), CutoffSpec{}, x, xi), 1.0);
  EXPECT_EQ(cutoff_chi(helix(), CutoffSpec{}, x, 4.0 * xi), 1.0);
}

TEST(Cutoff, ValuesInUnitInterval) {
  CounterRng rng(2, 0);
  for (int i = 0; i < 200; ++i) {
    const double c = cutoff_chi(helix(), CutoffSpec{}, rng.in_ball(Vec3::Zero(), 1.0),
                                rng.unit_vector());
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
}

// Follow a great circle of directions, find where chi leaves 1, and check that increments
// along a fine path through that region scale with the step.
TEST(Cutoff, ContinuousAcrossTheMargin) {
  const Vec3 x(0.2, 0.1, -0.1);
  auto dir = [](double th) { return Vec3(std::cos(th), std::sin(th), 0.35); };
  const CutoffSpec spec;
  const int coarse = 2000;
  double th_lo = -1.0;
  double prev = cutoff_chi(helix(), spec, x, dir(0.0));
  for (int i = 1; i <= coarse && th_lo < 0.0; ++i) {
    const double th = 2 * kPi * i / coarse;
    const double c = cutoff_chi(helix(), spec, x, dir(th));
    if (prev == 1.0 && c < 1.0) th_lo = 2 * kPi * (i - 1) / coarse;
    prev = c;
  }
  ASSERT_GE(th_lo, 0.0);
  auto max_increment = [&](double h) {
    double worst = 0.0, last = cutoff_chi(helix(), spec, x, dir(th_lo));
    for (double th = th_lo + h; th <= th_lo + 2 * kPi / coarse * 4; th += h) {
      const double c = cutoff_chi(helix(), spec, x, dir(th));
      worst = std::max(worst, std::abs(c - last));
      last = c;
    }
    return worst;
  };
  const double a = max_increment(4e-5), b = max_increment(2e-5);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 0.2);
  EXPECT_LT(b, 0.7 * a);
}

TEST(Parametrix, ZeroInZeroOut) {
  const auto g = Grid3::cube(8, 1.2);
  EXPECT_EQ(apply_parametrix(Tensor2Field(g), helix(), CutoffSpec{}).norm(), 0.0);
}

// With the symbol frozen at x0 and data A_0(x0, xi) f^(xi), the output must be the inverse
// transform of chi(x0, xi) Pi_sol(xi) f^(xi).
TEST(Parametrix, FrozenSymbolReducesToProjection) {
  const auto g = Grid3::cube(10, 1.2);
  const Vec3 x0(0.1, 0.0, 0.05);
  const CutoffSpec spec;
  const auto f_hat = forward_fft(smooth_tensor(g, 3));
  auto data = f_hat;
  auto expect = f_hat;
  const auto& layout = f_hat.layout;
  int used = 0;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const Vec3 xi = layout.wavevector(k);
    Eigen::Matrix<std::complex<double>, 9, 1> fk, dk, ek;
    for (int c = 0; c < 9; ++c) fk[c] = f_hat.at(k, c);
    dk.setZero();
    ek.setZero();
    if (!layout.has_nyquist(k) && xi.norm() > 0.0) {
      const double chi = cutoff_chi(helix(), spec, x0, xi);
      if (chi > 0.0) {
        const Mat9 a0 = principal_symbol(helix(), x0, xi).a0;
        dk = a0.cast<std::complex<double>>() * fk;
        ek = (chi * sol_projector(xi)).cast<std::complex<double>>() * fk;
        ++used;
      }
    }
    for (int c = 0; c < 9; ++c) {
      data.at(k, c) = dk[c];
      expect.at(k, c) = ek[c];
    }
  }
  ASSERT_GT(used, 20);
  ParametrixOptions opt;
  opt.frozen_point = x0;
  const auto got = apply_parametrix_spectrum(data, helix(), spec, opt);
  const auto ref = inverse_fft(expect);
  EXPECT_LT((got - ref).norm(), 1e-6 * ref.norm());
}

TEST(Parametrix, LinearInData) {
  const auto g = Grid3::cube(8, 1.2);
  const auto a = random_tensor_field(g, 5, 0);
  const auto b = random_tensor_field(g, 5, 1);
  const CutoffSpec spec;
  const auto lhs = apply_parametrix(2.0 * a - 3.0 * b, helix(), spec);
  const auto rhs = 2.0 * apply_parametrix(a, helix(), spec) - 3.0 * apply_parametrix(b, helix(), spec);
  EXPECT_LT((lhs - rhs).norm(), 1e-10 * lhs.norm());
}

TEST(Parametrix, ImaginaryResidueVanishes) {
  const auto g = Grid3::cube(8, 1.2);
  const auto nf = random_tensor_field(g, 6, 0);
  const CutoffSpec spec;
  const auto out = apply_parametrix(nf, helix(), spec);
  const auto spec_hat = forward_fft(nf);
  for (std::size_t v : {std::size_t{0}, g.index(3, 4, 5), g.index(7, 2, 1)}) {
    const auto ev = evaluate_parametrix_voxel(spec_hat, helix(), spec, v);
    EXPECT_LT(ev.imag_part.norm(), 1e-10 * out.norm());
    EXPECT_LT((ev.real_part - tensor_at(out, v)).norm(), 1e-10 * out.norm());
  }
}

TEST(Parametrix, LambdaFieldsGiveZero) {
  const auto g = Grid3::cube(10, 1.2);
  LineSetParams p;
  p.n_t = 12;
  p.n_alpha = 6;
  p.n_beta = 12;
  const LineSet ls(helix(), g, p);
  const auto w = gaussian_bump(g, Vec3::Zero(), 0.2);
  const auto nf = normal_op(lambda_embed(w), ls);
  EXPECT_LT(nf.norm(), 1e-13 * w.norm());
  EXPECT_LT(apply_parametrix(nf, helix(), CutoffSpec{}).norm(), 1e-12 * w.norm());
}

TEST(Parametrix, IndependentOfThreadCount) {
  const auto g = Grid3::cube(8, 1.2);
  const auto nf = random_tensor_field(g, 7, 0);
  const int saved = thread_count();
  set_thread_count(1);
  const auto a = apply_parametrix(nf, helix(), CutoffSpec{});
  set_thread_count(3);
  const auto b = apply_parametrix(nf, helix(), CutoffSpec{});
  set_thread_count(saved);
  EXPECT_EQ(a.data(), b.data());
}

TEST(Calibrate, ScalarLeastSquares) {
  const auto g = Grid3::cube(8, 1.2);
  const auto f = random_tensor_field(g, 8, 0);
  const Mask all(g.voxel_count(), 1);
  EXPECT_NEAR(calibrate(f, f, all), 1.0, 1e-15);
  EXPECT_NEAR(calibrate(2.0 * f, f, all), 0.5, 1e-15);
  const auto h = random_tensor_field(g, 8, 1);
  EXPECT_NEAR(calibrate(3.0 * h, 3.0 * f, all), calibrate(h, f, all), 1e-14);
  EXPECT_EQ(calibrate(Tensor2Field(g), f, all), 0.0);
}

TEST(Report, IdenticalAndOrthogonalFields) {
  const auto g = Grid3::cube(16, 1.2);
  const auto f = random_tensor_field(g, 9, 0);
  const Mask all(g.voxel_count(), 1);
  const auto same = error_report(f, f, all);
  EXPECT_NEAR(same.relative_l2, 0.0, 1e-15);
  EXPECT_NEAR(same.correlation, 1.0, 1e-12);
  EXPECT_EQ(same.mask_voxels, g.voxel_count());
  const auto other = error_report(random_tensor_field(g, 9, 1), f, all);
  EXPECT_LT(std::abs(other.correlation), 0.1);
  EXPECT_THROW(error_report(f, f, Mask(g.voxel_count(), 0)), ValidationError);
  EXPECT_THROW(error_report(f, Tensor2Field(g), all), ValidationError);
  EXPECT_NE(format_recon_report(same).find("correlation"), std::string::npos);
}

TEST(Report, ErrorGrowsWithNoise) {
  const auto g = Grid3::cube(12, 1.2);
  const auto f = smooth_tensor(g, 10);
  const auto noise = random_tensor_field(g, 10, 1);
  const auto mask = default_mask(f);
  double last = -1.0;
  for (double amp : {0.0, 0.01, 0.03, 0.1, 0.3}) {
    const auto rep = error_report(f + (amp * f.max_abs()) * noise, f, mask);
    EXPECT_GT(rep.relative_l2, last);
    last = rep.relative_l2;
  }
}

TEST(Report, DefaultMaskThresholdsEnergy) {
  const auto g = Grid3::cube(8, 1.2);
  Tensor2Field f(g);
  f.at(0, 0) = 1.0;
  f.at(1, 4) = 0.2;   // energy 0.04 > 0.01
  f.at(2, 8) = 0.05;  // energy 0.0025 < 0.01
  const auto m = default_mask(f);
  EXPECT_EQ(m[0], 1);
  EXPECT_EQ(m[1], 1);
  EXPECT_EQ(m[2], 0);
}

}  // namespace
}  // namespace mirt
