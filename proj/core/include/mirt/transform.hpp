#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mirt/curve.hpp"
#include "mirt/geometry.hpp"
#include "mirt/grid.hpp"

namespace mirt {

struct LineSetParams {
  int n_t = 96;
  int n_alpha = 48;
  int n_beta = 96;
  double pole_band = kDefaultPoleBand;
  /// Line quadrature step as a fraction of the smallest grid spacing; at most 1/2.
  double step_fraction = 0.5;
};

/// Lines gamma(t_k) + s omega(alpha_m, beta_n) through the source curve, with midpoint samples
/// in t and alpha, uniform beta, and measure weight dt sin(alpha) dalpha dbeta. Each line is
/// sampled with step h_s over its chord through the grid's bounding sphere.
class LineSet {
 public:
  LineSet(const Curve& curve, const Grid3& grid, const LineSetParams& params = {});

  const Curve& curve() const { return curve_; }
  const Grid3& grid() const { return grid_; }
  const LineSetParams& params() const { return params_; }

  int n_t() const { return params_.n_t; }
  int n_alpha() const { return params_.n_alpha; }
  int n_beta() const { return params_.n_beta; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_t()) * n_alpha() * n_beta();
  }
  /// Linear line index, t fastest.
  std::size_t index(int k, int m, int n) const {
    return static_cast<std::size_t>(k) +
           static_cast<std::size_t>(n_t()) *
               (static_cast<std::size_t>(m) + static_cast<std::size_t>(n_alpha()) * n);
  }

  double t(int k) const { return t0_ + (k + 0.5) * dt_; }
  double alpha(int m) const { return alpha_min_ + (m + 0.5) * dalpha_; }
  double beta(int n) const { return n * dbeta_; }
  /// Measure weight of line (k, m, n).
  double weight(int m) const { return dt_ * std::sin(alpha(m)) * dalpha_ * dbeta_; }

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double alpha_min() const { return alpha_min_; }
  double alpha_max() const { return alpha_max_; }
  double step() const { return step_; }
  const Vec3& sphere_center() const { return center_; }
  double sphere_radius() const { return radius_; }

 private:
  Curve curve_;
  Grid3 grid_;
  LineSetParams params_;
  double t0_, t1_, dt_;
  double alpha_min_, alpha_max_, dalpha_, dbeta_;
  double step_;
  Vec3 center_;
  double radius_;
};

/// M_alpha and M_beta values per line, stored in LineSet::index order.
struct Sinogram {
  int n_t = 0;
  int n_alpha = 0;
  int n_beta = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::vector<double> chan_a;
  std::vector<double> chan_b;

  static Sinogram zeros(const LineSet& lines);
  std::size_t size() const { return chan_a.size(); }
  /// Throws ValidationError on non-finite values or inconsistent sizes.
  void validate() const;
  /// Throws ValidationError unless the sampling matches the line set.
  void check_compatible(const LineSet& lines) const;
  double norm() const;

  Sinogram& operator+=(const Sinogram& other);
  Sinogram& operator*=(double s);
};

Sinogram mirt_forward(const Tensor2Field& f, const LineSet& lines);

/// Exact transpose of mirt_forward with respect to sinogram_inner and grid_inner.
Tensor2Field mirt_adjoint(const Sinogram& g, const LineSet& lines);

/// mirt_adjoint(mirt_forward(f)).
Tensor2Field normal_op(const Tensor2Field& f, const LineSet& lines);

/// Sum over lines of weight * (A A' + B B').
double sinogram_inner(const Sinogram& a, const Sinogram& b, const LineSet& lines);

/// |<Mf, g> - <f, M*g>| / (|Mf| |g| + |f| |M*g|), norms induced by the two inner products.
double adjoint_defect(const Tensor2Field& f, const Sinogram& g, const LineSet& lines);

struct AdjointTestResult {
  int pairs = 0;
  double max_defect = 0.0;
  double seconds = 0.0;
};

/// Seeded random (f, g) pairs with standard normal entries.
AdjointTestResult adjoint_test(const LineSet& lines, int pairs, std::uint64_t seed);

Tensor2Field random_tensor_field(const Grid3& grid, std::uint64_t seed, std::uint64_t index);
Sinogram random_sinogram(const LineSet& lines, std::uint64_t seed, std::uint64_t index);

}  // namespace mirt
