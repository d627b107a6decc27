#pragma once

#include <string>
#include <string_view>

#include "mirt/grid.hpp"
#include "mirt/tensor.hpp"

namespace mirt {

enum class PhantomKind {
  kGaussianTensor,
  kBallTensor,
  kSolenoidalGaussian,
  kPotentialDprime,
  kLambdaScalar
};

std::string_view to_string(PhantomKind kind);
/// "gaussian-tensor", "ball-tensor", "solenoidal-gaussian", "potential-dprime", "lambda-scalar".
PhantomKind parse_phantom_kind(std::string_view name);

Mat3 default_phantom_amplitude();

/// Test fields built from one bump b(x) around `center`:
///
///   gaussian-tensor      A b(x),  b = exp(-|x - c|^2 / (2 width^2))
///   ball-tensor          A 1{|x - c| <= width}
///   solenoidal-gaussian  solenoidal projection of gaussian-tensor
///   potential-dprime     d'u with u = b(x) A e_1
///   lambda-scalar        lambda w with w = tr(A) / 3 b(x)
struct PhantomSpec {
  PhantomKind kind = PhantomKind::kSolenoidalGaussian;
  Mat3 amplitude = default_phantom_amplitude();
  Vec3 center = Vec3::Zero();
  double width = 0.25;

  /// Support radius used for margin checks: 3 width for bumps, width for the ball.
  double extent() const;
  /// Throws ValidationError for a bad width or non-finite values and MarginError unless the
  /// support lies in the unit ball and keeps two voxels clear of the grid boundary.
  void validate(const Grid3& grid) const;
};

ScalarField gaussian_bump(const Grid3& grid, const Vec3& center, double width);

Tensor2Field make_phantom(const PhantomSpec& spec, const Grid3& grid);

}  // namespace mirt
