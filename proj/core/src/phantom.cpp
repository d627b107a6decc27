#include "mirt/phantom.hpp"

#include <cmath>

#include "mirt/error.hpp"
#include "mirt/fields.hpp"

namespace mirt {

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::kGaussianTensor: return "gaussian-tensor";
    case PhantomKind::kBallTensor: return "ball-tensor";
    case PhantomKind::kSolenoidalGaussian: return "solenoidal-gaussian";
    case PhantomKind::kPotentialDprime: return "potential-dprime";
    case PhantomKind::kLambdaScalar: return "lambda-scalar";
  }
  return "unknown";
}

PhantomKind parse_phantom_kind(std::string_view name) {
  for (auto k : {PhantomKind::kGaussianTensor, PhantomKind::kBallTensor,
                 PhantomKind::kSolenoidalGaussian, PhantomKind::kPotentialDprime,
                 PhantomKind::kLambdaScalar})
    if (name == to_string(k)) return k;
  throw ValidationError("unknown phantom kind '" + std::string(name) + "'");
}

Mat3 default_phantom_amplitude() {
  Mat3 a;
  a << 1.0, 0.5, 0.0,
       0.2, -0.5, 0.3,
       0.0, 0.4, 0.8;
  return a;
}

double PhantomSpec::extent() const {
  return kind == PhantomKind::kBallTensor ? width : 3.0 * width;
}

void PhantomSpec::validate(const Grid3& grid) const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("phantom: width must be positive");
  if (!amplitude.allFinite() || !center.allFinite())
    throw ValidationError("phantom: non-finite amplitude or center");
  const double reach = center.norm() + extent();
  if (reach > 1.0) throw MarginError("phantom: support leaves the unit ball");
  const double margin = 2.0 * grid.spacing.maxCoeff();
  for (int ax = 0; ax < 3; ++ax) {
    if (center[ax] - extent() - margin < grid.origin[ax] ||
        center[ax] + extent() + margin > grid.upper()[ax])
      throw MarginError("phantom: support within two voxels of the grid boundary");
  }
}

ScalarField gaussian_bump(const Grid3& grid, const Vec3& center, double width) {
  ScalarField b(grid);
  const double inv = 1.0 / (2.0 * width * width);
  for (std::size_t v = 0; v < grid.voxel_count(); ++v)
    b.at(v) = std::exp(-(grid.position(v) - center).squaredNorm() * inv);
  return b;
}

Tensor2Field make_phantom(const PhantomSpec& spec, const Grid3& grid) {
  grid.validate();
  spec.validate(grid);
  const Vec9 a = flatten(spec.amplitude);
  switch (spec.kind) {
    case PhantomKind::kGaussianTensor:
    case PhantomKind::kSolenoidalGaussian: {
      const auto b = gaussian_bump(grid, spec.center, spec.width);
      Tensor2Field f(grid);
      for (std::size_t v = 0; v < grid.voxel_count(); ++v)
        for (int c = 0; c < 9; ++c) f.at(v, c) = a[c] * b.at(v);
      return spec.kind == PhantomKind::kGaussianTensor ? f : solenoidal_projection(f);
    }
    case PhantomKind::kBallTensor: {
      Tensor2Field f(grid);
      for (std::size_t v = 0; v < grid.voxel_count(); ++v)
        if ((grid.position(v) - spec.center).norm() <= spec.width)
          for (int c = 0; c < 9; ++c) f.at(v, c) = a[c];
      return f;
    }
    case PhantomKind::kPotentialDprime: {
      const auto b = gaussian_bump(grid, spec.center, spec.width);
      const Vec3 dir = spec.amplitude.col(0);
      VectorField u(grid);
      for (std::size_t v = 0; v < grid.voxel_count(); ++v)
        for (int c = 0; c < 3; ++c) u.at(v, c) = dir[c] * b.at(v);
      return dprime(u);
    }
    case PhantomKind::kLambdaScalar: {
      auto w = gaussian_bump(grid, spec.center, spec.width);
      w *= spec.amplitude.trace() / 3.0;
      return lambda_embed(w);
    }
  }
  throw ValidationError("phantom: unknown kind");
}

}  // namespace mirt
