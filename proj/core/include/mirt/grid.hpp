#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mirt/tensor.hpp"

namespace mirt {

/// Regular sampling of a box in R^3. Voxel (i, j, k) sits at origin + (i, j, k) * spacing,
/// with the x index varying fastest in linear storage.
struct Grid3 {
  std::array<int, 3> counts{0, 0, 0};
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();

  /// Cubic grid of n^3 voxels spanning [-half_width, half_width]^3.
  static Grid3 cube(int n, double half_width);

  /// Throws ValidationError unless counts >= 4, spacings > 0 and the box contains the unit ball.
  void validate() const;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(counts[0]) * (static_cast<std::size_t>(j) +
                                                  static_cast<std::size_t>(counts[1]) * k);
  }
  std::array<int, 3> coords(std::size_t index) const;
  Vec3 position(int i, int j, int k) const {
    return origin + Vec3(i * spacing[0], j * spacing[1], k * spacing[2]);
  }
  Vec3 position(std::size_t index) const {
    auto c = coords(index);
    return position(c[0], c[1], c[2]);
  }
  Vec3 upper() const {
    return position(counts[0] - 1, counts[1] - 1, counts[2] - 1);
  }
  Vec3 center() const { return 0.5 * (origin + upper()); }
  /// Radius of the sphere around center() that encloses every voxel.
  double bounding_radius() const { return 0.5 * (upper() - origin).norm(); }
  double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  double min_spacing() const { return spacing.minCoeff(); }

  bool operator==(const Grid3& other) const {
    return counts == other.counts && origin == other.origin && spacing == other.spacing;
  }
};

/// Real field with C components per voxel, stored voxel-major (components innermost).
template <int C>
class Field {
 public:
  static constexpr int kComponents = C;

  Field() = default;
  explicit Field(const Grid3& grid)
      : grid_(grid), values_(grid.voxel_count() * C, 0.0) {}
  Field(const Grid3& grid, std::vector<double> values);

  const Grid3& grid() const { return grid_; }
  std::size_t voxel_count() const { return grid_.voxel_count(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double& at(std::size_t voxel, int component = 0) { return values_[voxel * C + component]; }
  double at(std::size_t voxel, int component = 0) const {
    return values_[voxel * C + component];
  }
  std::span<double, C> voxel(std::size_t v) {
    return std::span<double, C>(values_.data() + v * C, C);
  }
  std::span<const double, C> voxel(std::size_t v) const {
    return std::span<const double, C>(values_.data() + v * C, C);
  }

  /// Plain Euclidean norm of all stored values.
  double norm() const;
  /// Largest absolute value.
  double max_abs() const;
  bool all_finite() const;
  /// Throws ValidationError on non-finite values.
  void validate() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  Grid3 grid_;
  std::vector<double> values_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using Tensor2Field = Field<9>;

/// Sum of products of all stored values.
template <int C>
double dot(const Field<C>& a, const Field<C>& b);

/// Quadrature inner product: voxel volume times dot().
template <int C>
double grid_inner(const Field<C>& a, const Field<C>& b) {
  return a.grid().voxel_volume() * dot(a, b);
}

inline Vec9 tensor_at(const Tensor2Field& f, std::size_t voxel) {
  Vec9 v;
  for (int c = 0; c < 9; ++c) v[c] = f.at(voxel, c);
  return v;
}

extern template class Field<1>;
extern template class Field<3>;
extern template class Field<9>;

}  // namespace mirt
