#include "mirt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mirt/error.hpp"

namespace mirt {

Grid3 Grid3::cube(int n, double half_width) {
  Grid3 g;
  g.counts = {n, n, n};
  g.origin = Vec3::Constant(-half_width);
  const double h = n > 1 ? 2.0 * half_width / (n - 1) : 1.0;
  g.spacing = Vec3::Constant(h);
  return g;
}

void Grid3::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (counts[d] < 4)
      throw ValidationError("grid: every count must be >= 4, got " + std::to_string(counts[d]));
    if (!(spacing[d] > 0.0) || !std::isfinite(spacing[d]))
      throw ValidationError("grid: spacings must be positive");
    if (!std::isfinite(origin[d])) throw ValidationError("grid: origin must be finite");
  }
  const Vec3 hi = upper();
  for (int d = 0; d < 3; ++d) {
    if (origin[d] > -1.0 || hi[d] < 1.0)
      throw ValidationError("grid: bounding box must contain the closed unit ball");
  }
}

std::array<int, 3> Grid3::coords(std::size_t index) const {
  const auto nx = static_cast<std::size_t>(counts[0]);
  const auto ny = static_cast<std::size_t>(counts[1]);
  return {static_cast<int>(index % nx), static_cast<int>((index / nx) % ny),
          static_cast<int>(index / (nx * ny))};
}

template <int C>
Field<C>::Field(const Grid3& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.voxel_count() * C)
    throw ValidationError("field: value count does not match grid (" +
                          std::to_string(values_.size()) + " vs " +
                          std::to_string(grid_.voxel_count() * C) + ")");
}

template <int C>
double Field<C>::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

template <int C>
double Field<C>::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

template <int C>
bool Field<C>::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

template <int C>
void Field<C>::validate() const {
  if (values_.size() != grid_.voxel_count() * C)
    throw ValidationError("field: value count does not match grid");
  if (!all_finite()) throw ValidationError("field: non-finite value");
}

template <int C>
Field<C>& Field<C>::operator+=(const Field& other) {
  if (!(grid_ == other.grid_)) throw ValidationError("field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

template <int C>
Field<C>& Field<C>::operator-=(const Field& other) {
  if (!(grid_ == other.grid_)) throw ValidationError("field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

template <int C>
Field<C>& Field<C>::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

template <int C>
double dot(const Field<C>& a, const Field<C>& b) {
  if (!(a.grid() == b.grid())) throw ValidationError("field: grid mismatch");
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s;
}

template class Field<1>;
template class Field<3>;
template class Field<9>;
template double dot(const Field<1>&, const Field<1>&);
template double dot(const Field<3>&, const Field<3>&);
template double dot(const Field<9>&, const Field<9>&);

}  // namespace mirt
