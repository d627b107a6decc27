#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mirt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

// 3x3 tensors are flattened row-major: component (i, j) lives at 3 * i + j.
inline constexpr int flat_index(int i, int j) { return 3 * i + j; }

inline Vec9 flatten(const Mat3& m) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[flat_index(i, j)] = m(i, j);
  return v;
}

inline Mat3 unflatten(const Vec9& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[flat_index(i, j)];
  return m;
}

/// Flattened a (x) b, i.e. entries a_i b_j.
inline Vec9 outer_flat(const Vec3& a, const Vec3& b) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[flat_index(i, j)] = a[i] * b[j];
  return v;
}

inline Vec9 identity_flat() { return flatten(Mat3::Identity()); }

}  // namespace mirt
