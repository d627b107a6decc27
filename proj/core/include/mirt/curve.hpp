#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mirt/tensor.hpp"

namespace mirt {

enum class CurveKind { kCircle, kHelix, kCrown, kTwoCircles };

std::string_view to_string(CurveKind kind);
/// Parses "circle", "helix", "crown" or "two-circles"; throws ValidationError otherwise.
CurveKind parse_curve_kind(std::string_view name);

struct CurveParams {
  CurveKind kind = CurveKind::kHelix;
  double radius = 2.0;
  /// Helix rise per turn.
  double pitch = 1.0;
  /// Crown amplitude, or distance between the two circles.
  double height = 0.5;
  /// Crown harmonic m in h cos(m t).
  int harmonic = 3;
  /// Helix turn count; the parameter runs over [-pi turns, pi turns].
  double turns = 3.0;
};

/// Parameter interval on which the curve is smooth. Closed pieces wrap around.
struct CurvePiece {
  double t0 = 0.0;
  double t1 = 0.0;
  bool closed = false;
  double length() const { return t1 - t0; }
};

struct CurvePoint {
  Vec3 position;
  Vec3 d1;  ///< gamma'(t)
  Vec3 d2;  ///< gamma''(t)
};

/// Source curve gamma with closed-form derivatives.
///
///   circle       (R cos t, R sin t, 0),                t in [0, 2 pi)
///   helix        (R cos t, R sin t, pitch t / 2 pi),    t in [-pi turns, pi turns]
///   crown        (R cos t, R sin t, h cos m t),         t in [0, 2 pi)
///   two-circles  (R cos t, R sin t, -+h/2),             t in [0, 2 pi) u [2 pi, 4 pi)
class Curve {
 public:
  explicit Curve(const CurveParams& params);

  static Curve circle(double radius);
  static Curve helix(double radius, double pitch, double turns);
  static Curve crown(double radius, double height, int harmonic);
  static Curve two_circles(double radius, double separation);

  const CurveParams& params() const { return params_; }
  CurveKind kind() const { return params_.kind; }
  const std::vector<CurvePiece>& pieces() const { return pieces_; }
  double t0() const { return pieces_.front().t0; }
  double t1() const { return pieces_.back().t1; }
  bool closed() const;

  CurvePoint eval(double t) const;
  Vec3 position(double t) const { return eval(t).position; }
  Vec3 derivative(double t) const { return eval(t).d1; }
  Vec3 second_derivative(double t) const { return eval(t).d2; }

  /// Throws ValidationError if the curve is not regular or self-intersects on a dense sample.
  void validate(int samples = 1024) const;

 private:
  CurveParams params_;
  std::vector<CurvePiece> pieces_;
};

}  // namespace mirt
