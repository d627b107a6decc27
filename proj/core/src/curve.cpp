#include "mirt/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mirt/error.hpp"

namespace mirt {
namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kCircle: return "circle";
    case CurveKind::kHelix: return "helix";
    case CurveKind::kCrown: return "crown";
    case CurveKind::kTwoCircles: return "two-circles";
  }
  return "unknown";
}

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "circle") return CurveKind::kCircle;
  if (name == "helix") return CurveKind::kHelix;
  if (name == "crown") return CurveKind::kCrown;
  if (name == "two-circles") return CurveKind::kTwoCircles;
  throw ValidationError("unknown curve kind '" + std::string(name) + "'");
}

Curve::Curve(const CurveParams& params) : params_(params) {
  if (!(params_.radius > 0.0) || !std::isfinite(params_.radius))
    throw ValidationError("curve: radius must be positive");
  switch (params_.kind) {
    case CurveKind::kCircle:
    case CurveKind::kCrown:
      if (params_.kind == CurveKind::kCrown && params_.harmonic < 1)
        throw ValidationError("curve: crown harmonic must be >= 1");
      pieces_ = {{0.0, kTwoPi, true}};
      break;
    case CurveKind::kHelix: {
      if (!(params_.turns > 0.0)) throw ValidationError("curve: helix turns must be positive");
      if (!std::isfinite(params_.pitch) || params_.pitch == 0.0)
        throw ValidationError("curve: helix pitch must be nonzero");
      const double half = std::numbers::pi * params_.turns;
      pieces_ = {{-half, half, false}};
      break;
    }
    case CurveKind::kTwoCircles:
      if (!(params_.height > 0.0))
        throw ValidationError("curve: two-circles separation must be positive");
      pieces_ = {{0.0, kTwoPi, true}, {kTwoPi, 2.0 * kTwoPi, true}};
      break;
  }
}

Curve Curve::circle(double radius) {
  CurveParams p;
  p.kind = CurveKind::kCircle;
  p.radius = radius;
  return Curve(p);
}

Curve Curve::helix(double radius, double pitch, double turns) {
  CurveParams p;
  p.kind = CurveKind::kHelix;
  p.radius = radius;
  p.pitch = pitch;
  p.turns = turns;
  return Curve(p);
}

Curve Curve::crown(double radius, double height, int harmonic) {
  CurveParams p;
  p.kind = CurveKind::kCrown;
  p.radius = radius;
  p.height = height;
  p.harmonic = harmonic;
  return Curve(p);
}

Curve Curve::two_circles(double radius, double separation) {
  CurveParams p;
  p.kind = CurveKind::kTwoCircles;
  p.radius = radius;
  p.height = separation;
  return Curve(p);
}

bool Curve::closed() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const CurvePiece& p) { return p.closed; });
}

CurvePoint Curve::eval(double t) const {
  const double r = params_.radius;
  const double c = std::cos(t);
  const double s = std::sin(t);
  CurvePoint p;
  p.position = {r * c, r * s, 0.0};
  p.d1 = {-r * s, r * c, 0.0};
  p.d2 = {-r * c, -r * s, 0.0};
  switch (params_.kind) {
    case CurveKind::kCircle:
      break;
    case CurveKind::kHelix: {
      const double rise = params_.pitch / kTwoPi;
      p.position.z() = rise * t;
      p.d1.z() = rise;
      break;
    }
    case CurveKind::kCrown: {
      const double m = params_.harmonic;
      const double h = params_.height;
      p.position.z() = h * std::cos(m * t);
      p.d1.z() = -h * m * std::sin(m * t);
      p.d2.z() = -h * m * m * std::cos(m * t);
      break;
    }
    case CurveKind::kTwoCircles:
      p.position.z() = t < kTwoPi ? -0.5 * params_.height : 0.5 * params_.height;
      break;
  }
  return p;
}

void Curve::validate(int samples) const {
  struct Sample {
    Vec3 x;
    std::size_t piece;
    int index;
  };
  std::vector<Sample> pts;
  double min_speed = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
  for (std::size_t pi = 0; pi < pieces_.size(); ++pi) {
    const auto& piece = pieces_[pi];
    const int n = std::max(16, static_cast<int>(samples * piece.length() / kTwoPi));
    const double dt = piece.length() / n;
    const int count = piece.closed ? n : n + 1;
    for (int i = 0; i < count; ++i) {
      const auto e = eval(piece.t0 + i * dt);
      min_speed = std::min(min_speed, e.d1.norm());
      max_step = std::max(max_step, e.d1.norm() * dt);
      pts.push_back({e.position, pi, i});
    }
  }
  if (!(min_speed > 0.0)) throw ValidationError("curve: not regular (gamma' vanishes)");

  // Off-diagonal pairs must stay apart; neighbours within a few samples are skipped.
  const double min_gap = 0.25 * max_step;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (pts[a].piece == pts[b].piece) {
        const auto& piece = pieces_[pts[a].piece];
        int gap = std::abs(pts[a].index - pts[b].index);
        if (piece.closed) {
          const int n = std::max(16, static_cast<int>(samples * piece.length() / kTwoPi));
          gap = std::min(gap, n - gap);
        }
        if (gap <= 4) continue;
      }
      if ((pts[a].x - pts[b].x).norm() < min_gap)
        throw ValidationError("curve: self-intersection detected");
    }
  }
}

}  // namespace mirt
