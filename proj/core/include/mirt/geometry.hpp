#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mirt/curve.hpp"
#include "mirt/tensor.hpp"

namespace mirt {

/// Directions with polar angle below this (or above pi minus this) have no usable frame.
inline constexpr double kDefaultPoleBand = 0.1;

struct GeometryTolerances {
  double tau_tan = 1e-6;        ///< |gamma'.xi0| / |gamma'| below this is a tangency
  double tau_indep = 1e-6;      ///< |omega_i x omega_j| below this means parallel chords
  double root_residual = 1e-10; ///< |g(t_q)| bound for accepted roots
  int samples_per_period = 1024;///< plane sweep samples per 2 pi of curve parameter
};

/// Orthonormal frame {xi, xi_alpha, xi_beta} of a direction in spherical coordinates.
struct SphericalFrame {
  double alpha = 0.0;
  double beta = 0.0;
  Vec3 xi;
  Vec3 xi_alpha;
  Vec3 xi_beta;
};

/// Closed-form frame at (alpha, beta); no admissibility checks.
SphericalFrame frame_at(double alpha, double beta);

/// Frame of a unit vector. Throws ValidationError if |xi| != 1 (1e-12) and PoleError when the
/// polar angle is outside [pole_band, pi - pole_band].
SphericalFrame frame_of(const Vec3& xi, double pole_band = kDefaultPoleBand);

/// One root t_q of g(t) = <gamma(t) - x, xi0>.
struct Intersection {
  double t = 0.0;
  bool transversal = true;
  double s1 = 0.0;  ///< gamma'(t_q) . xi0
  double s2 = 0.0;  ///< gamma''(t_q) . xi0
  Vec3 omega;       ///< (x - gamma(t_q)) / r
  double r = 0.0;   ///< |x - gamma(t_q)|
};

struct IntersectionSet {
  std::vector<Intersection> points;
  /// The plane contains a whole arc of the curve.
  bool degenerate = false;
};

/// Precomputed sweep of the family of planes with a fixed unit normal xi0. Roots for a given
/// point x are found by bracketing c = x . xi0 inside monotone runs of gamma(t) . xi0 and
/// refining with safeguarded Newton steps, so one sweep serves many points.
class PlaneSweep {
 public:
  PlaneSweep(const Curve& curve, const Vec3& xi, const GeometryTolerances& tol = {});

  IntersectionSet intersect(const Vec3& x) const;
  const Vec3& normal() const { return normal_; }

 private:
  struct Run {
    double t_lo, t_hi;
    double g_lo, g_hi;
    std::size_t sample_begin, sample_end;  ///< samples [begin, end), endpoints included
  };
  struct Breakpoint {
    double t;
    double g;
  };
  struct PieceSweep {
    double t0 = 0.0;
    double t1 = 0.0;
    bool closed = false;
    bool flat = false;
    double flat_value = 0.0;
    std::vector<double> t;
    std::vector<double> g;
    std::vector<Run> runs;
    std::vector<Breakpoint> breakpoints;  ///< extrema and open ends, each once
  };

  double refine(const PieceSweep& piece, double lo, double hi, double c) const;
  Intersection make_point(double t, const Vec3& x) const;

  const Curve* curve_;
  Vec3 normal_;
  GeometryTolerances tol_;
  std::vector<PieceSweep> pieces_;
};

/// All roots of <gamma(t) - x, xi0> on the curve's parameter domain.
/// Throws ValidationError for xi = 0 and DegeneratePlane when the plane contains an arc.
IntersectionSet plane_intersections(const Curve& curve, const Vec3& x, const Vec3& xi,
                                    const GeometryTolerances& tol = {});

enum class CovectorClass { kXiPrime, kXiDoublePrime, kOnSigmaBad, kNotInXi, kDegenerate };

std::string to_string(CovectorClass c);

/// True when three of the chord directions are pairwise non-parallel.
bool has_independent_triple(const std::vector<Intersection>& points, double tau_indep);

CovectorClass classify(const IntersectionSet& set, const GeometryTolerances& tol = {});

/// Xi' / Xi'' / Sigma / outside-Xi classification of the covector (x, xi).
CovectorClass classify_covector(const Curve& curve, const Vec3& x, const Vec3& xi,
                                const GeometryTolerances& tol = {});

struct KTCheckOptions {
  Vec3 ball_center = Vec3::Zero();
  double ball_radius = 1.0;
  int n_samples = 2000;
  std::uint64_t seed = 1;
  double pole_band = kDefaultPoleBand;
  int coverage_points = 8;
  int coverage_directions = 64;
  GeometryTolerances tolerances;
};

struct KTCoverage {
  Vec3 x;
  double xi_prime_fraction = 0.0;
};

struct KTReport {
  int n_samples = 0;
  int n_degenerate = 0;
  /// Fractions are over non-degenerate draws.
  double xi_prime = 0.0;
  double xi_double_prime = 0.0;
  double on_sigma_bad = 0.0;
  double not_in_xi = 0.0;
  int max_intersections = 0;
  std::vector<KTCoverage> coverage;
};

/// Sampled Kirillov-Tuy statistics over random (x in ball, xi in the pole band).
KTReport kt_check(const Curve& curve, const KTCheckOptions& options);

/// Human-readable table.
std::string format_kt_table(const KTReport& report);
/// "key = value" lines with stable key names.
std::string format_kt_keyvalue(const KTReport& report);

/// Point of the conormal bundle N*Z in the (t, alpha, beta, s, z1, z2) parametrization.
struct ConormalPoint {
  Vec3 gamma_covector;  ///< (Gamma_1, Gamma_2, Gamma_3), dual to (t, alpha, beta)
  Vec3 x;
  Vec3 xi;
};

ConormalPoint conormal_coords(const Curve& curve, double t, double alpha, double beta, double s,
                              double z1, double z2, double pole_band = kDefaultPoleBand);

/// gamma'(t) . xi0, signed; its zero set is Sigma.
double sigma_distance(const Curve& curve, double t, const Vec3& xi);

}  // namespace mirt
