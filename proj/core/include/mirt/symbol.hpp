#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mirt/curve.hpp"
#include "mirt/geometry.hpp"
#include "mirt/tensor.hpp"

namespace mirt {

struct SymbolTolerances {
  /// Intersections with |gamma'(t_q) . xi0| at or below this are too close to Sigma.
  double tau_sigma = 1e-3;
  /// Relative singular value threshold for rank decisions and the pseudo-inverse.
  double tau_rank = 1e-8;
  GeometryTolerances geometry;
};

/// One intersection's contribution to A_0 in the adapted frame
/// (omega_q)_beta = xi0, (omega_q)_alpha = xi0 x omega_q.
struct SymbolRecord {
  double t = 0.0;
  double s1 = 0.0;
  double r = 0.0;
  Vec3 omega;
  Vec3 omega_alpha;
  Vec3 omega_beta;
  double weight = 0.0;  ///< 2 pi / (|xi| |s1| r)
  Vec9 va;              ///< flatten(omega (x) omega_alpha)
  Vec9 vb;              ///< flatten(omega (x) omega_beta)
};

struct SymbolMatrix {
  Vec3 x;
  Vec3 xi;
  std::vector<SymbolRecord> records;  ///< sorted by t
  Mat9 a0 = Mat9::Zero();
};

/// A_0 = sum_q w_q (va va^T + vb vb^T) over the transversal points given, with no
/// classification or Sigma checks. Throws ValidationError for xi = 0.
SymbolMatrix assemble_symbol(const Vec3& x, const Vec3& xi,
                             const std::vector<Intersection>& points);

/// Principal symbol at an Xi' covector. Throws SigmaProximity when some intersection has
/// |gamma' . xi0| <= tau_sigma, DegeneratePlane for planes containing an arc, and NotElliptic
/// when the covector is not in Xi'.
SymbolMatrix principal_symbol(const Curve& curve, const Vec3& x, const Vec3& xi,
                              const SymbolTolerances& tol = {});

/// sum_q w_q (omega omega^T) (x) (Id - omega omega^T) under the row-major flattening.
Mat9 kronecker_symbol(const SymbolMatrix& symbol);

/// Singular values of a symmetric matrix, descending.
Vec9 symmetric_singular_values(const Mat9& m);

/// Number of singular values above tau_rank * sigma_max.
int numerical_rank(const Mat9& m, double tau_rank);

struct Basis5 {
  Eigen::Matrix<double, 9, 5> columns;
  /// Smallest singular value of the 9 x 5 column stack.
  double certificate = 0.0;
};

/// {omega_q (x) (omega_q)_alpha, q = 1..3} and {omega_q (x) (omega_q)_beta, q = 1, 2} from the
/// first three records in parameter order. Throws RankDeficient when fewer than three records
/// exist or the certificate is at or below tau_rank.
Basis5 basis5(const SymbolMatrix& symbol, double tau_rank = 1e-8);

/// Eigen-decomposition pseudo-inverse of a symmetric PSD matrix keeping eigenvalues above
/// tau_rank * lambda_max.
Mat9 symmetric_pinv(const Mat9& m, double tau_rank);

/// B_0 = Pi_sol(xi) pinv(A_0). Throws RankDeficient unless rank(A_0) == 5.
Mat9 parametrix_symbol(const SymbolMatrix& symbol, double tau_rank = 1e-8);

struct SymbolSample {
  Vec3 x;
  Vec3 xi;
  int intersections = 0;
  int rank = 0;
  Vec9 singular_values;        ///< of A_0, descending
  double certificate = 0.0;    ///< basis5 certificate
  double parametrix_defect = 0.0;  ///< |B_0 A_0 - Pi_sol|_F
  double kronecker_defect = 0.0;   ///< |A_0 - Kronecker form|_F / |A_0|_F
  double range_defect = 0.0;       ///< |(Id - Pi_sol) A_0|_F / |A_0|_F
};

struct SymbolSampling {
  std::vector<SymbolSample> samples;
  int draws = 0;
  /// Draws skipped because the covector was not in Xi' or too close to Sigma.
  int skipped = 0;
};

struct SymbolSamplingOptions {
  int points = 500;
  std::uint64_t seed = 1;
  Vec3 ball_center = Vec3::Zero();
  double ball_radius = 1.0;
  int max_draws = 100000;
  SymbolTolerances tolerances;
};

/// Draws x uniformly in the ball and xi with a uniform direction and |xi| in [0.5, 2] until
/// `points` covectors admit a principal symbol, and records the checks on each.
SymbolSampling sample_symbols(const Curve& curve, const SymbolSamplingOptions& options);

struct EllipticityReport {
  double alpha[3] = {0.0, 0.0, 0.0};
  double beta1 = 0.0;
  /// Stacked frame equations, trace row and xi-contraction rows, 12 x 9.
  Eigen::Matrix<double, 12, 9> system;
  /// Smallest singular value after scaling every row to unit norm.
  double min_singular = 0.0;
  double det_a = 0.0;           ///< determinant of the 2 x 2 system of the third set
  double det_a_expected = 0.0;  ///< sin(alpha1 - alpha2)
  double det_b = 0.0;           ///< determinant of the beta rotation block
  bool trivial_nullspace = false;
};

/// Builds and checks the linear system forcing f = 0 for chord directions in the plane with
/// azimuth beta1 at polar angles alpha1..3. Throws AdmissibilityError when two angles differ
/// by a multiple of pi (|sin(alpha_i - alpha_j)| <= min_separation).
EllipticityReport ellipticity_check(double alpha1, double alpha2, double alpha3, double beta1,
                                    double min_separation = 1e-6,
                                    double singular_threshold = 1e-8);

struct EllipticitySweep {
  int tuples = 0;
  int trivial = 0;
  double worst_min_singular = 0.0;
  double max_det_a_error = 0.0;
  double max_det_b_error = 0.0;
};

/// Seeded random admissible tuples; angles are redrawn until pairwise
/// |sin(alpha_i - alpha_j)| > draw_separation.
EllipticitySweep ellipticity_sweep(int tuples, std::uint64_t seed,
                                   double draw_separation = 0.05);

}  // namespace mirt
