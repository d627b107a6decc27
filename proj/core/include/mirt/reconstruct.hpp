#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirt/curve.hpp"
#include "mirt/geometry.hpp"
#include "mirt/grid.hpp"
#include "mirt/spectral.hpp"
#include "mirt/symbol.hpp"
#include "mirt/transform.hpp"

namespace mirt {

struct CutoffSpec {
  double tau_sigma = 1e-3;
  /// Width of the pole and curve-end tapers in radians.
  double taper = 0.05;
  double pole_band = kDefaultPoleBand;
  int min_intersections = 3;
  double tau_rank = 1e-8;
  /// Covectors with sigma_5 / sigma_1 of A_0 below this are cut off; the taper runs up to
  /// twice this value.
  double min_condition = 1e-2;
  GeometryTolerances geometry;
};

/// C^1 step: 0 for u <= 0, 1 for u >= 1.
double smoothstep(double u);

/// Geometric part of the cutoff, from an already computed intersection set.
double cutoff_from_set(const Curve& curve, const CutoffSpec& spec, const IntersectionSet& set);

/// Smooth cutoff in [0, 1]: zero outside Xi', one for Xi' covectors whose intersections all
/// have |gamma' . xi0| >= 2 tau_sigma, chord directions at least `taper` outside the pole
/// band, parameters at least 2 pi taper from the ends of an open curve and
/// sigma_5 / sigma_1 >= 2 min_condition.
double cutoff_chi(const Curve& curve, const CutoffSpec& spec, const Vec3& x, const Vec3& xi);

struct ParametrixOptions {
  /// Evaluate the symbol and cutoff at this point for every voxel.
  std::optional<Vec3> frozen_point;
};

/// f_rec(x) = Re sum_xi e^{i x.xi} chi(x, xi) |xi| B_0(x, xi0) nf^(xi) / N over the stored
/// frequencies (Nyquist planes skipped, conjugate pairs folded).
Tensor2Field apply_parametrix(const Tensor2Field& nf, const Curve& curve, const CutoffSpec& spec,
                              const ParametrixOptions& options = {});

/// Same as apply_parametrix with the spectrum supplied directly.
Tensor2Field apply_parametrix_spectrum(const SpectralTensorField& nf_hat, const Curve& curve,
                                       const CutoffSpec& spec,
                                       const ParametrixOptions& options = {});

struct VoxelEvaluation {
  Vec9 real_part;
  Vec9 imag_part;
};

/// Sum over the full (unfolded) spectrum at one voxel, keeping the imaginary part; used to
/// check that the folded real evaluation loses nothing.
VoxelEvaluation evaluate_parametrix_voxel(const SpectralTensorField& nf_hat, const Curve& curve,
                                          const CutoffSpec& spec, std::size_t voxel);

using Mask = std::vector<std::uint8_t>;

/// Voxels where the pointwise energy |f(x)|^2 exceeds fraction * max.
Mask default_mask(const Tensor2Field& f_ref, double fraction = 0.01);

/// Least-squares c minimizing |c f_rec - f_ref| over the mask.
double calibrate(const Tensor2Field& f_rec, const Tensor2Field& f_ref, const Mask& mask);

struct ReconReport {
  double relative_l2 = 0.0;   ///< |c f_rec - f_ref| / |f_ref| on the mask
  double correlation = 0.0;   ///< Pearson coefficient over masked components
  double calibration = 0.0;   ///< c
  std::array<double, 9> component_errors{};
  std::size_t mask_voxels = 0;
  double seconds = 0.0;
};

/// Throws ValidationError for an empty mask or mismatched grids.
ReconReport error_report(const Tensor2Field& f_rec, const Tensor2Field& f_ref, const Mask& mask);

/// "key = value" lines; the runtime line is optional so report files stay reproducible.
std::string format_recon_report(const ReconReport& report, bool include_runtime = true);

struct ReconstructionResult {
  Tensor2Field nf;
  Tensor2Field f_rec;
  Tensor2Field f_solenoidal;
  ReconReport report;
};

/// Normal operator, parametrix and comparison with the solenoidal projection of f.
ReconstructionResult reconstruct(const Tensor2Field& f, const LineSet& lines,
                                 const CutoffSpec& spec);

}  // namespace mirt
