#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mirt/curve.hpp"
#include "mirt/geometry.hpp"
#include "mirt/phantom.hpp"
#include "mirt/reconstruct.hpp"
#include "mirt/symbol.hpp"
#include "mirt/transform.hpp"

namespace mirt {

struct GridConfig {
  int n = 16;
  double half_width = 1.2;
  Grid3 make() const { return Grid3::cube(n, half_width); }
};

struct ToleranceConfig {
  double tau_tan = 1e-6;
  double tau_indep = 1e-6;
  double root_residual = 1e-10;
  double tau_sigma = 1e-3;
  double tau_rank = 1e-8;
  double taper = 0.05;
  /// Gate for the relative adjoint defect.
  double adjoint = 1e-12;

  GeometryTolerances geometry() const;
  SymbolTolerances symbol() const;
  CutoffSpec cutoff(double pole_band) const;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";
  int threads = 0;  ///< 0 keeps the OpenMP default
  double noise = 0.0;
  int kt_samples = 2000;
  double kt_ball_radius = 1.0;
  int symbol_samples = 500;
  int ellipticity_tuples = 1000;
  int adjoint_pairs = 20;
};

/// Experiment parameters, read from an INI-style file:
///
///   [curve]      kind radius pitch height harmonic turns
///   [grid]       n half_width
///   [lines]      n_t n_alpha n_beta pole_band step_fraction
///   [tolerances] tau_tan tau_indep root_residual tau_sigma tau_rank taper adjoint
///   [phantom]    kind width center amplitude
///   [run]        seed output_dir threads noise kt_samples kt_ball_radius symbol_samples
///                ellipticity_tuples adjoint_pairs
///
/// center is three numbers and amplitude nine (row-major), separated by spaces.
struct Config {
  CurveParams curve;
  GridConfig grid;
  LineSetParams lines;
  ToleranceConfig tolerances;
  PhantomSpec phantom;
  RunConfig run;

  /// Throws ValidationError on non-positive tolerances or sizes.
  void validate() const;
};

/// Throws ValidationError on unknown sections or keys and malformed values.
Config parse_config(const std::string& text);
/// Throws ValidationError when the file cannot be read.
Config load_config(const std::filesystem::path& path);
/// Text that parse_config maps back to the same Config.
std::string format_config(const Config& config);

}  // namespace mirt
