#pragma once

#include "mirt/grid.hpp"
#include "mirt/spectral.hpp"
#include "mirt/tensor.hpp"

namespace mirt {

// Differential operators act spectrally on the periodic extension of the grid box. Callers
// keep inputs zero near the boundary (see check_support_margin) so the periodic extension
// coincides with the zero extension.

/// (du)_ij = (d_j u_i + d_i u_j) / 2.
Tensor2Field sym_derivative(const VectorField& u);

/// (d'u)_ij = d_i u_j.
Tensor2Field dprime(const VectorField& u);

/// (lambda w)_ij = delta_ij w.
Tensor2Field lambda_embed(const ScalarField& w);

/// (delta' f)_j = sum_i d_i f_ij.
VectorField delta_prime(const Tensor2Field& f);

/// mu f = f_11 + f_22 + f_33.
ScalarField mu_trace(const Tensor2Field& f);

/// Orthogonal projector onto S(xi) = { f : xi^i f_ij = 0 for all j, tr f = 0 }, the
/// complement of span{xi (x) e_1, xi (x) e_2, xi (x) e_3, Id}. Throws ValidationError for xi = 0.
Mat9 sol_projector(const Vec3& xi);

/// Trace removal M -> M - tr(M)/3 Id, the projector used at the zero frequency.
Mat9 trace_free_projector();

struct Decomposition {
  Tensor2Field solenoidal;  ///< f^s: delta' f^s = 0, mu f^s = 0
  VectorField potential;    ///< u
  ScalarField trace;        ///< w
};

struct DecomposeOptions {
  bool check_margin = true;
  int margin_voxels = 2;
  /// Largest |f| allowed in the margin, relative to max |f|.
  double margin_tolerance = 1e-3;
};

/// f = f^s + d'u + lambda w, split per frequency with sol_projector and a 4x4 Gram solve.
Decomposition decompose(const Tensor2Field& f, const DecomposeOptions& options = {});

/// Applies sol_projector at every frequency (trace removal at zero frequency).
Tensor2Field solenoidal_projection(const Tensor2Field& f);

/// Throws MarginError when max |f| inside the boundary shell of the given width exceeds
/// tolerance * max |f|.
template <int C>
void check_support_margin(const Field<C>& f, int margin_voxels, double tolerance);

}  // namespace mirt
