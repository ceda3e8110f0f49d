#pragma once

#include <functional>

#include "odelab/odernn.hpp"

namespace odelab {

// The skew-weight members of the update-rule family. Realized weights are
// real skew-symmetric, the real image of purely imaginary anti-Hermitian
// matrices; their spectrum is purely imaginary, so the linearized flow
// rotates instead of expanding.
enum class ArnnIntegrator { symplectic_euler, midpoint };

struct ArnnConfig {
  OdeRnnConfig base;                // carries dim, h, activation, bias
  std::vector<Vector> skew_params;  // strictly-triangular free parameters, one list per weight
  ArnnIntegrator integrator = ArnnIntegrator::symplectic_euler;

  int dim() const { return base.state_dim; }
  double h() const { return base.h; }
  const StageFn& activation() const;
  Vector bias() const;  // empty base bias reads as zeros
  Matrix weight(size_t idx = 0) const;  // realized skew matrix
  void validate() const;                // throws BadConfig / DimMismatch
};

// One-stage base (field sigma(W u + b)) with a single skew weight.
ArnnConfig make_arnn_config(int dim, double h, const Vector& skew_params,
                            Act sigma = Act::identity, Vector bias = {},
                            ArnnIntegrator integrator = ArnnIntegrator::symplectic_euler);

// Packs dim*(dim-1)/2 free parameters into a skew matrix: pairs (i, j) with
// i < j in row-major order get W_ij = +param, W_ji = -param, zero diagonal.
Matrix make_skew(const Vector& params, int dim);

// True iff h * max|lambda(W)| < 1. The spectrum of skew W is computed through
// the Hermitian matrix iW, so the radius is exact up to the symmetric
// eigensolver's accuracy. Throws NotSkew on asymmetric input.
bool spectral_step_bound(const Matrix& w, double h);

// Phase-space pair for the one-stage integrator; z is the auxiliary half-step
// momentum strand.
struct ArnnState {
  Vector y;
  Vector z;
};

// One-stage, two-level step: the symplectic Euler update of the pair,
//   Z' = Z - h sigma(W^T Y + b)
//   Y' = Y + h sigma(W Z' + b)
// Algebraically invertible for any activation; norm-bounded under the
// spectral step bound (the exact conserved quantity of the linear case is
// the shifted quadratic |Y|^2 + |Z|^2 - h Y.(WZ), not the plain norm).
ArnnState arnn_step_1_2(const ArnnConfig& cfg, const ArnnState& s);
ArnnState arnn_inverse_1_2(const ArnnConfig& cfg, const ArnnState& s);

// Two-stage, two-level step: the implicit midpoint update
//   Y' = Y + h sigma(W (Y + Y')/2 + b).
// Identity activations solve the linear system exactly; otherwise a damped
// fixed-point iteration runs (damping 0.5, tolerance 1e-12, cap 100) and
// non-convergence throws ImplicitNoConvergence. With identity sigma and skew
// W the map is the Cayley transform, orthogonal, so |Y'| = |Y|.
Vector arnn_step_2_2(const ArnnConfig& cfg, const Vector& y);
Vector arnn_inverse_2_2(const ArnnConfig& cfg, const Vector& y);

struct ReversibilityResult {
  double max_error = 0.0;  // worst deviation along the unwind
  bool reversible = true;  // max_error <= tol
};

// Applies step_fn `steps` times, then inverse_fn `steps` times, comparing
// each unwound state against the stored forward trajectory. The maximum is
// over every unwind depth, so a transiently bad inverse cannot hide behind a
// lucky cancellation at the end.
ReversibilityResult reversibility_check(const std::function<Vector(const Vector&)>& step_fn,
                                        const std::function<Vector(const Vector&)>& inverse_fn,
                                        const Vector& state, int steps, double tol = 1e-8);
ReversibilityResult reversibility_check(
    const std::function<ArnnState(const ArnnState&)>& step_fn,
    const std::function<ArnnState(const ArnnState&)>& inverse_fn, const ArnnState& state,
    int steps, double tol = 1e-8);

}  // namespace odelab
