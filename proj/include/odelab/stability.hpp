#pragma once

#include <cstdint>
#include <vector>

#include "odelab/linalg.hpp"
#include "odelab/odernn.hpp"
#include "odelab/rk.hpp"

namespace odelab {

// Algebraic stability tensor of a stage tableau (alpha, beta) with matrix
// weights, block formula
//   Q_{i,j} = beta_i alpha_{ij} + beta_j alpha_{ji} - beta_i beta_j^T.
// For scalar weights this is the classical algebraic stability matrix
// B A + A^T B - b b^T of the Runge-Kutta literature.
struct BurrageButcherTensor {
  int stages = 0;
  int block_dim = 0;                        // p
  std::vector<std::vector<Matrix>> blocks;  // stages x stages, each p x p
  Matrix assembled;                         // (stages*p) x (stages*p)

  // max |Q - Q^T| over the assembled matrix. Zero whenever the per-stage
  // products beta_i alpha_{ij} are symmetric (scalar weights, or commuting
  // symmetric blocks); the certificate works off the symmetric part either
  // way, since only the quadratic form of Q enters the stability condition.
  double asymmetry() const;
};

// Certificate plus (optionally) the empirical probe summary.
struct StabilityReport {
  bool certified = false;           // q_psd && all betas_psd
  bool q_psd = false;               // assembled tensor PSD within tol
  std::vector<bool> betas_psd;      // per-stage quadrature weight PSD within tol
  double min_eig_q = 0.0;           // smallest eigenvalue of the assembled tensor
  double empirical_max_growth = 0.0;  // sup over probes of ||delta_k|| / ||delta_0||
  int probes_run = 0;
};

// Builds the tensor from explicit block lists. Empty Matrix entries mean zero
// blocks; the block dimension is inferred from the first nonempty block.
// Throws DimMismatch on ragged inputs, non-square blocks, or when every block
// is empty.
BurrageButcherTensor burrage_butcher(const std::vector<std::vector<Matrix>>& alpha,
                                     const std::vector<Matrix>& beta);

// The certificate for a config's stored tableau: PSD of the assembled tensor
// and of every quadrature block, tested on symmetric parts with `tol` scaled
// by magnitude. Deterministic: repeated calls agree bitwise. Note the
// certificate speaks about the stored (alpha, beta); under through_weights
// coupling that tableau also governs the realized dynamics, under direct
// coupling the stage combination enters after W_q and the certificate is
// about the coefficients as written. Dynamical-weight configs have no stored
// tableau and throw UnsupportedSpec.
StabilityReport certify_bn_stability(const OdeRnnConfig& cfg, double tol = 1e-10);

// Twin free-run trajectories from `start` and `start + delta0`.
struct PerturbationTrace {
  std::vector<double> deviation;  // ||Y_k - Y'_k|| for k = 0..steps
  double max_ratio = 0.0;         // sup_k deviation[k] / deviation[0]; 0 if delta0 = 0
  int worst_step = 0;
  bool amplified = false;         // some step grew: deviation[k] > deviation[k-1] + step_tol
};

// Runs the config's closed-loop map twice and traces the separation. The
// closed loop is the right reading of a perturbation test here: in driven
// mode the output is a feedforward function of the last t inputs, so any
// state perturbation leaves the system after t steps no matter how unstable
// the scheme is.
PerturbationTrace perturbation_probe(const OdeRnnConfig& cfg, const Vector& start,
                                     const Vector& delta0, int steps, double step_tol = 1e-9);

struct ProbePlan {
  int steps = 1000;
  int seeds = 100;
  double delta_norm = 1e-4;  // perturbation size; starts are unit-scale Gaussians
  double step_tol = 1e-9;    // per-step non-amplification slack
  uint64_t rng_seed = 1;
};

// Certificate plus `seeds` random perturbation probes merged into one report.
// When `worst` is given it receives the trace with the largest growth ratio.
StabilityReport analyze_stability(const OdeRnnConfig& cfg, const ProbePlan& plan,
                                  PerturbationTrace* worst = nullptr, double tol = 1e-10);

// Sampled one-sided (monotonicity) test: draws `samples` Gaussian pairs x, y
// and times t, and accepts iff <f(x,t) - f(y,t), x - y> <= tol on every draw.
bool monotone_field_check(const OdeField& f, int dim, int samples, uint64_t rng_seed,
                          double tol = 1e-12);

// Random tableau whose algebraic stability tensor is PSD by construction:
//   a := D^{-1} ((M + e e^T) / 2 + S),  D = diag(e),
// with e > 0 entrywise, M symmetric PSD, S skew. Substituting into the block
// formula gives Q(a, e) = M exactly.
void random_certified_tableau(int stages, Rng& rng, Matrix& a_out, Vector& e_out);

// Field families whose stage maps are monotone:
//   linear_skew_shift: f(u) = (S - c I) u + b, S skew, c > 0, identity sigma
//   tanh_diagonal:     f(u) = tanh(-D u + b), D diagonal positive
enum class DissipativeKind { linear_skew_shift, tanh_diagonal };

// A through_weights pure-integrator config from a random certified tableau on
// a random monotone field; certified by construction and contractive in the
// closed loop.
OdeRnnConfig make_certified_config(int stages, int dim, double h, DissipativeKind kind,
                                   uint64_t seed);

}  // namespace odelab
