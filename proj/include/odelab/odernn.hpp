#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "odelab/activation.hpp"
#include "odelab/linalg.hpp"

namespace odelab {

// How the weighted stage combination h * sum_k alpha_{q,k} K_k enters stage q:
//   direct:          arg_q = W_q * Y_hist + b_q + h * sum_k alpha_{q,k} K_k
//   through_weights: arg_q = W_q * (Y_hist + h * sum_k alpha_{q,k} K_k) + b_q
// The two are interchangeable by re-parameterizing alpha when W_q is
// invertible. `through_weights` is the Runge-Kutta-faithful form: with it a
// config built from a classic tableau reproduces that method exactly, so the
// stored tableau both certifies and governs the realized dynamics. `direct`
// is the update rule exactly as displayed, which several architecture
// reductions use verbatim.
enum class Coupling { direct, through_weights };

// Out-of-range history lookups resolve to zero vectors, or to the first seen
// state under repeat_first.
enum class Padding { zero, repeat_first };

// Delay schedule t_k = floor(t*k/n).
int delay_schedule(int memory, int stages, int k);

// Ring buffer of the last t+1 state vectors, newest first.
class InputHistory {
 public:
  InputHistory(int memory, int dim, Padding policy = Padding::zero);
  void push(const Vector& y);
  // Y_{l-delay}: delay 0 is the newest entry. Throws OutOfRange past capacity.
  const Vector& lookback(int delay) const;
  const Vector& current() const { return lookback(0); }
  int capacity() const { return capacity_; }
  int dim() const { return dim_; }
  int pushed() const { return pushed_; }
  void reset();

 private:
  int capacity_ = 1;
  int dim_ = 0;
  Padding policy_ = Padding::zero;
  int head_ = 0;
  int pushed_ = 0;
  std::vector<Vector> slots_;
  Vector zero_;
  Vector first_;
};

// Context handed to dynamical weight callbacks. Everything an architecture
// mapping may lawfully depend on flows through here; the callbacks themselves
// stay stateless across steps.
struct StepContext {
  int step_index = 1;                              // 1-based
  const InputHistory* hist = nullptr;              // state history, newest first
  const std::vector<Vector>* prev_hiddens = nullptr;  // stage values of the previous step
  const Vector* prev_output = nullptr;             // output emitted by the previous step
};

// Per-stage coefficients produced by a dynamical weight callback. Empty gamma
// means "no carry term" (zero); empty kappa means the nonlinear part passes
// through unscaled (identity). alpha lists only nonzero blocks as (k, matrix)
// with 1-based k < q.
struct DynStage {
  Matrix gamma;
  Matrix kappa;
  Matrix W;
  Vector b;
  std::vector<std::pair<int, Matrix>> alpha;
  StageFn sigma;
};

struct DynOutput {
  Matrix gamma;
  Matrix kappa;
  Matrix W;
  Vector b;
  std::vector<std::pair<int, Matrix>> beta;  // (k, matrix), 1-based k
  StageFn sigma;
};

struct DynamicalWeights {
  // Called once per step before any stage; a place to compute shared values
  // (gates, masks) cached for the stage callbacks of this step only.
  std::function<void(const StepContext&)> begin_step;
  // Called for q = 1..n in order; k_done holds stages 1..q-1.
  std::function<DynStage(int q, const StepContext&, const std::vector<Vector>& k_done)> stage;
  std::function<DynOutput(const StepContext&, const std::vector<Vector>& k)> output;
};

// Configuration of an n-stage, memory-t update rule over state dim s and
// hidden dim p:
//   K_1 = sigma_1(arg_1)
//   K_q = gamma_q K_{q-1} + kappa_q sigma_q(arg_q)          2 <= q <= n
//   Y'  = gamma_out Y_l + kappa_out sigma_out(W_out Y_{l-t_{n-1}} + b_out
//                                             + h sum_k beta_k K_k)
// where arg_q couples the history entry Y_{l-t_{q-1}} with the stage
// combination per `coupling`. The displayed first-stage rule is the explicit
// special case; implicit configs extend it with the alpha row of stage 1,
// matching the general implicit Runge-Kutta stage form.
struct OdeRnnConfig {
  int stages = 1;      // n
  int memory = 1;      // t
  int state_dim = 1;   // s
  int hidden_dim = 1;  // p
  double h = 1.0;
  Coupling coupling = Coupling::direct;
  Padding padding = Padding::zero;

  std::vector<Matrix> W;                    // n+1; W[n] is the output map
  std::vector<Vector> b;                    // n+1
  std::vector<std::vector<Matrix>> alpha;   // n x n; empty block = zero
  std::vector<Matrix> beta;                 // n; empty = zero
  std::vector<Matrix> gamma;                // n+1; [0] unused; empty = zero
  std::vector<Matrix> kappa;                // n+1; [0] unused; empty = identity
  std::vector<StageFn> sigma;               // n+1

  std::shared_ptr<DynamicalWeights> dynamical;  // set => dynamical weight mode

  bool is_dynamical() const { return bool(dynamical); }
  bool is_explicit() const;  // alpha_{q,k} = 0 for all k >= q
  int delay(int k) const { return delay_schedule(memory, stages, k); }
  void validate() const;  // throws BadConfig / DimMismatch
};

struct StepResult {
  Vector y_next;
  std::vector<Vector> hiddens;
};

// Step engine with reusable workspace. Implicit stage systems with identity
// activations are solved exactly by a cached LU factorization (the fixed
// point of the damped iteration); nonlinear implicit systems run a damped
// fixed-point iteration (damping 0.5, tolerance 1e-12, cap 100).
class OdernnRunner {
 public:
  explicit OdernnRunner(OdeRnnConfig cfg);

  const OdeRnnConfig& config() const { return cfg_; }

  void reset();
  // Driven step: pushes `input` as the current state, returns the output.
  Vector step_driven(const Vector& input);
  // Feeds each input in turn; one output per input.
  std::vector<Vector> run(const std::vector<Vector>& inputs);
  // Trajectory mode: history seeded with y0, outputs fed back as states.
  // Returns [y0, y1, ..., y_steps].
  std::vector<Vector> free_run(const Vector& y0, int steps);

  const std::vector<Vector>& last_hiddens() const { return prev_hiddens_; }

 private:
  Vector compute_step(std::vector<Vector>& hiddens);
  void stage_arg_static(int q, const std::vector<Vector>& k, Vector& arg) const;
  Vector output_static(const std::vector<Vector>& k) const;

  OdeRnnConfig cfg_;
  std::vector<int> stage_delays_;  // t_{q-1} for q = 1..n, plus output delay
  int out_delay_ = 0;
  bool explicit_ = true;
  std::optional<LuSolver> linear_stage_solver_;  // identity-activation implicit path
  InputHistory hist_;
  std::vector<Vector> prev_hiddens_;
  std::vector<Vector> work_hiddens_;
  Vector prev_output_;
  int step_index_ = 1;
};

StepResult odernn_step(const OdeRnnConfig& cfg, const InputHistory& hist);
std::vector<Vector> odernn_run(const OdeRnnConfig& cfg, const std::vector<Vector>& inputs);
std::vector<Vector> odernn_free_run(const OdeRnnConfig& cfg, const Vector& y0, int steps);

// Builds a pure-integrator config (through_weights, identity carry on the
// output, zero hidden carries) from a Runge-Kutta tableau applied to the
// field f(u) = sigma(W u + bias).
OdeRnnConfig make_integrator_config(const Matrix& tableau_a, const Vector& tableau_e,
                                    const Matrix& w, const Vector& bias, double h,
                                    Act sigma = Act::identity);

// Exactly invertible two-half-step update:
//   Z_{l+1/2} = Z_{l-1/2} - h sigma(W^T Y_l + b)
//   Y_{l+1}   = Y_l + sigma(W Z_{l+1/2} + b)
struct LeapfrogState {
  Vector y;
  Vector z_half;
};
LeapfrogState leapfrog_step(const Matrix& w, const Vector& b, double h, Act sigma,
                            const LeapfrogState& s);
LeapfrogState leapfrog_inverse(const Matrix& w, const Vector& b, double h, Act sigma,
                               const LeapfrogState& s);

}  // namespace odelab
