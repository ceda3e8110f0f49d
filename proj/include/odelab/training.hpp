// Task generators, derivative-free training, and sequence diagnostics.
//
// Tasks emit deterministic (input, target) sequences keyed by an RNG seed:
// delayed copy replays the input stream after a fixed lag, the damped
// oscillator and sine tasks ask for one-step-ahead prediction of a closed
// form signal. Training is deliberately derivative-free: gradients come from
// central finite differences of a scalar loss and feed norm-clipped SGD, so
// any model that exposes a parameter vector and a run function can be
// trained without an autodiff pass through its update rule. The correlation
// length estimator is the matching diagnostic: it sizes the lag structure of
// a series so model memory can be checked against task horizon.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "odelab/linalg.hpp"
#include "odelab/stability.hpp"

namespace odelab {

enum class TaskKind { delayed_copy, damped_oscillator, sine_prediction };

// Description of a supervised sequence task. `length` steps are generated;
// the prefix [0, split) is the training window and [split, length) is held
// out. Inputs and targets are dim-wide vectors carrying the scalar signal in
// coordinate 0, so models of any state width can consume them. Alphabet
// symbols s in {0, .., alphabet-1} are encoded as centered scalars
// 2s/(alphabet-1) - 1.
struct Task {
  TaskKind kind = TaskKind::delayed_copy;
  int length = 256;
  int split = 192;
  std::uint64_t rng_seed = 1;
  int dim = 1;

  // delayed_copy
  int lag = 4;
  int alphabet = 2;

  // damped_oscillator: y'' + 2 zeta omega y' + omega^2 y = 0, sampled at dt
  double omega = 1.0;
  double zeta = 0.15;
  double dt = 0.1;

  // sine_prediction
  double period = 16.0;

  void validate() const;  // throws BadConfig
};

// Generated sequence pair. Targets are aligned with inputs; the first
// `warmup` steps carry undefined targets (stored as zeros) and are excluded
// from every loss window.
struct Dataset {
  std::vector<Vector> inputs;
  std::vector<Vector> targets;
  int warmup = 0;
  int split = 0;
};

Dataset make_task_data(const Task& task);

// Mean squared error of outputs against the dataset targets over steps
// [lo, hi), lo clamped up to the warmup boundary. Throws DimMismatch when
// output count or width disagrees with the dataset.
double window_mse(const std::vector<Vector>& outputs, const Dataset& data, int lo, int hi);

// Loss of the constant predictor fitted on the training window (its mean
// target) and scored over [lo, hi). The reference any trained model is
// measured against.
double constant_baseline(const Dataset& data, int lo, int hi);

// Model facade for the trainer: a parameter vector plus a run function that
// maps (params, inputs) to one output per input. Builders below wrap each
// sequence architecture; `init` is a seeded starting point.
struct TrainableModel {
  int param_count = 0;
  Vector init;
  std::function<std::vector<Vector>(const Vector&, const std::vector<Vector>&)> run;
};

// n-stage update rule of the given memory over square dim-wide states; stage
// weights and biases train, stage mixers stay fixed (tanh stages, identity
// readout, uniform stage blend).
TrainableModel make_trainable_odernn(int stages, int memory, int dim, std::uint64_t seed);

// Wraps a certified dissipative integrator config: the tableau that carries
// the stability certificate is frozen, the field weights and biases train.
TrainableModel make_trainable_certified(int stages, int dim, double h, DissipativeKind kind,
                                        std::uint64_t seed);

TrainableModel make_trainable_lstm(int layers, int dim, std::uint64_t seed);
TrainableModel make_trainable_gru(int layers, int dim, std::uint64_t seed);
TrainableModel make_trainable_urnn(int layers, int dim, std::uint64_t seed);
TrainableModel make_trainable_cwrnn(int clocks, int block_size, int data_dim, std::uint64_t seed);

// Clocked unitary network over `depth` weight rungs: the two coupling
// schedules train through a logistic squash (keeping them inside (0, 1))
// together with the per-rung residual scales, 2 + depth parameters total.
TrainableModel make_trainable_qunn(int clock_dim, int depth, int data_dim, std::uint64_t seed);

// Central-difference gradient (L(p + d e_i) - L(p - d e_i)) / (2 d) of a
// scalar loss. Throws NonFinite when any probe evaluation returns NaN or
// Inf, and BadConfig for a non-positive delta.
Vector fd_gradient(const std::function<double(const Vector&)>& loss_fn, const Vector& params,
                   double delta);

// One training run: loss function, starting parameters, and the clipped-SGD
// schedule. Gradients are finite differences with step fd_delta.
struct TrainRun {
  std::function<double(const Vector&)> loss_fn;
  Vector init;
  int steps = 100;
  double learn_rate = 1e-2;
  double clip_norm = 1.0;
  double fd_delta = 1e-5;
};

// Per-step metrics of a run. loss[k] is the loss before update k and
// grad_norm[k] the unclipped gradient norm. The NaN flag is set the moment
// any non-finite loss value appears (directly or inside a gradient probe);
// the run halts at that step and `halted_at` records it, -1 otherwise.
struct TrainTrace {
  std::vector<double> loss;
  std::vector<double> grad_norm;
  bool nan_flag = false;
  int halted_at = -1;
  Vector params;
};

TrainTrace train(const TrainRun& run);

// Training-window loss of a model on a dataset, as a closure over the
// parameter vector, ready to hand to train().
std::function<double(const Vector&)> task_loss(const TrainableModel& model, const Dataset& data);

// Lag diagnostic of a (possibly vector-valued) series: the smallest lag at
// which the pooled normalized autocorrelation drops below 1/e. A periodic
// series recovers above 1/e after that crossing; the estimator then reports
// the lag of the recovered maximum, so a period-8 signal scores ~8 rather
// than its first zero crossing. The result is clamped to [1, length/2].
// A constant series has no autocorrelation; it is flagged and scores 1.
struct CorrelationEstimate {
  int length = 1;
  bool constant_series = false;
};

CorrelationEstimate estimate_correlation_length(const std::vector<Vector>& series);
CorrelationEstimate estimate_correlation_length(const std::vector<double>& series);

// Exact expected delayed-copy loss of a window predictor, averaged over
// every alphabet^window_len input window (and over the target symbol when
// the lag reaches past the window). `predict` consumes the window oldest
// first and returns the model output after its last step. Sampling noise is
// removed entirely: a predictor that cannot see the lagged symbol satisfies
// expected loss >= symbol variance with no luck involved. Throws TooLarge
// when the enumeration would exceed 2^20 windows.
double delayed_copy_expected_loss(const std::function<Vector(const std::vector<Vector>&)>& predict,
                                  int window_len, int lag, int alphabet, int dim = 1);

// Expected loss of the best constant predictor on the delayed-copy symbol
// distribution: the variance of the centered symbol encoding.
double delayed_copy_variance(int alphabet);

}  // namespace odelab
