#pragma once
// Clock-embedded recurrent network with data-driven antisymmetric weights.
//
// The model works on blocks of length N, the temporal correlation length of
// the data. Each input Y_l of dim s is lifted to dim s*N by placing it at
// clock block l, passed through L hidden layers whose weight matrices are
// accumulated on the fly from the inputs stored in the active block, and
// read out at the clock block of the next position. After position N the
// position wraps to 1 and the block history clears: lookbacks never cross a
// block boundary.
//
// Layout convention: hidden vectors are clock-major, entry (j-1)*s + i holds
// data coordinate i at clock position j (positions are 1-based). A tensor
// product of a data-space matrix A with a clock-space matrix B is therefore
// realized as kron(B, A).
//
// The weight rungs are convex combinations of antisymmetric brackets, so
// they stay antisymmetric whenever the base matrix is; the trainable scalars
// are the two coefficient schedules and optional per-layer residual scales,
// which keeps the parameter count linear in depth while the weights
// themselves are built from data.

#include <vector>

#include "odelab/activation.hpp"
#include "odelab/errors.hpp"
#include "odelab/linalg.hpp"

namespace odelab {

// Scalar coefficient in [0,1] scheduled over block positions: either one
// shared trainable value or one value per position, looked up 1-based.
struct CoeffSchedule {
  std::vector<double> values;

  CoeffSchedule() : values{0.0} {}
  CoeffSchedule(double shared) : values{shared} {}  // NOLINT: implicit by design
  explicit CoeffSchedule(std::vector<double> per_position) : values(std::move(per_position)) {}

  double at(int l) const;  // shared value when a single entry is stored
  long long param_count() const { return static_cast<long long>(values.size()); }
};

// Residual mixers in front of the carried hidden value. Identity costs no
// parameters; one trainable scale per layer keeps the total count linear in
// depth; explicit matrices are accepted as fixed (untrained) mixers.
struct ResidualSpec {
  enum class Kind { identity, scales, matrices };
  Kind kind = Kind::identity;
  std::vector<double> scale;  // scales mode, one per layer
  std::vector<Matrix> mat;    // matrices mode, one per layer

  static ResidualSpec identity_mix() { return {}; }
  static ResidualSpec scale_mix(std::vector<double> s);
  static ResidualSpec matrix_mix(std::vector<Matrix> m);

  long long param_count() const;
};

struct QunnConfig {
  int clock_dim = 0;  // N: block length = temporal correlation length
  int depth = 0;      // L: hidden layers
  int data_dim = 0;   // s: raw data width
  CoeffSchedule p1;   // clock-swap strength per position
  CoeffSchedule p2;   // memory accumulation strength per position
  ResidualSpec residual;
  Act sigma_in = Act::tanh_fn;
  Act sigma_hidden = Act::tanh_fn;
  Act sigma_out = Act::tanh_fn;
  Matrix weight_base;  // first rung seed; empty reads as the zero matrix

  int hidden_dim() const { return clock_dim * data_dim; }
  void validate() const;  // throws BadConfig / DimMismatch
};

// Mutable per-block scratch owned by one forward pass: the position inside
// the active block, the inputs seen so far (the lookback source), and the
// weight accumulator holding the current rung.
struct QunnState {
  int clock_dim = 0;
  int data_dim = 0;
  int pos = 1;                 // 1-based position inside the block
  std::vector<Vector> inputs;  // block inputs, inputs[l-1] is position l
  Matrix weight;               // current weight rung
};

// Fresh state at block position 1 with the weight seeded from the config.
QunnState qunn_start(const QunnConfig& cfg);

// One-hot clock marker e_l in R^n. Throws OutOfRange unless 1 <= l <= n.
Vector clock_state(int l, int n);

// Lifts y (dim s) to dim s*n by writing it at clock block l, then applies
// the activation pointwise. Blocks other than l are zero before activation.
Vector qunn_embed(const Vector& y, int l, int n, Act sigma);

// Advances the weight recursion one rung in place:
//   weight <- (1 - p2) * weight + p2 * bracket,
// where the bracket couples clock blocks (l-k, l) through outer products of
// the stored inputs and its own transpose negated, and vanishes when the
// lookback l-k falls before the block start. Returns the updated matrix.
const Matrix& qunn_weight_update(QunnState& state, int l, int k, double p2);

// The clock-swap operator: (1 - p1) * I plus an antisymmetric swap between
// clock blocks l-k and l acting as identity on the data space. p1 = 0 gives
// the identity; out-of-block lookbacks drop the swap term.
Matrix qunn_clock_swap(int l, int k, int n, int s, double p1);

// One hidden layer: residual carry of k_prev plus the activated image of
// k_prev under the clock-swapped current weight rung.
Vector qunn_hidden_step(const QunnState& state, const Vector& k_prev, int l, int k,
                        const QunnConfig& cfg);

// Reads out the clock block of the next position (l+1, wrapping to 1 at the
// block end) and applies the output activation.
Vector qunn_project(const Vector& k_top, int l, int n, Act sigma);

// Full pipeline over an input sequence: per position, embed, rebuild the
// weight ladder rung by rung through the hidden layers, project. Sequences
// longer than one block are processed block by block with cleared history.
std::vector<Vector> qunn_forward(const QunnConfig& cfg, const std::vector<Vector>& inputs);

// Trainable scalar count: schedule values plus residual scales. The
// data-driven weight rungs and fixed matrices are not parameters.
long long qunn_param_count(const QunnConfig& cfg);

}  // namespace odelab
