#pragma once

#include <array>
#include <string>
#include <vector>

#include "odelab/odernn.hpp"

namespace odelab {

// Reference implementations of four recurrent architectures (stacked LSTM,
// stacked GRU, unitary-weight RNN, clockwork RNN) plus the constructions
// that realize each one as a dynamical-weight update-rule config. The native
// step functions are the ground truth; map_to_odernn emits a config whose
// driven run reproduces the native run on any input sequence, which makes
// the architectural correspondences executable instead of rhetorical.

// ---------------------------------------------------------------------------
// LSTM

// Stacked LSTM over width-n layers. Each layer owns one 4n x 2n matrix acting
// on the concatenation (value from the layer below at this step; own value
// from the previous step). Rows are stacked gate blocks in the order
// input, forget, output, candidate; there is no bias term. Layer 0's "layer
// below" is the driven input vector.
struct LstmSpec {
  int layers = 1;
  int dim = 1;                          // layer width n
  std::vector<Matrix> w;                // one 4n x 2n matrix per layer
  std::array<Act, 4> gates{Act::sigmoid, Act::sigmoid, Act::sigmoid, Act::tanh_fn};
  std::vector<Vector> cells;            // current cell state per layer; empty reads as zeros

  void validate() const;  // throws BadConfig / DimMismatch
};

// Gate vectors of one layer for one step; every sigmoid-activated entry lies
// strictly inside (0, 1).
struct LstmGates {
  Vector i;
  Vector f;
  Vector o;
  Vector g;
};
LstmGates lstm_gates(const LstmSpec& spec, int layer, const Vector& k_prev_time,
                     const Vector& k_prev_layer);

struct LstmStep {
  Vector k;  // new layer value o . tanh(c)
  Vector c;  // new cell state f . c_prev + i . g
};
// One layer update. k_prev_time is this layer's value from the previous step,
// k_prev_layer the value from the layer below at this step (the input vector
// for layer 0). The previous cell state is read from spec.cells[layer].
LstmStep lstm_step(const LstmSpec& spec, int layer, const Vector& k_prev_time,
                   const Vector& k_prev_layer);

// Feeds each input through the full stack once; returns the top-layer value
// per step. Starts from spec.cells (zeros when empty) and zero layer values.
std::vector<Vector> lstm_run(const LstmSpec& spec, const std::vector<Vector>& inputs);

// Trainable scalars: 4n x 2n per layer = 8 n^2 L.
long long lstm_param_count(const LstmSpec& spec);

// ---------------------------------------------------------------------------
// GRU

// Stacked GRU over width-n layers. w[l] (2n x 2n, gate rows reset then
// update) acts on the same concatenation as the LSTM; w_x[l] and w_g[l]
// (n x n) form the candidate tanh(w_x . below + w_g . (r . own_prev)).
struct GruSpec {
  int layers = 1;
  int dim = 1;
  std::vector<Matrix> w;    // one 2n x 2n gate matrix per layer
  std::vector<Matrix> w_x;  // candidate map on the layer below
  std::vector<Matrix> w_g;  // candidate map on the reset-modulated own value
  Act gate = Act::sigmoid;

  void validate() const;
};

struct GruGates {
  Vector r;
  Vector z;
};
GruGates gru_gates(const GruSpec& spec, int layer, const Vector& k_prev_time,
                   const Vector& k_prev_layer);

// One layer update: K = (1 - z) . K_prev_time + z . tanh(candidate).
Vector gru_step(const GruSpec& spec, int layer, const Vector& k_prev_time,
                const Vector& k_prev_layer);

std::vector<Vector> gru_run(const GruSpec& spec, const std::vector<Vector>& inputs);

// ---------------------------------------------------------------------------
// URNN

// Stack of orthogonally-weighted layers K^l = sigma(W_l K^{l-1} + V_l x).
// Weights are realized as the Cayley transform (I - A)^{-1}(I + A) of skew
// generators, which is orthogonal by construction; w_explicit, when
// nonempty, overrides the realization (urnn_step still verifies
// orthogonality and refuses drifted weights). The stack closes recurrently:
// layer 0 consumes the top layer's value from the previous step.
struct UrnnSpec {
  int layers = 1;
  int dim = 1;        // layer width n
  int input_dim = 1;  // width of the driven input
  std::vector<Vector> skew_params;  // one n(n-1)/2 generator list per layer
  std::vector<Matrix> v;            // one n x input_dim input map per layer
  std::vector<Matrix> w_explicit;   // optional realized weights, one per layer
  Act activation = Act::tanh_fn;

  void validate() const;
};

// Realized layer weight; throws NotOrthogonal if W^T W deviates from the
// identity by more than 1e-12 in any entry.
Matrix urnn_weight(const UrnnSpec& spec, int layer);

Vector urnn_step(const UrnnSpec& spec, int layer, const Vector& k_prev_layer,
                 const Vector& x_t);

std::vector<Vector> urnn_run(const UrnnSpec& spec, const std::vector<Vector>& inputs);

// ---------------------------------------------------------------------------
// Clockwork RNN

// Hidden units are partitioned into blocks, one per clock, each with a tick
// period. At step t a block recomputes iff t is divisible by its period and
// copies its previous value otherwise; active rows of w_h and w_i fire over
// the full previous hidden vector and the driven input. The readout
// y_next = sigma_o(w_o k) has the input's width so outputs can be fed back.
struct CwRnnSpec {
  std::vector<int> block_sizes;    // partition of the hidden width, one entry per clock
  std::vector<long long> periods;  // tick period per block
  Matrix w_h;                      // hidden map, p x p
  Matrix w_i;                      // input map, p x s
  Matrix w_o;                      // readout, s x p
  Act hidden_act = Act::tanh_fn;
  Act output_act = Act::tanh_fn;

  int clocks() const { return int(block_sizes.size()); }
  int hidden_dim() const;  // sum of block sizes
  void validate() const;   // throws BadPartition / DimMismatch
};

// The doubling ladder 1, 2, 4, ... used when no periods are specified.
std::vector<long long> default_periods(int clocks);

struct CwRnnStep {
  Vector k;
  Vector y_next;
};
// One step at 1-based time t.
CwRnnStep cwrnn_step(const CwRnnSpec& spec, long long t, const Vector& k_prev,
                     const Vector& y_t);

std::vector<Vector> cwrnn_run(const CwRnnSpec& spec, const std::vector<Vector>& inputs);

// ---------------------------------------------------------------------------
// Architecture-to-config constructions

// Orders are always reported as named fields because the n-t shorthand is
// written in both orders across the literature this family of architectures
// comes from. realized_* describe the emitted config (ground truth);
// stacked_* give the whole-stack categorization; per_layer_* give the
// single-layer correspondence the construction is built from.
struct MappingReport {
  std::string architecture;
  int layers = 1;
  int realized_stages = 1;
  int realized_memory = 1;
  int stacked_nonlinearity_order = 1;
  int stacked_memory_order = 1;
  int per_layer_nonlinearity_order = 1;
  int per_layer_memory_order = 1;
};

// Each overload returns a dynamical-weight config whose driven run matches
// the corresponding native run to roundoff. Requirements beyond validate():
// the LSTM correspondence starts from a quiescent (zero) cell state; the
// single-layer GRU correspondence needs w_x[0] invertible (its coupling
// block is w_x^{-1} w_g); the URNN readout is the identity, so input and
// layer widths must agree. Violations throw UnsupportedSpec.
OdeRnnConfig map_to_odernn(const LstmSpec& spec);
OdeRnnConfig map_to_odernn(const GruSpec& spec);
OdeRnnConfig map_to_odernn(const UrnnSpec& spec);
OdeRnnConfig map_to_odernn(const CwRnnSpec& spec);

MappingReport mapping_report(const LstmSpec& spec);
MappingReport mapping_report(const GruSpec& spec);
MappingReport mapping_report(const UrnnSpec& spec);
MappingReport mapping_report(const CwRnnSpec& spec);

}  // namespace odelab
