#include "odelab/adapters.hpp"

#include <memory>
#include <utility>

#include "odelab/arnn.hpp"
#include "odelab/errors.hpp"

namespace odelab {
namespace {

Vector concat2(const Vector& a, const Vector& b) {
  Vector u;
  u.reserve(a.size() + b.size());
  u.insert(u.end(), a.begin(), a.end());
  u.insert(u.end(), b.begin(), b.end());
  return u;
}

Matrix block_of(const Matrix& m, int r0, int c0, int rows, int cols) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = m(r0 + i, c0 + j);
  return out;
}

// Pointwise activation applied to one length-n slice of a stacked
// preactivation vector.
Vector act_slice(Act a, const Vector& z, int offset, int n) {
  Vector out(size_t(n), 0.0);
  for (int j = 0; j < n; ++j) out[size_t(j)] = apply_act(a, z[size_t(offset + j)]);
  return out;
}

// a^{-1} b, column by column against one factorization.
Matrix solve_matrix(const Matrix& a, const Matrix& b) {
  require(a.rows == a.cols && a.rows == b.rows, Err::DimMismatch,
          "matrix solve needs square a matching b's rows");
  LuSolver lu(a);
  Matrix out(b.rows, b.cols);
  Vector rhs(size_t(b.rows), 0.0);
  Vector col(size_t(b.rows), 0.0);
  for (int j = 0; j < b.cols; ++j) {
    for (int i = 0; i < b.rows; ++i) rhs[size_t(i)] = b(i, j);
    lu.solve_into(rhs.data(), col.data());
    for (int i = 0; i < b.rows; ++i) out(i, j) = col[size_t(i)];
  }
  return out;
}

// Cayley transform (I - a)^{-1} (I + a); orthogonal for skew a.
Matrix cayley(const Matrix& a) {
  int n = a.rows;
  Matrix minus = Matrix::identity(n) - a;
  Matrix plus = Matrix::identity(n) + a;
  return solve_matrix(minus, plus);
}

void check_layer_index(int layer, int layers) {
  require(layer >= 0 && layer < layers, Err::OutOfRange, "layer index out of range");
}

void check_vec(const Vector& v, int n, const char* what) {
  require(int(v.size()) == n, Err::DimMismatch, what);
}

Vector one_minus(const Vector& v) {
  Vector out(v.size(), 0.0);
  for (size_t j = 0; j < v.size(); ++j) out[j] = 1.0 - v[j];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LSTM

void LstmSpec::validate() const {
  require(layers >= 1, Err::BadConfig, "need at least one layer");
  require(dim >= 1, Err::BadConfig, "layer width must be >= 1");
  require(int(w.size()) == layers, Err::BadConfig, "need one gate matrix per layer");
  for (const Matrix& m : w)
    require(m.rows == 4 * dim && m.cols == 2 * dim, Err::DimMismatch,
            "gate matrix must be 4n x 2n");
  if (!cells.empty()) {
    require(int(cells.size()) == layers, Err::BadConfig, "need one cell vector per layer");
    for (const Vector& c : cells)
      require(c.empty() || int(c.size()) == dim, Err::DimMismatch, "cell state must have width n");
  }
}

LstmGates lstm_gates(const LstmSpec& spec, int layer, const Vector& k_prev_time,
                     const Vector& k_prev_layer) {
  spec.validate();
  check_layer_index(layer, spec.layers);
  int n = spec.dim;
  check_vec(k_prev_time, n, "previous-step value must have width n");
  check_vec(k_prev_layer, n, "layer-below value must have width n");
  Vector z = spec.w[size_t(layer)] * concat2(k_prev_layer, k_prev_time);
  LstmGates g;
  g.i = act_slice(spec.gates[0], z, 0, n);
  g.f = act_slice(spec.gates[1], z, n, n);
  g.o = act_slice(spec.gates[2], z, 2 * n, n);
  g.g = act_slice(spec.gates[3], z, 3 * n, n);
  return g;
}

LstmStep lstm_step(const LstmSpec& spec, int layer, const Vector& k_prev_time,
                   const Vector& k_prev_layer) {
  LstmGates g = lstm_gates(spec, layer, k_prev_time, k_prev_layer);
  int n = spec.dim;
  Vector c_prev(size_t(n), 0.0);
  if (!spec.cells.empty() && !spec.cells[size_t(layer)].empty())
    c_prev = spec.cells[size_t(layer)];
  LstmStep out;
  out.c = vec_add(hadamard(g.f, c_prev), hadamard(g.i, g.g));
  out.k = hadamard(g.o, apply_act(Act::tanh_fn, out.c));
  return out;
}

std::vector<Vector> lstm_run(const LstmSpec& spec, const std::vector<Vector>& inputs) {
  spec.validate();
  int n = spec.dim;
  LstmSpec state = spec;
  if (state.cells.empty()) state.cells.assign(size_t(spec.layers), Vector(size_t(n), 0.0));
  for (Vector& c : state.cells)
    if (c.empty()) c.assign(size_t(n), 0.0);
  std::vector<Vector> k(size_t(spec.layers), Vector(size_t(n), 0.0));
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (const Vector& x : inputs) {
    check_vec(x, n, "input must have width n");
    Vector below = x;
    for (int l = 0; l < spec.layers; ++l) {
      LstmStep s = lstm_step(state, l, k[size_t(l)], below);
      state.cells[size_t(l)] = std::move(s.c);
      k[size_t(l)] = std::move(s.k);
      below = k[size_t(l)];
    }
    out.push_back(below);
  }
  return out;
}

long long lstm_param_count(const LstmSpec& spec) {
  spec.validate();
  return 8LL * spec.dim * spec.dim * spec.layers;
}

// ---------------------------------------------------------------------------
// GRU

void GruSpec::validate() const {
  require(layers >= 1, Err::BadConfig, "need at least one layer");
  require(dim >= 1, Err::BadConfig, "layer width must be >= 1");
  require(int(w.size()) == layers && int(w_x.size()) == layers && int(w_g.size()) == layers,
          Err::BadConfig, "need w, w_x, w_g for every layer");
  for (const Matrix& m : w)
    require(m.rows == 2 * dim && m.cols == 2 * dim, Err::DimMismatch,
            "gate matrix must be 2n x 2n");
  for (const Matrix& m : w_x)
    require(m.rows == dim && m.cols == dim, Err::DimMismatch, "candidate input map must be n x n");
  for (const Matrix& m : w_g)
    require(m.rows == dim && m.cols == dim, Err::DimMismatch,
            "candidate recurrent map must be n x n");
}

GruGates gru_gates(const GruSpec& spec, int layer, const Vector& k_prev_time,
                   const Vector& k_prev_layer) {
  spec.validate();
  check_layer_index(layer, spec.layers);
  int n = spec.dim;
  check_vec(k_prev_time, n, "previous-step value must have width n");
  check_vec(k_prev_layer, n, "layer-below value must have width n");
  Vector z = spec.w[size_t(layer)] * concat2(k_prev_layer, k_prev_time);
  GruGates g;
  g.r = act_slice(spec.gate, z, 0, n);
  g.z = act_slice(spec.gate, z, n, n);
  return g;
}

Vector gru_step(const GruSpec& spec, int layer, const Vector& k_prev_time,
                const Vector& k_prev_layer) {
  GruGates g = gru_gates(spec, layer, k_prev_time, k_prev_layer);
  Vector cand = vec_add(spec.w_x[size_t(layer)] * k_prev_layer,
                        spec.w_g[size_t(layer)] * hadamard(g.r, k_prev_time));
  return vec_add(hadamard(one_minus(g.z), k_prev_time),
                 hadamard(g.z, apply_act(Act::tanh_fn, cand)));
}

std::vector<Vector> gru_run(const GruSpec& spec, const std::vector<Vector>& inputs) {
  spec.validate();
  int n = spec.dim;
  std::vector<Vector> k(size_t(spec.layers), Vector(size_t(n), 0.0));
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (const Vector& x : inputs) {
    check_vec(x, n, "input must have width n");
    Vector below = x;
    for (int l = 0; l < spec.layers; ++l) {
      k[size_t(l)] = gru_step(spec, l, k[size_t(l)], below);
      below = k[size_t(l)];
    }
    out.push_back(below);
  }
  return out;
}

// ---------------------------------------------------------------------------
// URNN

void UrnnSpec::validate() const {
  require(layers >= 1, Err::BadConfig, "need at least one layer");
  require(dim >= 1 && input_dim >= 1, Err::BadConfig, "widths must be >= 1");
  if (w_explicit.empty()) {
    require(int(skew_params.size()) == layers, Err::BadConfig,
            "need one generator list per layer");
    size_t need = size_t(dim) * size_t(dim - 1) / 2;
    for (const Vector& p : skew_params)
      require(p.size() == need, Err::DimMismatch,
              "generator list must have n(n-1)/2 entries");
  } else {
    require(int(w_explicit.size()) == layers, Err::BadConfig,
            "need one explicit weight per layer");
    for (const Matrix& m : w_explicit)
      require(m.rows == dim && m.cols == dim, Err::DimMismatch,
              "explicit weight must be n x n");
  }
  require(int(v.size()) == layers, Err::BadConfig, "need one input map per layer");
  for (const Matrix& m : v)
    require(m.rows == dim && m.cols == input_dim, Err::DimMismatch,
            "input map must be n x input_dim");
}

Matrix urnn_weight(const UrnnSpec& spec, int layer) {
  spec.validate();
  check_layer_index(layer, spec.layers);
  Matrix w = spec.w_explicit.empty()
                 ? cayley(make_skew(spec.skew_params[size_t(layer)], spec.dim))
                 : spec.w_explicit[size_t(layer)];
  Matrix gram = transpose(w) * w;
  double dev = max_abs(gram - Matrix::identity(spec.dim));
  require(dev <= 1e-12, Err::NotOrthogonal, "layer weight is not orthogonal within 1e-12");
  return w;
}

Vector urnn_step(const UrnnSpec& spec, int layer, const Vector& k_prev_layer,
                 const Vector& x_t) {
  Matrix w = urnn_weight(spec, layer);
  check_vec(k_prev_layer, spec.dim, "layer-below value must have width n");
  check_vec(x_t, spec.input_dim, "input must have width input_dim");
  return apply_act(spec.activation,
                   vec_add(w * k_prev_layer, spec.v[size_t(layer)] * x_t));
}

std::vector<Vector> urnn_run(const UrnnSpec& spec, const std::vector<Vector>& inputs) {
  spec.validate();
  std::vector<Matrix> w(size_t(spec.layers), Matrix{});
  for (int l = 0; l < spec.layers; ++l) w[size_t(l)] = urnn_weight(spec, l);
  Vector top(size_t(spec.dim), 0.0);
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (const Vector& x : inputs) {
    check_vec(x, spec.input_dim, "input must have width input_dim");
    Vector below = top;
    for (int l = 0; l < spec.layers; ++l)
      below = apply_act(spec.activation, vec_add(w[size_t(l)] * below, spec.v[size_t(l)] * x));
    top = below;
    out.push_back(top);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Clockwork RNN

int CwRnnSpec::hidden_dim() const {
  int p = 0;
  for (int s : block_sizes) p += s;
  return p;
}

void CwRnnSpec::validate() const {
  require(!block_sizes.empty(), Err::BadPartition, "need at least one block");
  for (int s : block_sizes) require(s >= 1, Err::BadPartition, "block sizes must be >= 1");
  require(periods.size() == block_sizes.size(), Err::BadPartition,
          "need one period per block");
  for (long long p : periods) require(p >= 1, Err::BadPartition, "periods must be >= 1");
  int p = hidden_dim();
  require(w_h.rows == p && w_h.cols == p, Err::DimMismatch, "hidden map must be p x p");
  require(w_i.rows == p && w_i.cols >= 1, Err::DimMismatch, "input map must be p x s");
  require(w_o.rows == w_i.cols && w_o.cols == p, Err::DimMismatch, "readout must be s x p");
}

std::vector<long long> default_periods(int clocks) {
  require(clocks >= 1, Err::BadPartition, "need at least one clock");
  std::vector<long long> out(size_t(clocks), 1);
  for (int g = 1; g < clocks; ++g) out[size_t(g)] = out[size_t(g - 1)] * 2;
  return out;
}

CwRnnStep cwrnn_step(const CwRnnSpec& spec, long long t, const Vector& k_prev,
                     const Vector& y_t) {
  spec.validate();
  require(t >= 1, Err::OutOfRange, "steps are counted from 1");
  int p = spec.hidden_dim();
  int s = spec.w_i.cols;
  check_vec(k_prev, p, "hidden state must have width p");
  check_vec(y_t, s, "input must have width s");
  CwRnnStep out;
  out.k = k_prev;
  int row = 0;
  for (int g = 0; g < spec.clocks(); ++g) {
    bool active = (t % spec.periods[size_t(g)]) == 0;
    for (int i = 0; i < spec.block_sizes[size_t(g)]; ++i, ++row) {
      if (!active) continue;
      double acc = 0.0;
      for (int j = 0; j < p; ++j) acc += spec.w_h(row, j) * k_prev[size_t(j)];
      for (int j = 0; j < s; ++j) acc += spec.w_i(row, j) * y_t[size_t(j)];
      out.k[size_t(row)] = apply_act(spec.hidden_act, acc);
    }
  }
  out.y_next = apply_act(spec.output_act, spec.w_o * out.k);
  return out;
}

std::vector<Vector> cwrnn_run(const CwRnnSpec& spec, const std::vector<Vector>& inputs) {
  spec.validate();
  Vector k(size_t(spec.hidden_dim()), 0.0);
  std::vector<Vector> out;
  out.reserve(inputs.size());
  long long t = 1;
  for (const Vector& x : inputs) {
    CwRnnStep s = cwrnn_step(spec, t, k, x);
    k = std::move(s.k);
    out.push_back(std::move(s.y_next));
    ++t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constructions

namespace {

// Per-step gate cache shared by the stage closures of one mapped LSTM. The
// engine drives stages strictly in order within a step, so lazily filling
// the cache at first use per layer is safe.
struct LstmMapState {
  LstmSpec spec;
  std::vector<char> fresh;
  std::vector<LstmGates> gates;
  std::vector<Vector> kprev;

  const LstmGates& gates_for(int l, const StepContext& ctx,
                             const std::vector<Vector>& k_done) {
    if (fresh[size_t(l)]) return gates[size_t(l)];
    int n = spec.dim;
    int top = spec.layers - 1;
    const Vector& below = l == 0 ? ctx.hist->current() : k_done[size_t(3 * l - 1)];
    const Vector& kp = l == top ? *ctx.prev_output : (*ctx.prev_hiddens)[size_t(3 * l + 2)];
    Vector z = spec.w[size_t(l)] * concat2(below, kp);
    LstmGates g;
    g.i = act_slice(spec.gates[0], z, 0, n);
    g.f = act_slice(spec.gates[1], z, n, n);
    g.o = act_slice(spec.gates[2], z, 2 * n, n);
    g.g = act_slice(spec.gates[3], z, 3 * n, n);
    gates[size_t(l)] = std::move(g);
    kprev[size_t(l)] = kp;
    fresh[size_t(l)] = 1;
    return gates[size_t(l)];
  }
};

struct GruSingleState {
  GruSpec spec;
  Vector r, z, prev;
};

struct GruStackState {
  GruSpec spec;
  std::vector<char> fresh;
  std::vector<GruGates> gates;
  std::vector<Vector> kprev;

  const GruGates& gates_for(int l, const StepContext& ctx,
                            const std::vector<Vector>& k_done) {
    if (fresh[size_t(l)]) return gates[size_t(l)];
    const Vector& below = l == 0 ? ctx.hist->current() : k_done[size_t(2 * l - 1)];
    const Vector& kp = (*ctx.prev_hiddens)[size_t(2 * l + 1)];
    int n = spec.dim;
    Vector zz = spec.w[size_t(l)] * concat2(below, kp);
    GruGates g;
    g.r = act_slice(spec.gate, zz, 0, n);
    g.z = act_slice(spec.gate, zz, n, n);
    gates[size_t(l)] = std::move(g);
    kprev[size_t(l)] = kp;
    fresh[size_t(l)] = 1;
    return gates[size_t(l)];
  }
};

struct CwMapState {
  CwRnnSpec spec;
  Matrix wh_t;
  Matrix wi_t;
  std::vector<char> active;
};

}  // namespace

OdeRnnConfig map_to_odernn(const LstmSpec& spec) {
  spec.validate();
  for (const Vector& c : spec.cells)
    require(c.empty() || max_abs(c) == 0.0, Err::UnsupportedSpec,
            "the correspondence starts from a quiescent cell state");
  int L = spec.layers;
  int n = spec.dim;
  auto st = std::make_shared<LstmMapState>();
  st->spec = spec;
  st->fresh.assign(size_t(L), 0);
  st->gates.assign(size_t(L), LstmGates{});
  st->kprev.assign(size_t(L), Vector(size_t(n), 0.0));

  OdeRnnConfig cfg;
  cfg.stages = 3 * L - 1;
  cfg.memory = 1;
  cfg.state_dim = n;
  cfg.hidden_dim = n;
  cfg.h = 1.0;
  cfg.coupling = Coupling::direct;
  cfg.dynamical = std::make_shared<DynamicalWeights>();
  cfg.dynamical->begin_step = [st](const StepContext&) {
    st->fresh.assign(st->fresh.size(), 0);
  };
  cfg.dynamical->stage = [st, n](int q, const StepContext& ctx,
                                 const std::vector<Vector>& k_done) {
    int l = (q - 1) / 3;
    int role = (q - 1) % 3;
    DynStage stage;
    if (role == 0) {
      // Cell loader: holds last step's cell state so the next stage's carry
      // term can scale it by the forget gate.
      stage.b = (*ctx.prev_hiddens)[size_t(3 * l + 1)];
      stage.sigma = StageFn(Act::identity);
      return stage;
    }
    if (role == 1) {
      // Cell update: carry = forget gate on the loader, scale = input gate
      // on the candidate.
      const LstmGates& g = st->gates_for(l, ctx, k_done);
      const Matrix& w = st->spec.w[size_t(l)];
      stage.gamma = diag_embed(g.f);
      stage.kappa = diag_embed(g.i);
      stage.sigma = StageFn(st->spec.gates[3]);
      stage.b = block_of(w, 3 * n, n, n, n) * st->kprev[size_t(l)];
      if (l == 0)
        stage.W = block_of(w, 3 * n, 0, n, n);
      else
        stage.alpha.emplace_back(3 * l, block_of(w, 3 * n, 0, n, n));
      return stage;
    }
    // Layer value: output gate on tanh of the fresh cell state.
    const LstmGates& g = st->gates_for(l, ctx, k_done);
    stage.kappa = diag_embed(g.o);
    stage.sigma = StageFn(Act::tanh_fn);
    stage.alpha.emplace_back(q - 1, Matrix::identity(n));
    return stage;
  };
  cfg.dynamical->output = [st, L, n](const StepContext& ctx, const std::vector<Vector>& k) {
    const LstmGates& g = st->gates_for(L - 1, ctx, k);
    DynOutput o;
    o.kappa = diag_embed(g.o);
    o.sigma = StageFn(Act::tanh_fn);
    o.beta.emplace_back(3 * L - 1, Matrix::identity(n));
    return o;
  };
  cfg.validate();
  return cfg;
}

OdeRnnConfig map_to_odernn(const GruSpec& spec) {
  spec.validate();
  int L = spec.layers;
  int n = spec.dim;

  OdeRnnConfig cfg;
  cfg.memory = 1;
  cfg.state_dim = n;
  cfg.hidden_dim = n;
  cfg.h = 1.0;
  cfg.dynamical = std::make_shared<DynamicalWeights>();

  if (L == 1) {
    // Single layer rides the integrator-style coupling: the recurrent
    // candidate term enters as the block w_x^{-1} w_g applied before w_x, so
    // w_x must be invertible.
    Matrix a21;
    try {
      a21 = solve_matrix(spec.w_x[0], spec.w_g[0]);
    } catch (const Error& e) {
      if (e.code() == Err::SingularMatrix)
        throw Error(Err::UnsupportedSpec,
                    "single-layer correspondence needs an invertible candidate input map");
      throw;
    }
    cfg.stages = 2;
    cfg.coupling = Coupling::through_weights;
    auto st = std::make_shared<GruSingleState>();
    st->spec = spec;
    cfg.dynamical->begin_step = [st, n](const StepContext& ctx) {
      Vector z = st->spec.w[0] * concat2(ctx.hist->current(), *ctx.prev_output);
      st->r = act_slice(st->spec.gate, z, 0, n);
      st->z = act_slice(st->spec.gate, z, n, n);
      st->prev = *ctx.prev_output;
    };
    cfg.dynamical->stage = [st, a21](int q, const StepContext&, const std::vector<Vector>&) {
      DynStage stage;
      if (q == 1) {
        stage.b = st->prev;
        stage.sigma = StageFn::wrap([st](const Vector& v) { return hadamard(st->r, v); });
        return stage;
      }
      stage.W = st->spec.w_x[0];
      stage.alpha.emplace_back(1, a21);
      stage.sigma = StageFn::wrap([st](const Vector& v) {
        return hadamard(st->z, apply_act(Act::tanh_fn, v));
      });
      return stage;
    };
    cfg.dynamical->output = [st, n](const StepContext&, const std::vector<Vector>&) {
      DynOutput o;
      o.b = hadamard(one_minus(st->z), st->prev);
      o.beta.emplace_back(2, Matrix::identity(n));
      o.sigma = StageFn(Act::identity);
      return o;
    };
    cfg.validate();
    return cfg;
  }

  cfg.stages = 2 * L;
  cfg.coupling = Coupling::direct;
  auto st = std::make_shared<GruStackState>();
  st->spec = spec;
  st->fresh.assign(size_t(L), 0);
  st->gates.assign(size_t(L), GruGates{});
  st->kprev.assign(size_t(L), Vector(size_t(n), 0.0));
  cfg.dynamical->begin_step = [st](const StepContext&) {
    st->fresh.assign(st->fresh.size(), 0);
  };
  cfg.dynamical->stage = [st](int q, const StepContext& ctx,
                              const std::vector<Vector>& k_done) {
    int l = (q - 1) / 2;
    int role = (q - 1) % 2;
    st->gates_for(l, ctx, k_done);  // fill this layer's gate cache
    DynStage stage;
    if (role == 0) {
      // Reset-modulated copy of this layer's previous value.
      stage.b = st->kprev[size_t(l)];
      stage.sigma = StageFn::wrap(
          [st, l](const Vector& v) { return hadamard(st->gates[size_t(l)].r, v); });
      return stage;
    }
    // Candidate plus convex combination, fused into the stage nonlinearity.
    stage.alpha.emplace_back(q - 1, st->spec.w_g[size_t(l)]);
    if (l == 0)
      stage.W = st->spec.w_x[0];
    else
      stage.alpha.emplace_back(2 * l, st->spec.w_x[size_t(l)]);
    stage.sigma = StageFn::wrap([st, l](const Vector& v) {
      const GruGates& gg = st->gates[size_t(l)];
      return vec_add(hadamard(one_minus(gg.z), st->kprev[size_t(l)]),
                     hadamard(gg.z, apply_act(Act::tanh_fn, v)));
    });
    return stage;
  };
  cfg.dynamical->output = [L, n](const StepContext&, const std::vector<Vector>&) {
    DynOutput o;
    o.beta.emplace_back(2 * L, Matrix::identity(n));
    o.sigma = StageFn(Act::identity);
    return o;
  };
  cfg.validate();
  return cfg;
}

OdeRnnConfig map_to_odernn(const UrnnSpec& spec) {
  spec.validate();
  require(spec.input_dim == spec.dim, Err::UnsupportedSpec,
          "identity readout needs matching input and layer widths");
  int L = spec.layers;
  int n = spec.dim;
  auto weights = std::make_shared<std::vector<Matrix>>();
  for (int l = 0; l < L; ++l) weights->push_back(urnn_weight(spec, l));

  OdeRnnConfig cfg;
  cfg.stages = L;
  cfg.memory = 1;
  cfg.state_dim = spec.input_dim;
  cfg.hidden_dim = n;
  cfg.h = 1.0;
  cfg.coupling = Coupling::direct;
  cfg.dynamical = std::make_shared<DynamicalWeights>();
  UrnnSpec s = spec;
  cfg.dynamical->stage = [s, weights, L](int q, const StepContext& ctx,
                                         const std::vector<Vector>&) {
    int l = q - 1;
    DynStage stage;
    stage.W = s.v[size_t(l)];
    stage.sigma = StageFn(s.activation);
    if (l == 0)
      stage.b = (*weights)[0] * (*ctx.prev_hiddens)[size_t(L - 1)];
    else
      stage.alpha.emplace_back(q - 1, (*weights)[size_t(l)]);
    return stage;
  };
  cfg.dynamical->output = [L, n](const StepContext&, const std::vector<Vector>&) {
    DynOutput o;
    o.beta.emplace_back(L, Matrix::identity(n));
    o.sigma = StageFn(Act::identity);
    return o;
  };
  cfg.validate();
  return cfg;
}

OdeRnnConfig map_to_odernn(const CwRnnSpec& spec) {
  spec.validate();
  int p = spec.hidden_dim();
  int s = spec.w_i.cols;
  auto st = std::make_shared<CwMapState>();
  st->spec = spec;

  OdeRnnConfig cfg;
  cfg.stages = 2;
  cfg.memory = 1;
  cfg.state_dim = s;
  cfg.hidden_dim = p;
  cfg.h = 1.0;
  cfg.coupling = Coupling::direct;
  cfg.dynamical = std::make_shared<DynamicalWeights>();
  cfg.dynamical->begin_step = [st, p, s](const StepContext& ctx) {
    // Row-masked weights for this tick: active rows fire, inactive rows of
    // the hidden map become identity rows so the copy semantics ride the
    // same stage.
    st->active.assign(size_t(p), 0);
    st->wh_t = Matrix(p, p);
    st->wi_t = Matrix(p, s);
    int row = 0;
    for (int g = 0; g < st->spec.clocks(); ++g) {
      bool on = (ctx.step_index % st->spec.periods[size_t(g)]) == 0;
      for (int i = 0; i < st->spec.block_sizes[size_t(g)]; ++i, ++row) {
        if (on) {
          st->active[size_t(row)] = 1;
          for (int j = 0; j < p; ++j) st->wh_t(row, j) = st->spec.w_h(row, j);
          for (int j = 0; j < s; ++j) st->wi_t(row, j) = st->spec.w_i(row, j);
        } else {
          st->wh_t(row, row) = 1.0;
        }
      }
    }
  };
  cfg.dynamical->stage = [st](int q, const StepContext& ctx, const std::vector<Vector>&) {
    DynStage stage;
    if (q == 1) {
      stage.b = (*ctx.prev_hiddens)[1];
      stage.sigma = StageFn(Act::identity);
      return stage;
    }
    stage.W = st->wi_t;
    stage.alpha.emplace_back(1, st->wh_t);
    stage.sigma = StageFn::wrap([st](const Vector& v) {
      Vector out = v;
      for (size_t i = 0; i < v.size(); ++i)
        if (st->active[i]) out[i] = apply_act(st->spec.hidden_act, v[i]);
      return out;
    });
    return stage;
  };
  Matrix wo = spec.w_o;
  Act oact = spec.output_act;
  cfg.dynamical->output = [wo, oact](const StepContext&, const std::vector<Vector>&) {
    DynOutput o;
    o.beta.emplace_back(2, wo);
    o.sigma = StageFn(oact);
    return o;
  };
  cfg.validate();
  return cfg;
}

MappingReport mapping_report(const LstmSpec& spec) {
  spec.validate();
  MappingReport r;
  r.architecture = "lstm";
  r.layers = spec.layers;
  r.realized_stages = 3 * spec.layers - 1;
  r.realized_memory = 1;
  r.stacked_nonlinearity_order = 2;
  r.stacked_memory_order = spec.layers;
  r.per_layer_nonlinearity_order = 2;
  r.per_layer_memory_order = 1;
  return r;
}

MappingReport mapping_report(const GruSpec& spec) {
  spec.validate();
  MappingReport r;
  r.architecture = "gru";
  r.layers = spec.layers;
  r.realized_stages = spec.layers == 1 ? 2 : 2 * spec.layers;
  r.realized_memory = 1;
  r.stacked_nonlinearity_order = 2;
  r.stacked_memory_order = spec.layers;
  r.per_layer_nonlinearity_order = 2;
  r.per_layer_memory_order = 2;
  return r;
}

MappingReport mapping_report(const UrnnSpec& spec) {
  spec.validate();
  MappingReport r;
  r.architecture = "urnn";
  r.layers = spec.layers;
  r.realized_stages = spec.layers;
  r.realized_memory = 1;
  r.stacked_nonlinearity_order = 2;
  r.stacked_memory_order = spec.layers;
  r.per_layer_nonlinearity_order = 1;
  r.per_layer_memory_order = 2;
  return r;
}

MappingReport mapping_report(const CwRnnSpec& spec) {
  spec.validate();
  MappingReport r;
  r.architecture = "cwrnn";
  r.layers = spec.clocks();
  r.realized_stages = 2;
  r.realized_memory = 1;
  r.stacked_nonlinearity_order = spec.clocks();
  r.stacked_memory_order = spec.clocks();
  r.per_layer_nonlinearity_order = 1;
  r.per_layer_memory_order = 1;
  return r;
}

}  // namespace odelab
