#include "odelab/qunn.hpp"

#include <utility>

namespace odelab {

namespace {

int block_offset(int clock_pos, int s) { return (clock_pos - 1) * s; }

void check_schedule(const CoeffSchedule& sched, int clock_dim, const char* name) {
  require(!sched.values.empty(), Err::BadConfig, std::string(name) + " schedule is empty");
  require(sched.values.size() == 1 || int(sched.values.size()) == clock_dim, Err::BadConfig,
          std::string(name) + " schedule must hold one value or one per position");
  for (double v : sched.values)
    require(v >= 0.0 && v <= 1.0, Err::BadConfig,
            std::string(name) + " coefficients must lie in [0,1]");
}

}  // namespace

double CoeffSchedule::at(int l) const {
  require(!values.empty(), Err::BadConfig, "empty coefficient schedule");
  if (values.size() == 1) return values[0];
  require(l >= 1 && l <= int(values.size()), Err::OutOfRange,
          "schedule position out of range");
  return values[size_t(l - 1)];
}

ResidualSpec ResidualSpec::scale_mix(std::vector<double> s) {
  ResidualSpec spec;
  spec.kind = Kind::scales;
  spec.scale = std::move(s);
  return spec;
}

ResidualSpec ResidualSpec::matrix_mix(std::vector<Matrix> m) {
  ResidualSpec spec;
  spec.kind = Kind::matrices;
  spec.mat = std::move(m);
  return spec;
}

long long ResidualSpec::param_count() const {
  return kind == Kind::scales ? static_cast<long long>(scale.size()) : 0;
}

void QunnConfig::validate() const {
  require(clock_dim >= 1, Err::BadConfig, "block length must be at least 1");
  require(depth >= 1, Err::BadConfig, "at least one hidden layer is required");
  require(data_dim >= 1, Err::BadConfig, "data width must be at least 1");
  check_schedule(p1, clock_dim, "clock-swap");
  check_schedule(p2, clock_dim, "memory");
  int d = hidden_dim();
  switch (residual.kind) {
    case ResidualSpec::Kind::identity:
      break;
    case ResidualSpec::Kind::scales:
      require(int(residual.scale.size()) == depth, Err::BadConfig,
              "one residual scale per hidden layer");
      break;
    case ResidualSpec::Kind::matrices:
      require(int(residual.mat.size()) == depth, Err::BadConfig,
              "one residual matrix per hidden layer");
      for (const Matrix& m : residual.mat)
        require(m.rows == d && m.cols == d, Err::DimMismatch,
                "residual matrices must match the lifted dimension");
      break;
  }
  if (!weight_base.empty())
    require(weight_base.rows == d && weight_base.cols == d, Err::DimMismatch,
            "weight base must match the lifted dimension");
}

QunnState qunn_start(const QunnConfig& cfg) {
  cfg.validate();
  QunnState state;
  state.clock_dim = cfg.clock_dim;
  state.data_dim = cfg.data_dim;
  state.pos = 1;
  state.weight = cfg.weight_base.empty() ? Matrix(cfg.hidden_dim(), cfg.hidden_dim())
                                         : cfg.weight_base;
  return state;
}

Vector clock_state(int l, int n) {
  require(n >= 1, Err::OutOfRange, "clock dimension must be positive");
  require(l >= 1 && l <= n, Err::OutOfRange, "clock position outside [1, n]");
  Vector c = zeros(n);
  c[size_t(l - 1)] = 1.0;
  return c;
}

Vector qunn_embed(const Vector& y, int l, int n, Act sigma) {
  require(l >= 1 && l <= n, Err::OutOfRange, "clock position outside [1, n]");
  int s = int(y.size());
  require(s >= 1, Err::DimMismatch, "cannot embed an empty vector");
  Vector lifted = zeros(s * n);
  int off = block_offset(l, s);
  for (int i = 0; i < s; ++i) lifted[size_t(off + i)] = y[size_t(i)];
  return apply_act(sigma, lifted);
}

const Matrix& qunn_weight_update(QunnState& state, int l, int k, double p2) {
  int s = state.data_dim;
  int n = state.clock_dim;
  require(s >= 1 && n >= 1, Err::BadConfig, "state dimensions are unset");
  require(l >= 1 && l <= n, Err::OutOfRange, "position outside the block");
  require(k >= 1, Err::OutOfRange, "layer index starts at 1");
  require(l <= int(state.inputs.size()), Err::OutOfRange,
          "position has no stored input yet");
  require(state.weight.rows == s * n && state.weight.cols == s * n, Err::DimMismatch,
          "weight accumulator has the wrong shape");

  Matrix& w = state.weight;
  for (double& v : w.data) v *= 1.0 - p2;

  int back = l - k;
  if (back >= 1) {
    const Vector& ya = state.inputs[size_t(back - 1)];
    const Vector& yb = state.inputs[size_t(l - 1)];
    require(int(ya.size()) == s && int(yb.size()) == s, Err::DimMismatch,
            "stored inputs must match the data width");
    int ra = block_offset(back, s);
    int rb = block_offset(l, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        double v = p2 * ya[size_t(i)] * yb[size_t(j)];
        w(ra + i, rb + j) += v;
        w(rb + j, ra + i) -= v;
      }
  }
  return w;
}

Matrix qunn_clock_swap(int l, int k, int n, int s, double p1) {
  require(l >= 1 && l <= n, Err::OutOfRange, "position outside the block");
  require(k >= 1, Err::OutOfRange, "layer index starts at 1");
  require(s >= 1, Err::DimMismatch, "data width must be positive");
  Matrix d = Matrix::scalar(s * n, 1.0 - p1);
  int back = l - k;
  if (back >= 1) {
    int ra = block_offset(back, s);
    int rb = block_offset(l, s);
    for (int i = 0; i < s; ++i) {
      d(ra + i, rb + i) += p1;
      d(rb + i, ra + i) -= p1;
    }
  }
  return d;
}

Vector qunn_hidden_step(const QunnState& state, const Vector& k_prev, int l, int k,
                        const QunnConfig& cfg) {
  int d = cfg.hidden_dim();
  require(int(k_prev.size()) == d, Err::DimMismatch, "hidden vector has the wrong width");
  require(state.weight.rows == d && state.weight.cols == d, Err::DimMismatch,
          "weight rung has the wrong shape");

  Vector mixed = state.weight * k_prev;
  Matrix swap = qunn_clock_swap(l, k, cfg.clock_dim, cfg.data_dim, cfg.p1.at(l));
  Vector driven = apply_act(cfg.sigma_hidden, swap * mixed);

  switch (cfg.residual.kind) {
    case ResidualSpec::Kind::identity:
      return vec_add(k_prev, driven);
    case ResidualSpec::Kind::scales:
      return vec_add(vec_scale(cfg.residual.scale[size_t(k - 1)], k_prev), driven);
    case ResidualSpec::Kind::matrices:
      return vec_add(cfg.residual.mat[size_t(k - 1)] * k_prev, driven);
  }
  return driven;  // unreachable
}

Vector qunn_project(const Vector& k_top, int l, int n, Act sigma) {
  require(n >= 1, Err::OutOfRange, "clock dimension must be positive");
  require(l >= 1 && l <= n, Err::OutOfRange, "clock position outside [1, n]");
  require(int(k_top.size()) % n == 0, Err::DimMismatch,
          "lifted vector does not split into clock blocks");
  int s = int(k_top.size()) / n;
  require(s >= 1, Err::DimMismatch, "empty clock blocks");
  int target = l >= n ? 1 : l + 1;
  int off = block_offset(target, s);
  Vector block(size_t(s), 0.0);
  for (int i = 0; i < s; ++i) block[size_t(i)] = k_top[size_t(off + i)];
  return apply_act(sigma, block);
}

std::vector<Vector> qunn_forward(const QunnConfig& cfg, const std::vector<Vector>& inputs) {
  QunnState state = qunn_start(cfg);
  Matrix base = state.weight;  // zero or the configured seed

  std::vector<Vector> outputs;
  outputs.reserve(inputs.size());
  for (const Vector& y : inputs) {
    require(int(y.size()) == cfg.data_dim, Err::DimMismatch,
            "input width does not match the config");
    state.inputs.push_back(y);
    Vector k = qunn_embed(y, state.pos, cfg.clock_dim, cfg.sigma_in);
    state.weight = base;
    for (int layer = 1; layer <= cfg.depth; ++layer) {
      qunn_weight_update(state, state.pos, layer, cfg.p2.at(state.pos));
      k = qunn_hidden_step(state, k, state.pos, layer, cfg);
    }
    outputs.push_back(qunn_project(k, state.pos, cfg.clock_dim, cfg.sigma_out));
    if (state.pos >= cfg.clock_dim) {
      state.pos = 1;
      state.inputs.clear();
    } else {
      ++state.pos;
    }
  }
  return outputs;
}

long long qunn_param_count(const QunnConfig& cfg) {
  return cfg.p1.param_count() + cfg.p2.param_count() + cfg.residual.param_count();
}

}  // namespace odelab
