#include "odelab/odernn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace odelab {

int delay_schedule(int memory, int stages, int k) {
  require(stages >= 1, Err::BadConfig, "delay schedule needs stages >= 1");
  require(k >= 0, Err::OutOfRange, "delay index negative");
  return (memory * k) / stages;
}

InputHistory::InputHistory(int memory, int dim, Padding policy)
    : capacity_(memory + 1), dim_(dim), policy_(policy) {
  require(memory >= 0, Err::BadConfig, "memory order must be >= 0");
  require(dim >= 1, Err::BadConfig, "history dim must be >= 1");
  slots_.assign(size_t(capacity_), Vector(size_t(dim_), 0.0));
  zero_ = Vector(size_t(dim_), 0.0);
  first_ = zero_;
}

void InputHistory::push(const Vector& y) {
  require(int(y.size()) == dim_, Err::DimMismatch, "history push dim");
  if (pushed_ == 0) first_ = y;
  head_ = (head_ + 1) % capacity_;
  slots_[size_t(head_)] = y;
  ++pushed_;
}

const Vector& InputHistory::lookback(int delay) const {
  require(delay >= 0 && delay < capacity_, Err::OutOfRange, "history lookback past capacity");
  if (delay >= pushed_) return policy_ == Padding::repeat_first && pushed_ > 0 ? first_ : zero_;
  int idx = head_ - delay;
  if (idx < 0) idx += capacity_;
  return slots_[size_t(idx)];
}

void InputHistory::reset() {
  for (Vector& s : slots_) std::fill(s.begin(), s.end(), 0.0);
  head_ = 0;
  pushed_ = 0;
  first_ = zero_;
}

namespace {

bool matrix_matches(const Matrix& m, int r, int c) { return m.rows == r && m.cols == c; }

bool is_identity(const Matrix& m, double tol = 0.0) {
  if (!m.square()) return false;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::fabs(m(i, j) - want) > tol) return false;
    }
  return true;
}

}  // namespace

bool OdeRnnConfig::is_explicit() const {
  if (is_dynamical()) return true;  // dynamical providers are sequential by contract
  for (int q = 1; q <= stages; ++q)
    for (int k = q; k <= stages; ++k) {
      const Matrix& blk = alpha[size_t(q - 1)][size_t(k - 1)];
      if (!blk.empty() && !is_zero(blk)) return false;
    }
  return true;
}

void OdeRnnConfig::validate() const {
  require(stages >= 1, Err::BadConfig, "stages must be >= 1");
  require(memory >= 1, Err::BadConfig, "memory order must be >= 1");
  require(state_dim >= 1 && hidden_dim >= 1, Err::BadConfig, "dims must be >= 1");
  require(std::isfinite(h), Err::BadConfig, "step scale not finite");
  if (is_dynamical()) {
    require(bool(dynamical->stage) && bool(dynamical->output), Err::BadConfig,
            "dynamical mode needs stage and output callbacks");
    return;
  }
  size_t np1 = size_t(stages) + 1;
  require(W.size() == np1 && b.size() == np1 && sigma.size() == np1, Err::BadConfig,
          "need n+1 weights, biases, activations");
  require(alpha.size() == size_t(stages) && beta.size() == size_t(stages), Err::BadConfig,
          "alpha must be n x n, beta length n");
  require(gamma.size() == np1 && kappa.size() == np1, Err::BadConfig,
          "gamma and kappa must have n+1 entries");
  for (int q = 1; q <= stages; ++q) {
    require(matrix_matches(W[size_t(q - 1)], hidden_dim, state_dim), Err::DimMismatch,
            "stage weight must be p x s");
    require(int(b[size_t(q - 1)].size()) == hidden_dim, Err::DimMismatch, "stage bias must be p");
    require(alpha[size_t(q - 1)].size() == size_t(stages), Err::BadConfig, "alpha row length");
    for (int k = 1; k <= stages; ++k) {
      const Matrix& blk = alpha[size_t(q - 1)][size_t(k - 1)];
      if (blk.empty()) continue;
      if (coupling == Coupling::direct)
        require(matrix_matches(blk, hidden_dim, hidden_dim), Err::DimMismatch,
                "direct-coupling alpha block must be p x p");
      else
        require(matrix_matches(blk, state_dim, hidden_dim), Err::DimMismatch,
                "through-weights alpha block must be s x p");
    }
    const Matrix& bt = beta[size_t(q - 1)];
    if (!bt.empty())
      require(matrix_matches(bt, state_dim, hidden_dim), Err::DimMismatch,
              "beta block must be s x p");
  }
  for (int q = 2; q <= stages; ++q) {
    const Matrix& g = gamma[size_t(q - 1)];
    if (!g.empty())
      require(matrix_matches(g, hidden_dim, hidden_dim), Err::DimMismatch, "hidden carry p x p");
    const Matrix& k = kappa[size_t(q - 1)];
    if (!k.empty())
      require(matrix_matches(k, hidden_dim, hidden_dim), Err::DimMismatch, "hidden scale p x p");
  }
  require(matrix_matches(W[size_t(stages)], state_dim, state_dim), Err::DimMismatch,
          "output weight must be s x s");
  require(int(b[size_t(stages)].size()) == state_dim, Err::DimMismatch, "output bias must be s");
  if (!gamma[size_t(stages)].empty())
    require(matrix_matches(gamma[size_t(stages)], state_dim, state_dim), Err::DimMismatch,
            "output carry s x s");
  if (!kappa[size_t(stages)].empty())
    require(matrix_matches(kappa[size_t(stages)], state_dim, state_dim), Err::DimMismatch,
            "output scale s x s");
}

OdernnRunner::OdernnRunner(OdeRnnConfig cfg)
    : cfg_(std::move(cfg)), hist_(1, 1) {
  cfg_.validate();
  stage_delays_.resize(size_t(cfg_.stages));
  for (int q = 1; q <= cfg_.stages; ++q) stage_delays_[size_t(q - 1)] = cfg_.delay(q - 1);
  out_delay_ = cfg_.delay(cfg_.stages - 1);
  explicit_ = cfg_.is_explicit();
  hist_ = InputHistory(cfg_.memory, cfg_.state_dim, cfg_.padding);

  if (!explicit_) {
    bool linear = !cfg_.is_dynamical();
    for (int q = 1; linear && q <= cfg_.stages; ++q) linear = cfg_.sigma[size_t(q - 1)].is_identity();
    if (linear) {
      // Assemble the linear stage system once; each step only refreshes the
      // right-hand side. This is the exact fixed point of the damped iteration.
      int p = cfg_.hidden_dim;
      int dim = cfg_.stages * p;
      Matrix m(dim, dim);
      for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
      for (int q = 1; q <= cfg_.stages; ++q) {
        int row0 = (q - 1) * p;
        if (q >= 2 && !cfg_.gamma[size_t(q - 1)].empty()) {
          const Matrix& g = cfg_.gamma[size_t(q - 1)];
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) m(row0 + i, row0 - p + j) -= g(i, j);
        }
        const Matrix* kap = q >= 2 && !cfg_.kappa[size_t(q - 1)].empty()
                                ? &cfg_.kappa[size_t(q - 1)]
                                : nullptr;
        for (int k = 1; k <= cfg_.stages; ++k) {
          const Matrix& a = cfg_.alpha[size_t(q - 1)][size_t(k - 1)];
          if (a.empty() || is_zero(a)) continue;
          Matrix blk = cfg_.coupling == Coupling::direct ? a : cfg_.W[size_t(q - 1)] * a;
          if (kap) blk = (*kap) * blk;
          int col0 = (k - 1) * p;
          for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) m(row0 + i, col0 + j) -= cfg_.h * blk(i, j);
        }
      }
      linear_stage_solver_.emplace(std::move(m));
    }
  }
  reset();
}

void OdernnRunner::reset() {
  hist_.reset();
  prev_hiddens_.assign(size_t(cfg_.stages), Vector(size_t(cfg_.hidden_dim), 0.0));
  work_hiddens_ = prev_hiddens_;
  prev_output_ = Vector(size_t(cfg_.state_dim), 0.0);
  step_index_ = 1;
}

void OdernnRunner::stage_arg_static(int q, const std::vector<Vector>& k, Vector& arg) const {
  const Matrix& w = cfg_.W[size_t(q - 1)];
  const Vector& yref = hist_.lookback(stage_delays_[size_t(q - 1)]);
  if (cfg_.coupling == Coupling::direct) {
    arg.assign(size_t(cfg_.hidden_dim), 0.0);
    mat_vec_into(w, yref.data(), arg.data());
    const Vector& bias = cfg_.b[size_t(q - 1)];
    for (int i = 0; i < cfg_.hidden_dim; ++i) arg[size_t(i)] += bias[size_t(i)];
    for (int kk = 1; kk <= cfg_.stages; ++kk) {
      const Matrix& a = cfg_.alpha[size_t(q - 1)][size_t(kk - 1)];
      if (a.empty() || is_zero(a)) continue;
      const Vector& kv = k[size_t(kk - 1)];
      for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * kv[size_t(j)];
        arg[size_t(i)] += cfg_.h * s;
      }
    }
  } else {
    Vector mix = yref;
    for (int kk = 1; kk <= cfg_.stages; ++kk) {
      const Matrix& a = cfg_.alpha[size_t(q - 1)][size_t(kk - 1)];
      if (a.empty() || is_zero(a)) continue;
      const Vector& kv = k[size_t(kk - 1)];
      for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * kv[size_t(j)];
        mix[size_t(i)] += cfg_.h * s;
      }
    }
    arg.assign(size_t(cfg_.hidden_dim), 0.0);
    mat_vec_into(w, mix.data(), arg.data());
    const Vector& bias = cfg_.b[size_t(q - 1)];
    for (int i = 0; i < cfg_.hidden_dim; ++i) arg[size_t(i)] += bias[size_t(i)];
  }
}

Vector OdernnRunner::output_static(const std::vector<Vector>& k) const {
  int n = cfg_.stages;
  Vector preact(size_t(cfg_.state_dim), 0.0);
  mat_vec_into(cfg_.W[size_t(n)], hist_.lookback(out_delay_).data(), preact.data());
  const Vector& bias = cfg_.b[size_t(n)];
  for (int i = 0; i < cfg_.state_dim; ++i) preact[size_t(i)] += bias[size_t(i)];
  for (int kk = 1; kk <= n; ++kk) {
    const Matrix& bt = cfg_.beta[size_t(kk - 1)];
    if (bt.empty() || is_zero(bt)) continue;
    const Vector& kv = k[size_t(kk - 1)];
    for (int i = 0; i < bt.rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < bt.cols; ++j) s += bt(i, j) * kv[size_t(j)];
      preact[size_t(i)] += cfg_.h * s;
    }
  }
  Vector val = cfg_.sigma[size_t(n)](preact);
  Vector out(size_t(cfg_.state_dim), 0.0);
  if (!cfg_.kappa[size_t(n)].empty())
    mat_vec_into(cfg_.kappa[size_t(n)], val.data(), out.data());
  else
    out = val;
  if (!cfg_.gamma[size_t(n)].empty()) {
    const Matrix& g = cfg_.gamma[size_t(n)];
    const Vector& ycur = hist_.current();
    for (int i = 0; i < g.rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < g.cols; ++j) s += g(i, j) * ycur[size_t(j)];
      out[size_t(i)] += s;
    }
  }
  return out;
}

Vector OdernnRunner::compute_step(std::vector<Vector>& hiddens) {
  int n = cfg_.stages;
  int p = cfg_.hidden_dim;
  hiddens.resize(size_t(n));

  if (cfg_.is_dynamical()) {
    StepContext ctx{step_index_, &hist_, &prev_hiddens_, &prev_output_};
    if (cfg_.dynamical->begin_step) cfg_.dynamical->begin_step(ctx);
    for (int q = 1; q <= n; ++q) {
      DynStage st = cfg_.dynamical->stage(q, ctx, hiddens);
      const Vector& yref = hist_.lookback(stage_delays_[size_t(q - 1)]);
      Vector arg;
      if (cfg_.coupling == Coupling::direct) {
        arg = st.W.empty() ? Vector(size_t(p), 0.0) : st.W * yref;
        if (!st.b.empty()) {
          require(st.b.size() == arg.size(), Err::DimMismatch, "dynamical stage bias");
          for (size_t i = 0; i < arg.size(); ++i) arg[i] += st.b[i];
        }
        for (const auto& [kk, m] : st.alpha) {
          require(kk >= 1 && kk < q, Err::BadConfig, "dynamical stage coupling must be strictly lower");
          Vector contrib = m * hiddens[size_t(kk - 1)];
          require(contrib.size() == arg.size(), Err::DimMismatch, "dynamical alpha block");
          for (size_t i = 0; i < arg.size(); ++i) arg[i] += cfg_.h * contrib[i];
        }
      } else {
        Vector mix = yref;
        for (const auto& [kk, m] : st.alpha) {
          require(kk >= 1 && kk < q, Err::BadConfig, "dynamical stage coupling must be strictly lower");
          Vector contrib = m * hiddens[size_t(kk - 1)];
          require(contrib.size() == mix.size(), Err::DimMismatch, "dynamical alpha block");
          for (size_t i = 0; i < mix.size(); ++i) mix[i] += cfg_.h * contrib[i];
        }
        arg = st.W.empty() ? Vector(size_t(p), 0.0) : st.W * mix;
        if (!st.b.empty())
          for (size_t i = 0; i < arg.size(); ++i) arg[i] += st.b[i];
      }
      Vector core = st.sigma(arg);
      Vector kq = st.kappa.empty() ? core : st.kappa * core;
      if (!st.gamma.empty()) {
        require(q >= 2, Err::BadConfig, "first stage has no carry term");
        Vector carry = st.gamma * hiddens[size_t(q - 2)];
        for (size_t i = 0; i < kq.size(); ++i) kq[i] += carry[i];
      }
      hiddens[size_t(q - 1)] = std::move(kq);
    }
    DynOutput o = cfg_.dynamical->output({step_index_, &hist_, &prev_hiddens_, &prev_output_},
                                         hiddens);
    Vector preact = o.W.empty() ? Vector(size_t(cfg_.state_dim), 0.0)
                                : o.W * hist_.lookback(out_delay_);
    if (!o.b.empty())
      for (size_t i = 0; i < preact.size(); ++i) preact[i] += o.b[i];
    for (const auto& [kk, m] : o.beta) {
      Vector contrib = m * hiddens[size_t(kk - 1)];
      require(contrib.size() == preact.size(), Err::DimMismatch, "dynamical beta block");
      for (size_t i = 0; i < preact.size(); ++i) preact[i] += cfg_.h * contrib[i];
    }
    Vector val = o.sigma(preact);
    Vector out = o.kappa.empty() ? val : o.kappa * val;
    if (!o.gamma.empty()) {
      Vector carry = o.gamma * hist_.current();
      for (size_t i = 0; i < out.size(); ++i) out[i] += carry[i];
    }
    require(all_finite(out), Err::NonFinite, "dynamical step produced non-finite output");
    return out;
  }

  for (size_t i = 0; i < hiddens.size(); ++i) hiddens[i].assign(size_t(p), 0.0);

  if (explicit_) {
    Vector arg;
    for (int q = 1; q <= n; ++q) {
      stage_arg_static(q, hiddens, arg);
      Vector core = cfg_.sigma[size_t(q - 1)](arg);
      if (q == 1) {
        hiddens[0] = std::move(core);
      } else {
        Vector& kq = hiddens[size_t(q - 1)];
        if (!cfg_.kappa[size_t(q - 1)].empty())
          mat_vec_into(cfg_.kappa[size_t(q - 1)], core.data(), kq.data());
        else
          kq = core;
        if (!cfg_.gamma[size_t(q - 1)].empty()) {
          const Matrix& g = cfg_.gamma[size_t(q - 1)];
          const Vector& prev = hiddens[size_t(q - 2)];
          for (int i = 0; i < p; ++i) {
            double s = 0.0;
            for (int j = 0; j < p; ++j) s += g(i, j) * prev[size_t(j)];
            kq[size_t(i)] += s;
          }
        }
      }
    }
  } else if (linear_stage_solver_) {
    Vector rhs(size_t(n) * size_t(p), 0.0);
    Vector part(size_t(p), 0.0);
    for (int q = 1; q <= n; ++q) {
      const Vector& yref = hist_.lookback(stage_delays_[size_t(q - 1)]);
      mat_vec_into(cfg_.W[size_t(q - 1)], yref.data(), part.data());
      const Vector& bias = cfg_.b[size_t(q - 1)];
      for (int i = 0; i < p; ++i) part[size_t(i)] += bias[size_t(i)];
      double* dst = rhs.data() + size_t(q - 1) * size_t(p);
      if (q >= 2 && !cfg_.kappa[size_t(q - 1)].empty()) {
        mat_vec_into(cfg_.kappa[size_t(q - 1)], part.data(), dst);
      } else {
        std::copy(part.begin(), part.end(), dst);
      }
    }
    Vector flat(rhs.size());
    linear_stage_solver_->solve_into(rhs.data(), flat.data());
    for (int q = 0; q < n; ++q)
      std::copy(flat.begin() + ptrdiff_t(q) * p, flat.begin() + ptrdiff_t(q + 1) * p,
                hiddens[size_t(q)].begin());
  } else {
    // Damped fixed-point iteration over all stages jointly. The hard contract
    // is tol 1e-12 within 100 sweeps; when progress continues we keep sweeping
    // toward machine precision so downstream comparisons see exact stages.
    const double damping = 0.5;
    const double tol = 1e-12;
    const double polish = 5e-16;
    const int cap = 100;
    std::vector<Vector> cur = prev_hiddens_;  // warm start from the last step
    std::vector<Vector> next(size_t(n), Vector(size_t(p), 0.0));
    Vector arg;
    bool converged = false;
    double prev_delta = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cap; ++it) {
      for (int q = 1; q <= n; ++q) {
        stage_arg_static(q, cur, arg);
        Vector core = cfg_.sigma[size_t(q - 1)](arg);
        Vector& kq = next[size_t(q - 1)];
        if (q == 1) {
          kq = std::move(core);
        } else {
          if (!cfg_.kappa[size_t(q - 1)].empty())
            mat_vec_into(cfg_.kappa[size_t(q - 1)], core.data(), kq.data());
          else
            kq = core;
          if (!cfg_.gamma[size_t(q - 1)].empty()) {
            const Matrix& g = cfg_.gamma[size_t(q - 1)];
            const Vector& prev = cur[size_t(q - 2)];
            for (int i = 0; i < p; ++i) {
              double s = 0.0;
              for (int j = 0; j < p; ++j) s += g(i, j) * prev[size_t(j)];
              kq[size_t(i)] += s;
            }
          }
        }
      }
      double delta = 0.0, scale = 0.0;
      for (int q = 0; q < n; ++q)
        for (int i = 0; i < p; ++i) {
          double blended = (1.0 - damping) * cur[size_t(q)][size_t(i)] +
                           damping * next[size_t(q)][size_t(i)];
          delta = std::max(delta, std::fabs(blended - cur[size_t(q)][size_t(i)]));
          scale = std::max(scale, std::fabs(blended));
          cur[size_t(q)][size_t(i)] = blended;
        }
      if (delta <= tol * (1.0 + scale)) {
        converged = true;
        if (delta <= polish * (1.0 + scale) || delta >= prev_delta) break;
      }
      prev_delta = delta;
    }
    require(converged, Err::ImplicitNoConvergence,
            "implicit stage iteration exhausted 100 damped sweeps");
    hiddens = std::move(cur);
  }

  Vector out = output_static(hiddens);
  require(all_finite(out), Err::NonFinite, "step produced non-finite output");
  return out;
}

Vector OdernnRunner::step_driven(const Vector& input) {
  hist_.push(input);
  Vector y = compute_step(work_hiddens_);
  prev_hiddens_.swap(work_hiddens_);
  prev_output_ = y;
  ++step_index_;
  return y;
}

std::vector<Vector> OdernnRunner::run(const std::vector<Vector>& inputs) {
  reset();
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (const Vector& x : inputs) out.push_back(step_driven(x));
  return out;
}

std::vector<Vector> OdernnRunner::free_run(const Vector& y0, int steps) {
  reset();
  std::vector<Vector> traj;
  traj.reserve(size_t(steps) + 1);
  traj.push_back(y0);
  hist_.push(y0);
  for (int k = 0; k < steps; ++k) {
    Vector y = compute_step(work_hiddens_);
    prev_hiddens_.swap(work_hiddens_);
    prev_output_ = y;
    ++step_index_;
    traj.push_back(y);
    hist_.push(y);
  }
  return traj;
}

StepResult odernn_step(const OdeRnnConfig& cfg, const InputHistory& hist) {
  require(!cfg.is_dynamical(), Err::UnsupportedSpec,
          "single-step form serves static configs; dynamical mode needs the run loop");
  OdernnRunner runner(cfg);
  // Replay the visible window so the runner's internal history matches.
  std::vector<Vector> window;
  for (int d = std::min(hist.capacity(), hist.pushed()) - 1; d >= 0; --d)
    window.push_back(hist.lookback(d));
  StepResult res;
  for (size_t i = 0; i + 1 < window.size(); ++i) runner.step_driven(window[i]);
  if (!window.empty()) {
    res.y_next = runner.step_driven(window.back());
    res.hiddens = runner.last_hiddens();
  } else {
    res.y_next = Vector(size_t(cfg.state_dim), 0.0);
  }
  return res;
}

std::vector<Vector> odernn_run(const OdeRnnConfig& cfg, const std::vector<Vector>& inputs) {
  OdernnRunner runner(cfg);
  return runner.run(inputs);
}

std::vector<Vector> odernn_free_run(const OdeRnnConfig& cfg, const Vector& y0, int steps) {
  OdernnRunner runner(cfg);
  return runner.free_run(y0, steps);
}

OdeRnnConfig make_integrator_config(const Matrix& tableau_a, const Vector& tableau_e,
                                    const Matrix& w, const Vector& bias, double h, Act sigma) {
  require(w.square(), Err::DimMismatch, "integrator field matrix must be square");
  int n = tableau_a.rows;
  require(tableau_a.cols == n && int(tableau_e.size()) == n, Err::BadConfig,
          "tableau shape mismatch");
  int dim = w.rows;
  require(int(bias.size()) == dim, Err::DimMismatch, "field bias dim");

  OdeRnnConfig cfg;
  cfg.stages = n;
  cfg.memory = 1;
  cfg.state_dim = dim;
  cfg.hidden_dim = dim;
  cfg.h = h;
  cfg.coupling = Coupling::through_weights;
  cfg.W.assign(size_t(n) + 1, w);
  cfg.W[size_t(n)] = Matrix(dim, dim);
  cfg.b.assign(size_t(n) + 1, bias);
  cfg.b[size_t(n)] = Vector(size_t(dim), 0.0);
  cfg.alpha.assign(size_t(n), std::vector<Matrix>(size_t(n)));
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k)
      if (tableau_a(q, k) != 0.0) cfg.alpha[size_t(q)][size_t(k)] = Matrix::scalar(dim, tableau_a(q, k));
  cfg.beta.resize(size_t(n));
  for (int k = 0; k < n; ++k)
    if (tableau_e[size_t(k)] != 0.0) cfg.beta[size_t(k)] = Matrix::scalar(dim, tableau_e[size_t(k)]);
  cfg.gamma.assign(size_t(n) + 1, Matrix());
  cfg.gamma[size_t(n)] = Matrix::identity(dim);
  cfg.kappa.assign(size_t(n) + 1, Matrix());
  cfg.sigma.assign(size_t(n) + 1, StageFn(sigma));
  cfg.sigma[size_t(n)] = StageFn(Act::identity);
  return cfg;
}

LeapfrogState leapfrog_step(const Matrix& w, const Vector& b, double h, Act sigma,
                            const LeapfrogState& s) {
  require(w.square(), Err::DimMismatch, "leapfrog weight must be square");
  Vector zh = s.z_half;
  Vector pre = transpose(w) * s.y;
  for (size_t i = 0; i < pre.size(); ++i) zh[i] -= h * apply_act(sigma, pre[i] + b[i]);
  Vector y = s.y;
  Vector pre2 = w * zh;
  for (size_t i = 0; i < pre2.size(); ++i) y[i] += apply_act(sigma, pre2[i] + b[i]);
  return {y, zh};
}

LeapfrogState leapfrog_inverse(const Matrix& w, const Vector& b, double h, Act sigma,
                               const LeapfrogState& s) {
  Vector y = s.y;
  Vector pre2 = w * s.z_half;
  for (size_t i = 0; i < pre2.size(); ++i) y[i] -= apply_act(sigma, pre2[i] + b[i]);
  Vector zh = s.z_half;
  Vector pre = transpose(w) * y;
  for (size_t i = 0; i < pre.size(); ++i) zh[i] += h * apply_act(sigma, pre[i] + b[i]);
  return {y, zh};
}

}  // namespace odelab
