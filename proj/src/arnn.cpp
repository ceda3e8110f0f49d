#include "odelab/arnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odelab/eig.hpp"

namespace odelab {

namespace {

const StageFn kIdentity{};

Vector field(const ArnnConfig& cfg, const Matrix& w, const Vector& u) {
  return cfg.activation()(vec_add(w * u, cfg.bias()));
}

}  // namespace

const StageFn& ArnnConfig::activation() const {
  return base.sigma.empty() ? kIdentity : base.sigma[0];
}

Vector ArnnConfig::bias() const {
  if (base.b.empty() || base.b[0].empty()) return zeros(base.state_dim);
  return base.b[0];
}

Matrix ArnnConfig::weight(size_t idx) const {
  require(idx < skew_params.size(), Err::OutOfRange, "weight index");
  return make_skew(skew_params[idx], base.state_dim);
}

void ArnnConfig::validate() const {
  require(base.state_dim >= 1, Err::BadConfig, "state dimension");
  require(std::isfinite(base.h) && base.h != 0.0, Err::BadConfig, "step size");
  require(!skew_params.empty(), Err::BadConfig, "at least one skew weight");
  const int n = base.state_dim;
  for (const Vector& p : skew_params)
    require(int(p.size()) == n * (n - 1) / 2, Err::DimMismatch,
            "skew parameter count must be dim*(dim-1)/2");
  if (!base.b.empty() && !base.b[0].empty())
    require(int(base.b[0].size()) == n, Err::DimMismatch, "bias length");
}

ArnnConfig make_arnn_config(int dim, double h, const Vector& skew_params, Act sigma,
                            Vector bias, ArnnIntegrator integrator) {
  ArnnConfig cfg;
  cfg.base.stages = 1;
  cfg.base.memory = 1;
  cfg.base.state_dim = dim;
  cfg.base.hidden_dim = dim;
  cfg.base.h = h;
  cfg.base.coupling = Coupling::through_weights;
  cfg.base.W = {make_skew(skew_params, dim), Matrix(dim, dim)};
  cfg.base.b = {bias.empty() ? zeros(dim) : std::move(bias), zeros(dim)};
  cfg.base.alpha = {{Matrix()}};
  cfg.base.beta = {Matrix::identity(dim)};
  cfg.base.gamma = {Matrix(), Matrix::identity(dim)};
  cfg.base.kappa.assign(2, Matrix());
  cfg.base.sigma = {StageFn(sigma), StageFn(Act::identity)};
  cfg.skew_params = {skew_params};
  cfg.integrator = integrator;
  cfg.validate();
  return cfg;
}

Matrix make_skew(const Vector& params, int dim) {
  require(dim >= 1, Err::DimMismatch, "dimension");
  require(int(params.size()) == dim * (dim - 1) / 2, Err::DimMismatch,
          "free parameter count must be dim*(dim-1)/2");
  Matrix w(dim, dim);
  size_t idx = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      w(i, j) = params[idx];
      w(j, i) = -params[idx];
      ++idx;
    }
  }
  return w;
}

bool spectral_step_bound(const Matrix& w, double h) {
  return h * skew_spectral_radius(w) < 1.0;
}

ArnnState arnn_step_1_2(const ArnnConfig& cfg, const ArnnState& s) {
  cfg.validate();
  require(int(s.y.size()) == cfg.dim() && int(s.z.size()) == cfg.dim(), Err::DimMismatch,
          "state pair dims");
  const Matrix w = cfg.weight();
  const Matrix wt = transpose(w);
  const double h = cfg.h();
  ArnnState out;
  out.z = vec_sub(s.z, vec_scale(h, field(cfg, wt, s.y)));
  out.y = vec_add(s.y, vec_scale(h, field(cfg, w, out.z)));
  return out;
}

ArnnState arnn_inverse_1_2(const ArnnConfig& cfg, const ArnnState& s) {
  cfg.validate();
  require(int(s.y.size()) == cfg.dim() && int(s.z.size()) == cfg.dim(), Err::DimMismatch,
          "state pair dims");
  const Matrix w = cfg.weight();
  const Matrix wt = transpose(w);
  const double h = cfg.h();
  ArnnState out;
  out.y = vec_sub(s.y, vec_scale(h, field(cfg, w, s.z)));
  out.z = vec_add(s.z, vec_scale(h, field(cfg, wt, out.y)));
  return out;
}

namespace {

// Midpoint update with the given signed step: y' = y + g sigma(W (y+y')/2 + b).
Vector midpoint_solve(const ArnnConfig& cfg, const Vector& y, double g) {
  const int n = cfg.dim();
  const Matrix w = cfg.weight();
  if (cfg.activation().is_identity()) {
    // (I - g W / 2) y' = (I + g W / 2) y + g b, solved exactly.
    Matrix lhs = Matrix::identity(n) - (g / 2.0) * w;
    Vector rhs = vec_add(vec_add(y, vec_scale(g / 2.0, w * y)), vec_scale(g, cfg.bias()));
    return solve(std::move(lhs), std::move(rhs));
  }

  const double damping = 0.5;
  const double tol = 1e-12;
  const double polish = 5e-16;
  const int cap = 100;
  Vector yp = y;
  Vector mid(size_t(n), 0.0);
  bool converged = false;
  double prev_delta = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cap; ++it) {
    for (int i = 0; i < n; ++i) mid[size_t(i)] = 0.5 * (y[size_t(i)] + yp[size_t(i)]);
    Vector next = vec_add(y, vec_scale(g, field(cfg, w, mid)));
    double delta_max = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      double blended = (1.0 - damping) * yp[size_t(i)] + damping * next[size_t(i)];
      delta_max = std::max(delta_max, std::fabs(blended - yp[size_t(i)]));
      scale = std::max(scale, std::fabs(blended));
      yp[size_t(i)] = blended;
    }
    if (delta_max <= tol * (1.0 + scale)) {
      converged = true;
      if (delta_max <= polish * (1.0 + scale) || delta_max >= prev_delta) break;
    }
    prev_delta = delta_max;
  }
  require(converged, Err::ImplicitNoConvergence, "midpoint iteration exhausted 100 damped sweeps");
  return yp;
}

}  // namespace

Vector arnn_step_2_2(const ArnnConfig& cfg, const Vector& y) {
  cfg.validate();
  require(int(y.size()) == cfg.dim(), Err::DimMismatch, "state dim");
  return midpoint_solve(cfg, y, cfg.h());
}

Vector arnn_inverse_2_2(const ArnnConfig& cfg, const Vector& y) {
  cfg.validate();
  require(int(y.size()) == cfg.dim(), Err::DimMismatch, "state dim");
  // The midpoint rule is self-adjoint: stepping backward is the same solve
  // with the step negated.
  return midpoint_solve(cfg, y, -cfg.h());
}

namespace {

template <class State, class Diff>
ReversibilityResult unwind(const std::function<State(const State&)>& step_fn,
                           const std::function<State(const State&)>& inverse_fn,
                           const State& state, int steps, double tol, Diff diff) {
  require(steps >= 0, Err::BadConfig, "step count");
  std::vector<State> forward;
  forward.reserve(size_t(steps) + 1);
  forward.push_back(state);
  for (int k = 0; k < steps; ++k) forward.push_back(step_fn(forward.back()));

  ReversibilityResult res;
  State current = forward.back();
  for (int k = steps - 1; k >= 0; --k) {
    current = inverse_fn(current);
    res.max_error = std::max(res.max_error, diff(current, forward[size_t(k)]));
  }
  res.reversible = res.max_error <= tol;
  return res;
}

}  // namespace

ReversibilityResult reversibility_check(const std::function<Vector(const Vector&)>& step_fn,
                                        const std::function<Vector(const Vector&)>& inverse_fn,
                                        const Vector& state, int steps, double tol) {
  return unwind<Vector>(step_fn, inverse_fn, state, steps, tol,
                        [](const Vector& a, const Vector& b) { return norm2(vec_sub(a, b)); });
}

ReversibilityResult reversibility_check(
    const std::function<ArnnState(const ArnnState&)>& step_fn,
    const std::function<ArnnState(const ArnnState&)>& inverse_fn, const ArnnState& state,
    int steps, double tol) {
  return unwind<ArnnState>(step_fn, inverse_fn, state, steps, tol,
                           [](const ArnnState& a, const ArnnState& b) {
                             return std::hypot(norm2(vec_sub(a.y, b.y)), norm2(vec_sub(a.z, b.z)));
                           });
}

}  // namespace odelab
