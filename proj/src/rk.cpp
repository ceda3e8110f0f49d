#include "odelab/rk.hpp"

#include <cmath>
#include <limits>

namespace odelab {

bool RkScheme::is_explicit() const {
  for (int q = 0; q < stages; ++q)
    for (int k = q; k < stages; ++k)
      if (a(q, k) != 0.0) return false;
  return true;
}

void RkScheme::validate() const {
  require(stages >= 1, Err::BadConfig, "scheme needs at least one stage");
  require(a.rows == stages && a.cols == stages, Err::BadConfig, "stage matrix shape");
  require(int(e.size()) == stages, Err::BadConfig, "weight vector length");
  require(int(c.size()) == stages, Err::BadConfig, "abscissa vector length");
  require(int(d.size()) == stages, Err::BadConfig, "state-scale vector length");
  require(std::isfinite(delta) && delta != 0.0, Err::BadConfig, "step size must be finite and nonzero");
}

std::vector<Vector> rk_integrate(const RkScheme& scheme, const OdeField& f, const Vector& y0,
                                 int steps, double t0) {
  scheme.validate();
  require(steps >= 0, Err::BadConfig, "step count negative");
  int n = scheme.stages;
  size_t dim = y0.size();
  bool expl = scheme.is_explicit();

  std::vector<Vector> traj;
  traj.reserve(size_t(steps) + 1);
  traj.push_back(y0);
  Vector y = y0;
  std::vector<Vector> k(size_t(n), Vector(dim, 0.0));
  Vector ystage(dim, 0.0);

  auto stage_state = [&](int q, const std::vector<Vector>& ks) {
    for (size_t i = 0; i < dim; ++i) ystage[i] = scheme.d[size_t(q)] * y[i];
    for (int j = 0; j < n; ++j) {
      double aqj = scheme.a(q, j);
      if (aqj == 0.0) continue;
      for (size_t i = 0; i < dim; ++i) ystage[i] += scheme.delta * aqj * ks[size_t(j)][i];
    }
  };

  for (int step = 0; step < steps; ++step) {
    double t = t0 + scheme.delta * step;
    if (expl) {
      for (int q = 0; q < n; ++q) {
        stage_state(q, k);
        k[size_t(q)] = f(ystage, t + scheme.c[size_t(q)] * scheme.delta);
      }
    } else {
      // Damped fixed-point iteration across all stage slopes jointly.
      for (int q = 0; q < n; ++q) {
        for (size_t i = 0; i < dim; ++i) ystage[i] = scheme.d[size_t(q)] * y[i];
        k[size_t(q)] = f(ystage, t + scheme.c[size_t(q)] * scheme.delta);
      }
      const double damping = 0.5;
      const double tol = 1e-12;
      const double polish = 5e-16;
      const int cap = 100;
      std::vector<Vector> next(size_t(n), Vector(dim, 0.0));
      bool converged = false;
      double prev_delta = std::numeric_limits<double>::infinity();
      for (int it = 0; it < cap; ++it) {
        for (int q = 0; q < n; ++q) {
          stage_state(q, k);
          next[size_t(q)] = f(ystage, t + scheme.c[size_t(q)] * scheme.delta);
        }
        double delta_max = 0.0, scale = 0.0;
        for (int q = 0; q < n; ++q)
          for (size_t i = 0; i < dim; ++i) {
            double blended = (1.0 - damping) * k[size_t(q)][i] + damping * next[size_t(q)][i];
            delta_max = std::max(delta_max, std::fabs(blended - k[size_t(q)][i]));
            scale = std::max(scale, std::fabs(blended));
            k[size_t(q)][i] = blended;
          }
        if (delta_max <= tol * (1.0 + scale)) {
          converged = true;
          if (delta_max <= polish * (1.0 + scale) || delta_max >= prev_delta) break;
        }
        prev_delta = delta_max;
      }
      require(converged, Err::ImplicitNoConvergence,
              "implicit slope iteration exhausted 100 damped sweeps");
    }
    for (int q = 0; q < n; ++q) {
      double w = scheme.e[size_t(q)];
      if (w == 0.0) continue;
      for (size_t i = 0; i < dim; ++i) y[i] += scheme.delta * w * k[size_t(q)][i];
    }
    require(all_finite(y), Err::NonFinite, "integration produced non-finite state");
    traj.push_back(y);
  }
  return traj;
}

namespace {

RkScheme finish(Matrix a, Vector e, double delta) {
  RkScheme s;
  s.stages = a.rows;
  s.a = std::move(a);
  s.e = std::move(e);
  s.c.assign(size_t(s.stages), 0.0);
  for (int q = 0; q < s.stages; ++q)
    for (int j = 0; j < s.stages; ++j) s.c[size_t(q)] += s.a(q, j);
  s.d.assign(size_t(s.stages), 1.0);
  s.delta = delta;
  return s;
}

}  // namespace

RkScheme rk_euler(double delta) { return finish(Matrix(1, 1), Vector{1.0}, delta); }

RkScheme rk_midpoint_explicit(double delta) {
  Matrix a(2, 2);
  a(1, 0) = 0.5;
  return finish(std::move(a), Vector{0.0, 1.0}, delta);
}

RkScheme rk4_classic(double delta) {
  Matrix a(4, 4);
  a(1, 0) = 0.5;
  a(2, 1) = 0.5;
  a(3, 2) = 1.0;
  return finish(std::move(a), Vector{1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}, delta);
}

RkScheme rk_implicit_midpoint(double delta) {
  Matrix a(1, 1);
  a(0, 0) = 0.5;
  return finish(std::move(a), Vector{1.0}, delta);
}

RkScheme rk_gauss2(double delta) {
  double r = std::sqrt(3.0) / 6.0;
  Matrix a(2, 2);
  a(0, 0) = 0.25;
  a(0, 1) = 0.25 - r;
  a(1, 0) = 0.25 + r;
  a(1, 1) = 0.25;
  return finish(std::move(a), Vector{0.5, 0.5}, delta);
}

RkScheme rk_named(const std::string& name, double delta) {
  if (name == "euler") return rk_euler(delta);
  if (name == "midpoint") return rk_midpoint_explicit(delta);
  if (name == "rk4") return rk4_classic(delta);
  if (name == "implicit_midpoint") return rk_implicit_midpoint(delta);
  if (name == "gauss2") return rk_gauss2(delta);
  fail(Err::BadConfig, "unknown scheme name: " + name);
}

namespace {

// Fit blk as scale * ref in Frobenius inner product; false when the residual is visible.
bool scalar_multiple(const Matrix& blk, const Matrix& ref, double& scale) {
  double num = 0.0, den = 0.0, blk_norm = 0.0;
  for (size_t i = 0; i < blk.data.size(); ++i) {
    num += blk.data[i] * ref.data[i];
    den += ref.data[i] * ref.data[i];
    blk_norm = std::max(blk_norm, std::fabs(blk.data[i]));
  }
  if (den == 0.0) {
    scale = 0.0;
    return blk_norm == 0.0;
  }
  scale = num / den;
  for (size_t i = 0; i < blk.data.size(); ++i)
    if (std::fabs(blk.data[i] - scale * ref.data[i]) > 1e-12 * std::max(1.0, blk_norm))
      return false;
  return true;
}

bool scalar_identity(const Matrix& blk, double& scale) {
  scale = blk.rows > 0 ? blk(0, 0) : 0.0;
  for (int i = 0; i < blk.rows; ++i)
    for (int j = 0; j < blk.cols; ++j) {
      double want = i == j ? scale : 0.0;
      if (std::fabs(blk(i, j) - want) > 1e-12 * std::max(1.0, std::fabs(scale))) return false;
    }
  return true;
}

}  // namespace

RkScheme odernn_as_rk(const OdeRnnConfig& cfg) {
  require(!cfg.is_dynamical(), Err::NotReducible, "dynamical weights have no fixed scheme");
  cfg.validate();
  int n = cfg.stages;
  require(cfg.state_dim == cfg.hidden_dim, Err::NotReducible,
          "stage and state spaces differ in size");
  for (int q = 0; q <= n; ++q)
    require(!cfg.sigma[size_t(q)].is_custom() && cfg.sigma[size_t(q)].is_identity(),
            Err::NotReducible, "nonlinear stage map has no tableau");
  for (int q = 1; q < n; ++q) {
    require(cfg.gamma[size_t(q)].empty() || is_zero(cfg.gamma[size_t(q)]), Err::NotReducible,
            "hidden carry breaks slope form");
    const Matrix& k = cfg.kappa[size_t(q)];
    bool ident = k.empty();
    if (!ident) {
      double s = 0.0;
      ident = scalar_identity(k, s) && std::fabs(s - 1.0) <= 1e-12;
    }
    require(ident, Err::NotReducible, "hidden scale breaks slope form");
  }
  {
    const Matrix& g = cfg.gamma[size_t(n)];
    double s = 0.0;
    require(!g.empty() && scalar_identity(g, s) && std::fabs(s - 1.0) <= 1e-12, Err::NotReducible,
            "output must carry the previous state once");
    const Matrix& k = cfg.kappa[size_t(n)];
    bool ident = k.empty();
    if (!ident) ident = scalar_identity(k, s) && std::fabs(s - 1.0) <= 1e-12;
    require(ident, Err::NotReducible, "output scale breaks update form");
  }
  const Matrix& w = cfg.W[0];
  const Vector& bias = cfg.b[0];
  double wscale = max_abs(w);
  for (int q = 1; q < n; ++q) {
    require(max_abs(cfg.W[size_t(q)] - w) <= 1e-12 * std::max(1.0, wscale), Err::NotReducible,
            "stages see different fields");
    for (size_t i = 0; i < bias.size(); ++i)
      require(std::fabs(cfg.b[size_t(q)][i] - bias[i]) <= 1e-12, Err::NotReducible,
              "stages see different fields");
  }
  require(is_zero(cfg.W[size_t(n)]) && max_abs(cfg.b[size_t(n)]) == 0.0, Err::NotReducible,
          "output injects an extra affine term");
  for (int q = 0; q < n; ++q)
    require(cfg.delay(q) == 0, Err::NotReducible, "delayed history breaks one-step form");

  Matrix a(n, n);
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) {
      const Matrix& blk = cfg.alpha[size_t(q)][size_t(k)];
      if (blk.empty() || is_zero(blk)) continue;
      double s = 0.0;
      if (cfg.coupling == Coupling::through_weights) {
        require(scalar_identity(blk, s), Err::NotReducible, "stage coupling is not scalar");
      } else {
        // Direct coupling realizes a tableau when each block is a * W.
        require(scalar_multiple(blk, w, s), Err::NotReducible,
                "stage coupling is not a field multiple");
      }
      a(q, k) = s;
    }
  Vector e(size_t(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const Matrix& blk = cfg.beta[size_t(k)];
    if (blk.empty() || is_zero(blk)) continue;
    double s = 0.0;
    require(scalar_identity(blk, s), Err::NotReducible, "output weights are not scalar");
    e[size_t(k)] = s;
  }
  RkScheme s = finish(std::move(a), std::move(e), cfg.h);
  return s;
}

}  // namespace odelab
