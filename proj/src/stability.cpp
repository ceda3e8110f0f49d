#include "odelab/stability.hpp"

#include <algorithm>
#include <cmath>

#include "odelab/eig.hpp"

namespace odelab {

namespace {

// Resolves the empty-means-zero convention against an expected shape.
Matrix resolve_block(const Matrix& m, int p, const char* what) {
  if (m.empty()) return Matrix(p, p);
  require(m.rows == p && m.cols == p, Err::DimMismatch, std::string(what) + " block shape");
  return m;
}

Matrix sym_part(const Matrix& m) {
  Matrix s(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

}  // namespace

double BurrageButcherTensor::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < assembled.rows; ++i)
    for (int j = 0; j < i; ++j)
      worst = std::max(worst, std::abs(assembled(i, j) - assembled(j, i)));
  return worst;
}

BurrageButcherTensor burrage_butcher(const std::vector<std::vector<Matrix>>& alpha,
                                     const std::vector<Matrix>& beta) {
  const int n = int(beta.size());
  require(n >= 1, Err::DimMismatch, "empty tableau");
  require(int(alpha.size()) == n, Err::DimMismatch, "alpha rows vs beta length");
  for (const auto& row : alpha)
    require(int(row.size()) == n, Err::DimMismatch, "alpha must be n x n");

  // Block dimension from the first nonempty block.
  int p = 0;
  for (const auto& bk : beta)
    if (!bk.empty()) p = bk.rows;
  if (p == 0) {
    for (const auto& row : alpha)
      for (const auto& blk : row)
        if (!blk.empty()) p = blk.rows;
  }
  require(p > 0, Err::DimMismatch, "all blocks empty, block dimension unknown");

  std::vector<Matrix> bt(size_t(n), Matrix{});
  std::vector<std::vector<Matrix>> at(size_t(n), std::vector<Matrix>(size_t(n), Matrix{}));
  for (int i = 0; i < n; ++i) bt[size_t(i)] = resolve_block(beta[size_t(i)], p, "beta");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      at[size_t(i)][size_t(j)] = resolve_block(alpha[size_t(i)][size_t(j)], p, "alpha");

  BurrageButcherTensor t;
  t.stages = n;
  t.block_dim = p;
  t.blocks.assign(size_t(n), std::vector<Matrix>(size_t(n)));
  t.assembled = Matrix(n * p, n * p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Matrix q = bt[size_t(i)] * at[size_t(i)][size_t(j)] + bt[size_t(j)] * at[size_t(j)][size_t(i)] -
                 bt[size_t(i)] * transpose(bt[size_t(j)]);
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) t.assembled(i * p + r, j * p + c) = q(r, c);
      t.blocks[size_t(i)][size_t(j)] = std::move(q);
    }
  }
  return t;
}

StabilityReport certify_bn_stability(const OdeRnnConfig& cfg, double tol) {
  cfg.validate();
  require(!cfg.is_dynamical(), Err::UnsupportedSpec, "certificate requires a static tableau");
  const int n = cfg.stages;
  const int p = cfg.hidden_dim;
  require(cfg.state_dim == p || cfg.coupling == Coupling::direct, Err::DimMismatch,
          "through_weights certificate needs square stage blocks (state_dim == hidden_dim)");

  // Under through_weights the stored blocks are s x p; squareness was just
  // checked, so both couplings reduce to p x p blocks here.
  std::vector<std::vector<Matrix>> alpha(size_t(n), std::vector<Matrix>(size_t(n), Matrix{}));
  std::vector<Matrix> beta(size_t(n), Matrix{});
  for (int q = 0; q < n; ++q) {
    beta[size_t(q)] = resolve_block(q < int(cfg.beta.size()) ? cfg.beta[size_t(q)] : Matrix(), p, "beta");
    for (int k = 0; k < n; ++k) {
      const Matrix* blk = nullptr;
      if (q < int(cfg.alpha.size()) && k < int(cfg.alpha[size_t(q)].size()))
        blk = &cfg.alpha[size_t(q)][size_t(k)];
      alpha[size_t(q)][size_t(k)] = resolve_block(blk ? *blk : Matrix(), p, "alpha");
    }
  }

  BurrageButcherTensor t = burrage_butcher(alpha, beta);
  StabilityReport rep;
  Matrix qs = sym_part(t.assembled);
  rep.min_eig_q = min_eigenvalue(qs);
  rep.q_psd = is_psd(qs, tol);
  rep.betas_psd.resize(size_t(n));
  bool all_b = true;
  for (int k = 0; k < n; ++k) {
    bool ok = is_psd(sym_part(beta[size_t(k)]), tol);
    rep.betas_psd[size_t(k)] = ok;
    all_b = all_b && ok;
  }
  rep.certified = rep.q_psd && all_b;
  return rep;
}

PerturbationTrace perturbation_probe(const OdeRnnConfig& cfg, const Vector& start,
                                     const Vector& delta0, int steps, double step_tol) {
  require(int(start.size()) == cfg.state_dim, Err::DimMismatch, "start dim");
  require(delta0.size() == start.size(), Err::DimMismatch, "delta0 dim");
  require(steps >= 1, Err::BadConfig, "probe needs at least one step");

  OdernnRunner runner(cfg);
  std::vector<Vector> base = runner.free_run(start, steps);
  std::vector<Vector> twin = runner.free_run(vec_add(start, delta0), steps);

  PerturbationTrace trace;
  trace.deviation.resize(base.size());
  for (size_t k = 0; k < base.size(); ++k)
    trace.deviation[k] = norm2(vec_sub(base[k], twin[k]));

  const double d0 = trace.deviation[0];
  for (size_t k = 0; k < trace.deviation.size(); ++k) {
    double ratio = d0 > 0.0 ? trace.deviation[k] / d0 : 0.0;
    if (ratio > trace.max_ratio) {
      trace.max_ratio = ratio;
      trace.worst_step = int(k);
    }
    if (k > 0 && trace.deviation[k] > trace.deviation[k - 1] + step_tol) trace.amplified = true;
  }
  return trace;
}

StabilityReport analyze_stability(const OdeRnnConfig& cfg, const ProbePlan& plan,
                                  PerturbationTrace* worst, double tol) {
  StabilityReport rep = certify_bn_stability(cfg, tol);
  Rng rng(plan.rng_seed);
  for (int s = 0; s < plan.seeds; ++s) {
    Vector start = rng.gauss_vector(cfg.state_dim);
    Vector delta = vec_scale(plan.delta_norm, rng.unit_vector(cfg.state_dim));
    PerturbationTrace trace = perturbation_probe(cfg, start, delta, plan.steps, plan.step_tol);
    if (trace.max_ratio > rep.empirical_max_growth || rep.probes_run == 0) {
      rep.empirical_max_growth = trace.max_ratio;
      if (worst) *worst = trace;
    }
    ++rep.probes_run;
  }
  return rep;
}

bool monotone_field_check(const OdeField& f, int dim, int samples, uint64_t rng_seed,
                          double tol) {
  require(dim >= 1, Err::BadConfig, "field dimension");
  require(samples >= 1, Err::BadConfig, "at least one sample");
  Rng rng(rng_seed);
  for (int i = 0; i < samples; ++i) {
    Vector x = vec_scale(2.0, rng.gauss_vector(dim));
    Vector y = vec_scale(2.0, rng.gauss_vector(dim));
    double t = rng.uniform(0.0, 2.0);
    Vector gap = vec_sub(f(x, t), f(y, t));
    if (dot(gap, vec_sub(x, y)) > tol) return false;
  }
  return true;
}

void random_certified_tableau(int stages, Rng& rng, Matrix& a_out, Vector& e_out) {
  require(stages >= 1, Err::BadConfig, "stage count");
  const int n = stages;
  e_out.assign(size_t(n), 0.0);
  for (int k = 0; k < n; ++k) e_out[size_t(k)] = rng.uniform(0.3, 1.0);

  // M = G^T G is PSD; the scale keeps the resulting a entries moderate so
  // damped fixed-point stage solves stay contractive at small h.
  Matrix g = rng.gauss_matrix(n, n, 0.3 / std::sqrt(double(n)));
  Matrix m = transpose(g) * g;
  Matrix s = rng.random_skew(n, 0.2);

  a_out = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a_out(i, j) = ((m(i, j) + e_out[size_t(i)] * e_out[size_t(j)]) / 2.0 + s(i, j)) /
                    e_out[size_t(i)];
}

OdeRnnConfig make_certified_config(int stages, int dim, double h, DissipativeKind kind,
                                   uint64_t seed) {
  Rng rng(seed);
  Matrix a;
  Vector e;
  random_certified_tableau(stages, rng, a, e);

  Matrix w;
  Act sigma = Act::identity;
  if (kind == DissipativeKind::linear_skew_shift) {
    double c = rng.uniform(0.5, 1.5);
    w = rng.random_skew(dim, 0.4) - Matrix::scalar(dim, c);
  } else {
    sigma = Act::tanh_fn;
    w = Matrix(dim, dim);
    for (int i = 0; i < dim; ++i) w(i, i) = -rng.uniform(0.5, 1.5);
  }
  Vector bias = rng.gauss_vector(dim);
  for (double& v : bias) v *= 0.3;
  return make_integrator_config(a, e, w, bias, h, sigma);
}

}  // namespace odelab
