#include "doctest.h"
#include "odelab/eig.hpp"
#include "odelab/stability.hpp"

#include <cmath>

using namespace odelab;

namespace {

// Scalar tableau as 1x1 blocks.
BurrageButcherTensor scalar_tensor(const std::vector<std::vector<double>>& a,
                                   const std::vector<double>& b) {
  const size_t n = b.size();
  std::vector<std::vector<Matrix>> alpha(n, std::vector<Matrix>(n));
  std::vector<Matrix> beta(n);
  for (size_t i = 0; i < n; ++i) {
    beta[i] = Matrix::scalar(1, b[i]);
    for (size_t j = 0; j < n; ++j) alpha[i][j] = Matrix::scalar(1, a[i][j]);
  }
  return burrage_butcher(alpha, beta);
}

OdeRnnConfig scalar_integrator(const RkScheme& s, double field_w) {
  return make_integrator_config(s.a, s.e, Matrix::scalar(1, field_w), Vector{0.0}, s.delta);
}

}  // namespace

TEST_CASE("explicit Euler tableau scores -1") {
  // n=1, a11=0, b1=1: Q11 = 1*0 + 1*0 - 1*1 = -1.
  BurrageButcherTensor t = scalar_tensor({{0.0}}, {1.0});
  REQUIRE(t.stages == 1);
  REQUIRE(t.assembled.rows == 1);
  CHECK(std::fabs(t.assembled(0, 0) - (-1.0)) <= 1e-12);
}

TEST_CASE("implicit midpoint tableau scores exactly zero") {
  // n=1, a11=1/2, b1=1: Q11 = 1/2 + 1/2 - 1 = 0.
  BurrageButcherTensor t = scalar_tensor({{0.5}}, {1.0});
  CHECK(std::fabs(t.assembled(0, 0)) <= 1e-12);
}

TEST_CASE("two-stage Gauss tableau has a vanishing tensor") {
  // Hand substitution: Q11 = 2*(1/2)(1/4) - 1/4 = 0, Q22 likewise, and
  // Q12 = (1/2)(1/4 - r) + (1/2)(1/4 + r) - 1/4 = 0 for any r. Gauss
  // collocation sits exactly on the boundary of the stability condition.
  double r = std::sqrt(3.0) / 6.0;
  BurrageButcherTensor t =
      scalar_tensor({{0.25, 0.25 - r}, {0.25 + r, 0.25}}, {0.5, 0.5});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::fabs(t.assembled(i, j)) <= 1e-15);
}

TEST_CASE("classic explicit fourth-order tableau is not algebraically stable") {
  // First diagonal entry: 2 b1 a11 - b1^2 = -1/36.
  std::vector<std::vector<double>> a = {{0, 0, 0, 0},
                                        {0.5, 0, 0, 0},
                                        {0, 0.5, 0, 0},
                                        {0, 0, 1.0, 0}};
  std::vector<double> b = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  BurrageButcherTensor t = scalar_tensor(a, b);
  CHECK(t.assembled(0, 0) == doctest::Approx(-1.0 / 36).epsilon(1e-12));
  CHECK_FALSE(is_psd(t.assembled, 1e-10));
}

TEST_CASE("zero quadrature weights zero the whole tensor") {
  std::vector<std::vector<Matrix>> alpha(2, std::vector<Matrix>(2, Matrix::scalar(3, 0.7)));
  std::vector<Matrix> beta(2, Matrix(3, 3));  // explicit zeros
  BurrageButcherTensor t = burrage_butcher(alpha, beta);
  CHECK(max_abs(t.assembled) == 0.0);
}

TEST_CASE("empty blocks mean zero blocks") {
  // beta left empty entirely: every term carries a beta factor.
  std::vector<std::vector<Matrix>> alpha(2, std::vector<Matrix>(2, Matrix::scalar(2, 0.3)));
  std::vector<Matrix> beta(2);
  BurrageButcherTensor t = burrage_butcher(alpha, beta);
  CHECK(t.block_dim == 2);
  CHECK(max_abs(t.assembled) == 0.0);
}

TEST_CASE("blocks follow the defining formula entry by entry") {
  // Independent straight-line evaluation of
  //   Q_{ij} = b_i a_{ij} + b_j a_{ji} - b_i b_j^T
  // on a random 2-stage, 2-dim tableau, checked against the assembly.
  Rng rng(404);
  std::vector<std::vector<Matrix>> alpha(2, std::vector<Matrix>(2));
  std::vector<Matrix> beta(2);
  for (int i = 0; i < 2; ++i) {
    beta[size_t(i)] = rng.gauss_matrix(2, 2);
    for (int j = 0; j < 2; ++j) alpha[size_t(i)][size_t(j)] = rng.gauss_matrix(2, 2);
  }
  BurrageButcherTensor t = burrage_butcher(alpha, beta);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          double want = 0.0;
          for (int m = 0; m < 2; ++m) {
            want += beta[size_t(i)](r, m) * alpha[size_t(i)][size_t(j)](m, c);
            want += beta[size_t(j)](r, m) * alpha[size_t(j)][size_t(i)](m, c);
            want -= beta[size_t(i)](r, m) * beta[size_t(j)](c, m);
          }
          CHECK(t.blocks[size_t(i)][size_t(j)](r, c) == doctest::Approx(want).epsilon(1e-14));
          CHECK(t.assembled(i * 2 + r, j * 2 + c) == t.blocks[size_t(i)][size_t(j)](r, c));
        }
      }
    }
  }
}

TEST_CASE("block transpose symmetry holds when stage products are symmetric") {
  // beta_i = b_i S with S symmetric and alpha_{ij} = a_{ij} I makes every
  // product beta_i alpha_{ij} symmetric, so Q_{ij} = Q_{ji}^T exactly.
  Matrix s(2, 2);
  s(0, 0) = 1.3; s(0, 1) = -0.4; s(1, 0) = -0.4; s(1, 1) = 0.8;
  Rng rng(77);
  std::vector<std::vector<Matrix>> alpha(3, std::vector<Matrix>(3));
  std::vector<Matrix> beta(3);
  for (int i = 0; i < 3; ++i) {
    beta[size_t(i)] = rng.uniform(0.2, 1.0) * s;
    for (int j = 0; j < 3; ++j)
      alpha[size_t(i)][size_t(j)] = Matrix::scalar(2, rng.gauss());
  }
  BurrageButcherTensor t = burrage_butcher(alpha, beta);
  CHECK(t.asymmetry() <= 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(max_abs(t.blocks[size_t(i)][size_t(j)] - transpose(t.blocks[size_t(j)][size_t(i)])) <=
            1e-12);
}

TEST_CASE("tensor construction rejects ragged and unknowable inputs") {
  CHECK_THROWS_AS(burrage_butcher({}, {}), Error);
  CHECK_THROWS_AS(burrage_butcher({{Matrix::scalar(1, 0.5)}}, {Matrix::scalar(1, 1.0), Matrix::scalar(1, 1.0)}),
                  Error);
  // All-empty blocks: no way to infer the block dimension.
  CHECK_THROWS_AS(burrage_butcher({{Matrix()}}, {Matrix()}), Error);
  // Mismatched block shapes.
  CHECK_THROWS_AS(burrage_butcher({{Matrix::scalar(2, 0.5)}}, {Matrix::scalar(3, 1.0)}), Error);
}

TEST_CASE("certificate accepts implicit midpoint and rejects explicit Euler") {
  OdeRnnConfig mid = scalar_integrator(rk_implicit_midpoint(0.1), -1.0);
  StabilityReport rm = certify_bn_stability(mid);
  CHECK(rm.certified);
  CHECK(rm.q_psd);
  REQUIRE(rm.betas_psd.size() == 1);
  CHECK(bool(rm.betas_psd[0]));
  CHECK(std::fabs(rm.min_eig_q) <= 1e-12);

  OdeRnnConfig eul = scalar_integrator(rk_euler(0.1), -1.0);
  StabilityReport re = certify_bn_stability(eul);
  CHECK_FALSE(re.certified);
  CHECK_FALSE(re.q_psd);
  CHECK(re.min_eig_q == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(bool(re.betas_psd[0]));  // the weight itself is fine, the tensor is not
}

TEST_CASE("a negative quadrature weight breaks the certificate") {
  OdeRnnConfig cfg = scalar_integrator(rk_implicit_midpoint(0.1), -1.0);
  cfg.beta[0] = Matrix::scalar(1, -1.0);
  StabilityReport rep = certify_bn_stability(cfg);
  CHECK_FALSE(rep.certified);
  CHECK_FALSE(bool(rep.betas_psd[0]));
}

TEST_CASE("certificate is deterministic call for call") {
  OdeRnnConfig cfg = make_certified_config(3, 4, 0.05, DissipativeKind::linear_skew_shift, 9);
  StabilityReport a = certify_bn_stability(cfg);
  StabilityReport b = certify_bn_stability(cfg);
  CHECK(a.certified == b.certified);
  CHECK(a.q_psd == b.q_psd);
  CHECK(a.min_eig_q == b.min_eig_q);  // bitwise
  CHECK(a.betas_psd == b.betas_psd);
}

TEST_CASE("certificate refuses dynamical configs") {
  OdeRnnConfig cfg = scalar_integrator(rk_euler(0.1), -1.0);
  cfg.dynamical = std::make_shared<DynamicalWeights>();
  CHECK_THROWS_AS(certify_bn_stability(cfg), Error);
}

TEST_CASE("zero perturbation gives an exactly zero trace") {
  OdeRnnConfig cfg = scalar_integrator(rk_implicit_midpoint(0.1), -1.0);
  PerturbationTrace t = perturbation_probe(cfg, Vector{1.0}, Vector{0.0}, 50);
  REQUIRE(t.deviation.size() == 51);
  for (double d : t.deviation) CHECK(d == 0.0);
  CHECK(t.max_ratio == 0.0);
  CHECK_FALSE(t.amplified);
}

TEST_CASE("certified midpoint never amplifies on a contractive linear field") {
  // W = skew - c I has negative-definite symmetric part, so the field is
  // monotone; the implicit midpoint twin separation must be non-increasing.
  Rng rng(11);
  Matrix w = rng.random_skew(4, 0.5) - Matrix::scalar(4, 0.8);
  RkScheme s = rk_implicit_midpoint(0.1);
  OdeRnnConfig cfg = make_integrator_config(s.a, s.e, w, zeros(4), s.delta);
  REQUIRE(certify_bn_stability(cfg).certified);

  Vector start = rng.gauss_vector(4);
  Vector delta = vec_scale(1e-4, rng.unit_vector(4));
  PerturbationTrace t = perturbation_probe(cfg, start, delta, 1000);
  CHECK(t.max_ratio <= 1.0 + 1e-9);
  CHECK_FALSE(t.amplified);
}

TEST_CASE("explicit Euler past the linear stability limit amplifies fast") {
  // dy/dt = -y at h = 2.5: each step multiplies the separation by
  // |1 + h lambda| = 1.5, so the ratio passes 10 by step 6.
  OdeRnnConfig cfg = scalar_integrator(rk_euler(2.5), -1.0);
  PerturbationTrace t = perturbation_probe(cfg, Vector{1.0}, Vector{0.01}, 20);
  CHECK(t.amplified);
  CHECK(t.max_ratio > 10.0);
  int first_past_10 = -1;
  for (size_t k = 0; k < t.deviation.size(); ++k) {
    if (t.deviation[k] / t.deviation[0] > 10.0) {
      first_past_10 = int(k);
      break;
    }
  }
  CHECK(first_past_10 == 6);  // 1.5^6 = 11.39
  CHECK(t.deviation[1] / t.deviation[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("monotone field check matches hand-picked fields") {
  OdeField contract = [](const Vector& y, double) { return vec_scale(-1.0, y); };
  OdeField expand = [](const Vector& y, double) { return y; };
  CHECK(monotone_field_check(contract, 3, 200, 5));
  CHECK_FALSE(monotone_field_check(expand, 3, 200, 5));

  Rng rng(21);
  Matrix s = rng.random_skew(4, 1.0);
  OdeField rotate = [&s](const Vector& y, double) { return s * y; };
  // Skew fields land exactly on the boundary: the inner product is zero up
  // to rounding, so both the field and its negation pass.
  CHECK(monotone_field_check(rotate, 4, 200, 5));
  OdeField rotate_back = [&s](const Vector& y, double) { return vec_scale(-1.0, s * y); };
  CHECK(monotone_field_check(rotate_back, 4, 200, 5));
}

TEST_CASE("random certified tableaus score PSD by construction") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + trial % 4;
    Matrix a;
    Vector e;
    random_certified_tableau(n, rng, a, e);
    std::vector<std::vector<double>> as(size_t(n), std::vector<double>(size_t(n), 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) as[size_t(i)][size_t(j)] = a(i, j);
    std::vector<double> bs(e.begin(), e.end());
    BurrageButcherTensor t = scalar_tensor(as, bs);
    CHECK(is_psd(t.assembled, 1e-10));
    CHECK(t.asymmetry() <= 1e-13);
  }
}

TEST_CASE("generated configs certify and their stage fields test monotone") {
  for (uint64_t seed : {1u, 2u, 3u}) {
    for (DissipativeKind kind :
         {DissipativeKind::linear_skew_shift, DissipativeKind::tanh_diagonal}) {
      OdeRnnConfig cfg = make_certified_config(2, 3, 0.02, kind, seed);
      CHECK(certify_bn_stability(cfg).certified);
      OdeField f = [&cfg](const Vector& u, double) {
        return cfg.sigma[0](vec_add(cfg.W[0] * u, cfg.b[0]));
      };
      CHECK(monotone_field_check(f, 3, 100, seed));
    }
  }
}

TEST_CASE("certified configs pass the twin-trajectory probe") {
  // Small version of the full sweep: both field families, implicit tableaus,
  // every step non-amplifying within 1e-6.
  for (uint64_t seed : {10u, 11u, 12u}) {
    OdeRnnConfig lin = make_certified_config(3, 3, 0.05, DissipativeKind::linear_skew_shift, seed);
    OdeRnnConfig sat = make_certified_config(2, 2, 0.01, DissipativeKind::tanh_diagonal, seed);
    for (const OdeRnnConfig* cfg : {&lin, &sat}) {
      ProbePlan plan;
      plan.steps = 300;
      plan.seeds = 3;
      plan.rng_seed = seed;
      PerturbationTrace worst;
      StabilityReport rep = analyze_stability(*cfg, plan, &worst);
      CHECK(rep.certified);
      CHECK(rep.probes_run == 3);
      CHECK(rep.empirical_max_growth <= 1.0 + 1e-6);
      REQUIRE(worst.deviation.size() == 301);
      CHECK_FALSE(worst.amplified);
    }
  }
}
