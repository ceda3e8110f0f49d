#include "doctest.h"
#include "odelab/odernn.hpp"
#include "odelab/rk.hpp"

#include <cmath>

using namespace odelab;

namespace {

// Global error at t=1 for dy/dt = -y, y(0) = 1, integrated with `steps` steps.
double exp_decay_error(const RkScheme& base, int steps) {
  RkScheme s = base;
  s.delta = 1.0 / steps;
  OdeField f = [](const Vector& y, double) { return Vector{-y[0]}; };
  std::vector<Vector> traj = rk_integrate(s, f, Vector{1.0}, steps);
  return std::fabs(traj.back()[0] - std::exp(-1.0));
}

// Least-squares slope of log(error) against log(delta).
double order_slope(const RkScheme& base) {
  std::vector<double> xs, ys;
  for (int steps : {10, 20, 40}) {
    xs.push_back(std::log(1.0 / steps));
    ys.push_back(std::log(exp_decay_error(base, steps)));
  }
  double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += (xs[size_t(i)] - mx) * (ys[size_t(i)] - my);
    den += (xs[size_t(i)] - mx) * (xs[size_t(i)] - mx);
  }
  return num / den;
}

}  // namespace

TEST_CASE("zero field gives a constant trajectory") {
  OdeField f = [](const Vector& y, double) { return zeros(int(y.size())); };
  std::vector<Vector> traj = rk_integrate(rk4_classic(0.5), f, Vector{1.0, -2.0}, 8);
  REQUIRE(traj.size() == 9);
  for (const Vector& y : traj) CHECK(y == Vector{1.0, -2.0});
}

TEST_CASE("classic fourth-order scheme hits the exponential benchmark") {
  // 10 steps of size 0.1 on dy/dt = -y from 1. The scheme applied to a linear
  // field multiplies by its stability polynomial R(-h) = 1 - h + h^2/2 - h^3/6
  // + h^4/24 each step, so the trajectory equals R(-0.1)^10 exactly, which
  // sits 3.35e-7 from e^{-1}.
  OdeField f = [](const Vector& y, double) { return Vector{-y[0]}; };
  std::vector<Vector> traj = rk_integrate(rk4_classic(0.1), f, Vector{1.0}, 10);
  double h = 0.1;
  double r = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
  CHECK(traj.back()[0] == doctest::Approx(std::pow(r, 10)).epsilon(1e-14));
  CHECK(std::fabs(traj.back()[0] - std::exp(-1.0)) <= 4e-7);
}

TEST_CASE("measured convergence orders match the schemes") {
  CHECK(order_slope(rk4_classic(1.0)) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(order_slope(rk_euler(1.0)) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(order_slope(rk_midpoint_explicit(1.0)) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order_slope(rk_gauss2(1.0)) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("implicit midpoint slope solve matches the closed form") {
  // k = lambda (y + (d/2) k)  =>  k = lambda y / (1 - d lambda / 2).
  double lam = -2.0, d = 0.2;
  OdeField f = [lam](const Vector& y, double) { return Vector{lam * y[0]}; };
  std::vector<Vector> traj = rk_integrate(rk_implicit_midpoint(d), f, Vector{1.5}, 8);
  double y = 1.5;
  for (int l = 1; l <= 8; ++l) {
    double k = lam * y / (1.0 - d * lam / 2.0);
    y += d * k;
    CHECK(traj[size_t(l)][0] == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("implicit midpoint preserves the oscillator norm") {
  // Skew field: dy/dt = J y with J = [[0,1],[-1,0]]; the midpoint map is the
  // Cayley transform of (d/2)J, an exact rotation, so the norm is conserved.
  OdeField f = [](const Vector& y, double) { return Vector{y[1], -y[0]}; };
  std::vector<Vector> traj = rk_integrate(rk_implicit_midpoint(0.1), f, Vector{1.0, 0.0}, 1000);
  for (const Vector& y : traj)
    CHECK(norm2(y) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("time-dependent fields receive the stage abscissae") {
  // dy/dt = 3t^2 integrates exactly to t^3 under RK4 (cubic is within order).
  OdeField f = [](const Vector&, double t) { return Vector{3.0 * t * t}; };
  std::vector<Vector> traj = rk_integrate(rk4_classic(0.25), f, Vector{0.0}, 4);
  CHECK(traj.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scheme lookup by name") {
  CHECK(rk_named("euler", 0.1).stages == 1);
  CHECK(rk_named("midpoint", 0.1).stages == 2);
  CHECK(rk_named("rk4", 0.1).stages == 4);
  CHECK(rk_named("implicit_midpoint", 0.1).is_explicit() == false);
  CHECK(rk_named("gauss2", 0.1).stages == 2);
  CHECK_THROWS_AS(rk_named("dormand", 0.1), Error);
}

TEST_CASE("scheme validation rejects inconsistent shapes") {
  RkScheme s = rk4_classic(0.1);
  s.e.pop_back();
  CHECK_THROWS_AS(s.validate(), Error);
  RkScheme z = rk_euler(0.0);
  CHECK_THROWS_AS(z.validate(), Error);
}

TEST_CASE("recurrence engine in pure-integrator mode tracks the integrator") {
  Rng rng(4242);
  for (int trial = 0; trial < 3; ++trial) {
    int dim = 2 + trial * 2;
    // Mildly contractive random linear field keeps both solvers well-behaved.
    Matrix g = rng.gauss_matrix(dim, dim, 0.4);
    Matrix w = g - Matrix::scalar(dim, 1.2);
    Vector bias = rng.gauss_vector(dim);
    Vector y0 = rng.gauss_vector(dim);
    OdeField f = [&w, &bias](const Vector& y, double) { return vec_add(w * y, bias); };
    for (const RkScheme& scheme :
         {rk_euler(0.05), rk_midpoint_explicit(0.05), rk4_classic(0.05), rk_gauss2(0.05),
          rk_implicit_midpoint(0.05)}) {
      OdeRnnConfig cfg = make_integrator_config(scheme.a, scheme.e, w, bias, scheme.delta);
      std::vector<Vector> ours = odernn_free_run(cfg, y0, 100);
      std::vector<Vector> ref = rk_integrate(scheme, f, y0, 100);
      REQUIRE(ours.size() == ref.size());
      for (size_t l = 0; l < ours.size(); ++l)
        CHECK(max_abs(vec_sub(ours[l], ref[l])) <= 1e-12);
    }
  }
}
