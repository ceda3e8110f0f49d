#pragma once

#include <functional>
#include <string>

#include "odelab/linalg.hpp"
#include "odelab/odernn.hpp"

namespace odelab {

// Generalized Runge-Kutta scheme
//   k_q = f(d_q y + delta * sum_j a_{qj} k_j,  t + c_q delta)
//   y' = y + delta * sum_i e_i k_i
struct RkScheme {
  int stages = 1;
  Matrix a;      // stages x stages
  Vector e;      // quadrature weights
  Vector c;      // abscissae
  Vector d;      // state scaling per stage (1 for classic methods)
  double delta = 0.1;

  bool is_explicit() const;
  void validate() const;
};

using OdeField = std::function<Vector(const Vector&, double)>;

// Returns [y0, y1, ..., y_steps]. Implicit stage systems run the damped
// fixed-point iteration (damping 0.5, tol 1e-12, cap 100).
std::vector<Vector> rk_integrate(const RkScheme& scheme, const OdeField& f, const Vector& y0,
                                 int steps, double t0 = 0.0);

RkScheme rk_euler(double delta);
RkScheme rk_midpoint_explicit(double delta);
RkScheme rk4_classic(double delta);
RkScheme rk_implicit_midpoint(double delta);
RkScheme rk_gauss2(double delta);  // two-stage Gauss collocation, order 4
RkScheme rk_named(const std::string& name, double delta);

// Extracts the tableau from a pure-integrator config: identity activations,
// identity output carry, zero hidden carries, one shared (W, b) across
// stages, and stage/quadrature blocks that are scalar multiples of I (or of
// W under direct coupling). Anything else throws NotReducible.
RkScheme odernn_as_rk(const OdeRnnConfig& cfg);

}  // namespace odelab
