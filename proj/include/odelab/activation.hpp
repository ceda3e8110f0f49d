#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "odelab/linalg.hpp"

namespace odelab {

enum class Act { identity, tanh_fn, relu, sigmoid };

double apply_act(Act a, double x);
Vector apply_act(Act a, const Vector& v);
const char* act_name(Act a);
Act act_from_name(const std::string& name);  // throws BadConfig

// A stage nonlinearity: one of the named pointwise kinds, or an arbitrary
// vector function installed by an architecture mapping. Custom callables are
// runtime-only; serialization covers the named kinds.
struct StageFn {
  Act kind = Act::identity;
  std::function<Vector(const Vector&)> custom;

  StageFn() = default;
  StageFn(Act a) : kind(a) {}
  static StageFn wrap(std::function<Vector(const Vector&)> f) {
    StageFn s;
    s.custom = std::move(f);
    return s;
  }
  Vector operator()(const Vector& v) const { return custom ? custom(v) : apply_act(kind, v); }
  bool is_custom() const { return bool(custom); }
  bool is_identity() const { return !custom && kind == Act::identity; }
};

// Randomized monotonicity test: draws pairs x, y with components in
// [-2pi, 2pi] and checks <f(x) - f(y), x - y> >= -1e-12 * scale on each.
bool monotonicity_probe(const std::function<double(double)>& f, int samples, uint64_t seed,
                        int dim = 4);
bool monotonicity_probe(Act a, int samples, uint64_t seed, int dim = 4);

}  // namespace odelab
