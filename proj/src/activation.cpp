#include "odelab/activation.hpp"

#include <cmath>

namespace odelab {

double apply_act(Act a, double x) {
  switch (a) {
    case Act::identity: return x;
    case Act::tanh_fn: return std::tanh(x);
    case Act::relu: return x > 0.0 ? x : 0.0;
    case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

Vector apply_act(Act a, const Vector& v) {
  if (a == Act::identity) return v;
  Vector r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = apply_act(a, v[i]);
  return r;
}

const char* act_name(Act a) {
  switch (a) {
    case Act::identity: return "identity";
    case Act::tanh_fn: return "tanh";
    case Act::relu: return "relu";
    case Act::sigmoid: return "sigmoid";
  }
  return "identity";
}

Act act_from_name(const std::string& name) {
  if (name == "identity") return Act::identity;
  if (name == "tanh") return Act::tanh_fn;
  if (name == "relu") return Act::relu;
  if (name == "sigmoid") return Act::sigmoid;
  fail(Err::BadConfig, "unknown activation '" + name + "'");
}

bool monotonicity_probe(const std::function<double(double)>& f, int samples, uint64_t seed,
                        int dim) {
  Rng rng(seed);
  const double span = 2.0 * 3.14159265358979323846;
  for (int s = 0; s < samples; ++s) {
    Vector x(size_t(dim), 0.0), y(size_t(dim), 0.0);
    for (int i = 0; i < dim; ++i) {
      x[size_t(i)] = rng.uniform(-span, span);
      y[size_t(i)] = rng.uniform(-span, span);
    }
    double inner = 0.0, scale = 0.0;
    for (int i = 0; i < dim; ++i) {
      double dv = x[size_t(i)] - y[size_t(i)];
      inner += (f(x[size_t(i)]) - f(y[size_t(i)])) * dv;
      scale += dv * dv;
    }
    if (inner < -1e-12 * std::max(1.0, scale)) return false;
  }
  return true;
}

bool monotonicity_probe(Act a, int samples, uint64_t seed, int dim) {
  return monotonicity_probe([a](double x) { return apply_act(a, x); }, samples, seed, dim);
}

}  // namespace odelab
