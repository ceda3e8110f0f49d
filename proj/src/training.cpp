#include "odelab/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "odelab/activation.hpp"
#include "odelab/adapters.hpp"
#include "odelab/errors.hpp"
#include "odelab/odernn.hpp"
#include "odelab/qunn.hpp"

namespace odelab {
namespace {

// Scalar signal embedded in coordinate 0 of a dim-wide vector.
Vector embed(double value, int dim) {
  Vector v(size_t(dim), 0.0);
  v[0] = value;
  return v;
}

double symbol_value(int symbol, int alphabet) {
  return 2.0 * double(symbol) / double(alphabet - 1) - 1.0;
}

int draw_symbol(Rng& rng, int alphabet) {
  int s = int(std::floor(rng.uniform(0.0, double(alphabet))));
  return std::clamp(s, 0, alphabet - 1);
}

// Underdamped closed form y(t) = A exp(-zeta omega t) cos(omega_d t + phi).
double oscillator_sample(double t, double amp, double phase, double omega, double zeta) {
  double omega_d = omega * std::sqrt(1.0 - zeta * zeta);
  return amp * std::exp(-zeta * omega * t) * std::cos(omega_d * t + phase);
}

// Sequential parameter unpacking with a shared cursor.
Vector take_vector(const Vector& p, std::size_t& at, int n) {
  require(at + std::size_t(n) <= p.size(), Err::DimMismatch, "parameter vector too short");
  Vector v(p.begin() + long(at), p.begin() + long(at + std::size_t(n)));
  at += std::size_t(n);
  return v;
}

Matrix take_matrix(const Vector& p, std::size_t& at, int rows, int cols) {
  std::size_t n = std::size_t(rows) * std::size_t(cols);
  require(at + n <= p.size(), Err::DimMismatch, "parameter vector too short");
  Matrix m(rows, cols);
  std::copy(p.begin() + long(at), p.begin() + long(at + n), m.data.begin());
  at += n;
  return m;
}

void put_matrix(const Matrix& m, Vector& out) {
  out.insert(out.end(), m.data.begin(), m.data.end());
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void Task::validate() const {
  require(length >= 2, Err::BadConfig, "task length must be >= 2");
  require(split >= 1 && split <= length, Err::BadConfig, "split must lie in [1, length]");
  require(dim >= 1, Err::BadConfig, "task dim must be >= 1");
  switch (kind) {
    case TaskKind::delayed_copy:
      require(lag >= 1, Err::BadConfig, "copy lag must be >= 1");
      require(lag < length, Err::BadConfig, "copy lag must be shorter than the sequence");
      require(alphabet >= 2, Err::BadConfig, "alphabet needs at least two symbols");
      break;
    case TaskKind::damped_oscillator:
      require(omega > 0.0, Err::BadConfig, "oscillator frequency must be positive");
      require(zeta >= 0.0 && zeta < 1.0, Err::BadConfig, "damping ratio must lie in [0, 1)");
      require(dt > 0.0, Err::BadConfig, "sample step must be positive");
      break;
    case TaskKind::sine_prediction:
      require(period >= 2.0, Err::BadConfig, "sine period must be >= 2 samples");
      break;
  }
}

Dataset make_task_data(const Task& task) {
  task.validate();
  Rng rng(task.rng_seed);
  Dataset data;
  data.split = task.split;
  data.inputs.reserve(size_t(task.length));
  data.targets.reserve(size_t(task.length));

  switch (task.kind) {
    case TaskKind::delayed_copy: {
      data.warmup = task.lag;
      std::vector<double> stream(size_t(task.length));
      for (double& v : stream) v = symbol_value(draw_symbol(rng, task.alphabet), task.alphabet);
      for (int k = 0; k < task.length; ++k) {
        data.inputs.push_back(embed(stream[size_t(k)], task.dim));
        double tgt = k >= task.lag ? stream[size_t(k - task.lag)] : 0.0;
        data.targets.push_back(embed(tgt, task.dim));
      }
      break;
    }
    case TaskKind::damped_oscillator: {
      double amp = rng.uniform(0.5, 1.5);
      double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      for (int k = 0; k < task.length; ++k) {
        double t = double(k) * task.dt;
        data.inputs.push_back(embed(oscillator_sample(t, amp, phase, task.omega, task.zeta), task.dim));
        data.targets.push_back(
            embed(oscillator_sample(t + task.dt, amp, phase, task.omega, task.zeta), task.dim));
      }
      break;
    }
    case TaskKind::sine_prediction: {
      double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      double w = 2.0 * 3.14159265358979323846 / task.period;
      for (int k = 0; k < task.length; ++k) {
        data.inputs.push_back(embed(std::sin(w * double(k) + phase), task.dim));
        data.targets.push_back(embed(std::sin(w * double(k + 1) + phase), task.dim));
      }
      break;
    }
  }
  return data;
}

double window_mse(const std::vector<Vector>& outputs, const Dataset& data, int lo, int hi) {
  require(outputs.size() == data.targets.size(), Err::DimMismatch,
          "output count must match the dataset");
  lo = std::max(lo, data.warmup);
  require(lo >= 0 && hi <= int(data.targets.size()) && lo < hi, Err::OutOfRange,
          "loss window out of range");
  double acc = 0.0;
  for (int k = lo; k < hi; ++k) {
    const Vector& got = outputs[size_t(k)];
    const Vector& want = data.targets[size_t(k)];
    require(got.size() == want.size(), Err::DimMismatch, "output width must match the dataset");
    for (std::size_t i = 0; i < got.size(); ++i) {
      double d = got[i] - want[i];
      acc += d * d;
    }
  }
  return acc / double(hi - lo);
}

double constant_baseline(const Dataset& data, int lo, int hi) {
  require(!data.targets.empty(), Err::BadConfig, "empty dataset");
  int fit_lo = data.warmup;
  int fit_hi = data.split;
  require(fit_lo < fit_hi, Err::BadConfig, "no training window to fit the constant on");
  std::size_t d = data.targets.front().size();
  Vector mean(d, 0.0);
  for (int k = fit_lo; k < fit_hi; ++k) axpy(1.0, data.targets[size_t(k)], mean);
  for (double& v : mean) v /= double(fit_hi - fit_lo);

  lo = std::max(lo, data.warmup);
  require(lo >= 0 && hi <= int(data.targets.size()) && lo < hi, Err::OutOfRange,
          "loss window out of range");
  double acc = 0.0;
  for (int k = lo; k < hi; ++k) {
    const Vector& want = data.targets[size_t(k)];
    for (std::size_t i = 0; i < d; ++i) {
      double diff = mean[i] - want[i];
      acc += diff * diff;
    }
  }
  return acc / double(hi - lo);
}

Vector fd_gradient(const std::function<double(const Vector&)>& loss_fn, const Vector& params,
                   double delta) {
  require(delta > 0.0, Err::BadConfig, "finite-difference step must be positive");
  Vector grad(params.size(), 0.0);
  Vector probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + delta;
    double up = loss_fn(probe);
    probe[i] = params[i] - delta;
    double down = loss_fn(probe);
    probe[i] = params[i];
    require(std::isfinite(up) && std::isfinite(down), Err::NonFinite,
            "loss probe returned a non-finite value");
    grad[i] = (up - down) / (2.0 * delta);
  }
  return grad;
}

TrainTrace train(const TrainRun& run) {
  require(bool(run.loss_fn), Err::BadConfig, "training needs a loss function");
  require(run.steps >= 0, Err::BadConfig, "step count must be >= 0");
  require(run.learn_rate > 0.0, Err::BadConfig, "learning rate must be positive");
  require(run.clip_norm > 0.0, Err::BadConfig, "clip norm must be positive");

  TrainTrace trace;
  trace.params = run.init;
  trace.loss.reserve(size_t(run.steps));
  trace.grad_norm.reserve(size_t(run.steps));

  for (int step = 0; step < run.steps; ++step) {
    double loss = run.loss_fn(trace.params);
    trace.loss.push_back(loss);
    if (!std::isfinite(loss)) {
      trace.nan_flag = true;
      trace.halted_at = step;
      break;
    }
    Vector grad;
    try {
      grad = fd_gradient(run.loss_fn, trace.params, run.fd_delta);
    } catch (const Error& e) {
      if (e.code() != Err::NonFinite) throw;
      trace.nan_flag = true;
      trace.halted_at = step;
      break;
    }
    double nrm = norm2(grad);
    trace.grad_norm.push_back(nrm);
    if (nrm > run.clip_norm) grad = vec_scale(run.clip_norm / nrm, grad);
    axpy(-run.learn_rate, grad, trace.params);
  }
  return trace;
}

std::function<double(const Vector&)> task_loss(const TrainableModel& model, const Dataset& data) {
  require(bool(model.run), Err::BadConfig, "model has no run function");
  auto run = model.run;
  return [run, data](const Vector& params) {
    return window_mse(run(params, data.inputs), data, data.warmup, data.split);
  };
}

// ---------------------------------------------------------------------------
// Model facades

TrainableModel make_trainable_odernn(int stages, int memory, int dim, std::uint64_t seed) {
  require(stages >= 1 && memory >= 1 && dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  model.param_count = (stages + 1) * (dim * dim + dim);
  Rng rng(seed);
  model.init.reserve(size_t(model.param_count));
  for (int i = 0; i < model.param_count; ++i) model.init.push_back(0.1 * rng.gauss());

  model.run = [stages, memory, dim](const Vector& params, const std::vector<Vector>& inputs) {
    OdeRnnConfig cfg;
    cfg.stages = stages;
    cfg.memory = memory;
    cfg.state_dim = dim;
    cfg.hidden_dim = dim;
    cfg.h = 1.0;
    cfg.coupling = Coupling::direct;
    cfg.padding = Padding::zero;
    std::size_t at = 0;
    for (int q = 0; q <= stages; ++q) cfg.W.push_back(take_matrix(params, at, dim, dim));
    for (int q = 0; q <= stages; ++q) cfg.b.push_back(take_vector(params, at, dim));
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    cfg.alpha.assign(size_t(stages), std::vector<Matrix>(size_t(stages)));
    cfg.beta.assign(size_t(stages), Matrix::scalar(dim, 1.0 / double(stages)));
    cfg.gamma.assign(size_t(stages) + 1, Matrix{});
    cfg.kappa.assign(size_t(stages) + 1, Matrix{});
    cfg.sigma.assign(size_t(stages) + 1, StageFn(Act::tanh_fn));
    cfg.sigma.back() = StageFn(Act::identity);
    OdernnRunner runner(std::move(cfg));
    return runner.run(inputs);
  };
  return model;
}

TrainableModel make_trainable_certified(int stages, int dim, double h, DissipativeKind kind,
                                        std::uint64_t seed) {
  OdeRnnConfig base = make_certified_config(stages, dim, h, kind, seed);
  TrainableModel model;
  for (const Matrix& w : base.W) put_matrix(w, model.init);
  for (const Vector& bias : base.b) model.init.insert(model.init.end(), bias.begin(), bias.end());
  model.param_count = int(model.init.size());

  model.run = [base](const Vector& params, const std::vector<Vector>& inputs) {
    OdeRnnConfig cfg = base;
    std::size_t at = 0;
    for (Matrix& w : cfg.W) w = take_matrix(params, at, w.rows, w.cols);
    for (Vector& bias : cfg.b) bias = take_vector(params, at, int(bias.size()));
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    OdernnRunner runner(std::move(cfg));
    return runner.run(inputs);
  };
  return model;
}

TrainableModel make_trainable_lstm(int layers, int dim, std::uint64_t seed) {
  require(layers >= 1 && dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  model.param_count = layers * 8 * dim * dim;
  Rng rng(seed);
  for (int i = 0; i < model.param_count; ++i) model.init.push_back(0.1 * rng.gauss());

  model.run = [layers, dim](const Vector& params, const std::vector<Vector>& inputs) {
    LstmSpec spec;
    spec.layers = layers;
    spec.dim = dim;
    std::size_t at = 0;
    for (int l = 0; l < layers; ++l) spec.w.push_back(take_matrix(params, at, 4 * dim, 2 * dim));
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    return lstm_run(spec, inputs);
  };
  return model;
}

TrainableModel make_trainable_gru(int layers, int dim, std::uint64_t seed) {
  require(layers >= 1 && dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  model.param_count = layers * (4 * dim * dim + 2 * dim * dim);
  Rng rng(seed);
  for (int i = 0; i < model.param_count; ++i) model.init.push_back(0.1 * rng.gauss());

  model.run = [layers, dim](const Vector& params, const std::vector<Vector>& inputs) {
    GruSpec spec;
    spec.layers = layers;
    spec.dim = dim;
    std::size_t at = 0;
    for (int l = 0; l < layers; ++l) {
      spec.w.push_back(take_matrix(params, at, 2 * dim, 2 * dim));
      spec.w_x.push_back(take_matrix(params, at, dim, dim));
      spec.w_g.push_back(take_matrix(params, at, dim, dim));
    }
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    return gru_run(spec, inputs);
  };
  return model;
}

TrainableModel make_trainable_urnn(int layers, int dim, std::uint64_t seed) {
  require(layers >= 1 && dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  int skew = dim * (dim - 1) / 2;
  model.param_count = layers * (skew + dim * dim);
  Rng rng(seed);
  for (int i = 0; i < model.param_count; ++i) model.init.push_back(0.1 * rng.gauss());

  model.run = [layers, dim, skew](const Vector& params, const std::vector<Vector>& inputs) {
    UrnnSpec spec;
    spec.layers = layers;
    spec.dim = dim;
    spec.input_dim = dim;
    std::size_t at = 0;
    for (int l = 0; l < layers; ++l) {
      spec.skew_params.push_back(take_vector(params, at, skew));
      spec.v.push_back(take_matrix(params, at, dim, dim));
    }
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    return urnn_run(spec, inputs);
  };
  return model;
}

TrainableModel make_trainable_cwrnn(int clocks, int block_size, int data_dim, std::uint64_t seed) {
  require(clocks >= 1 && block_size >= 1 && data_dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  int hidden = clocks * block_size;
  model.param_count = hidden * hidden + 2 * hidden * data_dim;
  Rng rng(seed);
  for (int i = 0; i < model.param_count; ++i) model.init.push_back(0.1 * rng.gauss());

  model.run = [clocks, block_size, data_dim, hidden](const Vector& params,
                                                     const std::vector<Vector>& inputs) {
    CwRnnSpec spec;
    spec.block_sizes.assign(size_t(clocks), block_size);
    spec.periods = default_periods(clocks);
    std::size_t at = 0;
    spec.w_h = take_matrix(params, at, hidden, hidden);
    spec.w_i = take_matrix(params, at, hidden, data_dim);
    spec.w_o = take_matrix(params, at, data_dim, hidden);
    require(at == params.size(), Err::DimMismatch, "parameter vector too long");
    return cwrnn_run(spec, inputs);
  };
  return model;
}

TrainableModel make_trainable_qunn(int clock_dim, int depth, int data_dim, std::uint64_t seed) {
  require(clock_dim >= 1 && depth >= 1 && data_dim >= 1, Err::BadConfig, "bad model shape");
  TrainableModel model;
  model.param_count = 2 + depth;
  Rng rng(seed);
  model.init.push_back(0.1 * rng.gauss());
  model.init.push_back(0.1 * rng.gauss());
  for (int k = 0; k < depth; ++k) model.init.push_back(1.0 + 0.1 * rng.gauss());

  model.run = [clock_dim, depth, data_dim](const Vector& params, const std::vector<Vector>& inputs) {
    require(params.size() == std::size_t(2 + depth), Err::DimMismatch, "parameter count mismatch");
    QunnConfig cfg;
    cfg.clock_dim = clock_dim;
    cfg.depth = depth;
    cfg.data_dim = data_dim;
    cfg.p1 = CoeffSchedule(logistic(params[0]));
    cfg.p2 = CoeffSchedule(logistic(params[1]));
    cfg.residual = ResidualSpec::scale_mix(Vector(params.begin() + 2, params.end()));
    return qunn_forward(cfg, inputs);
  };
  return model;
}

// ---------------------------------------------------------------------------
// Diagnostics

namespace {

CorrelationEstimate correlation_core(const std::vector<Vector>& series) {
  int T = int(series.size());
  require(T >= 2, Err::BadConfig, "correlation length needs at least two samples");
  std::size_t d = series.front().size();
  require(d >= 1, Err::BadConfig, "empty sample vectors");
  for (const Vector& v : series)
    require(v.size() == d, Err::DimMismatch, "ragged series");

  // A constant series has no correlation structure to measure; flag it
  // rather than dividing by a roundoff-sized variance.
  bool constant = true;
  for (std::size_t i = 0; i < d && constant; ++i) {
    double lo = series.front()[i];
    double hi = lo;
    for (const Vector& v : series) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo > 1e-12 * scale) constant = false;
  }
  if (constant) return {1, true};

  Vector mean(d, 0.0);
  for (const Vector& v : series) axpy(1.0, v, mean);
  for (double& m : mean) m /= double(T);

  int kmax = std::max(1, T / 2);
  double c0 = 0.0;
  for (const Vector& v : series)
    for (std::size_t i = 0; i < d; ++i) c0 += (v[i] - mean[i]) * (v[i] - mean[i]);

  std::vector<double> rho(size_t(kmax) + 1, 0.0);
  rho[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    double c = 0.0;
    for (int t = 0; t + k < T; ++t)
      for (std::size_t i = 0; i < d; ++i)
        c += (series[size_t(t)][i] - mean[i]) * (series[size_t(t + k)][i] - mean[i]);
    rho[size_t(k)] = c / c0;
  }

  const double e_inv = std::exp(-1.0);
  int first = kmax;
  for (int k = 1; k <= kmax; ++k) {
    if (rho[size_t(k)] < e_inv) {
      first = k;
      break;
    }
  }
  // Periodic recovery: if the autocorrelation climbs back above 1/e after
  // the crossing, the dominant lag is the recovered maximum, not the first
  // zero crossing of the oscillation.
  int pick = first;
  if (first < kmax) {
    int arg = first;
    for (int k = first + 1; k <= kmax; ++k)
      if (rho[size_t(k)] > rho[size_t(arg)]) arg = k;
    if (arg > first && rho[size_t(arg)] >= e_inv) pick = arg;
  }
  return {std::clamp(pick, 1, T / 2), false};
}

}  // namespace

CorrelationEstimate estimate_correlation_length(const std::vector<Vector>& series) {
  return correlation_core(series);
}

CorrelationEstimate estimate_correlation_length(const std::vector<double>& series) {
  std::vector<Vector> wrapped;
  wrapped.reserve(series.size());
  for (double v : series) wrapped.push_back(Vector{v});
  return correlation_core(wrapped);
}

double delayed_copy_expected_loss(const std::function<Vector(const std::vector<Vector>&)>& predict,
                                  int window_len, int lag, int alphabet, int dim) {
  require(bool(predict), Err::BadConfig, "expected loss needs a predictor");
  require(window_len >= 1 && lag >= 1 && alphabet >= 2 && dim >= 1, Err::BadConfig,
          "bad enumeration shape");
  long long count = 1;
  for (int i = 0; i < window_len; ++i) {
    count *= alphabet;
    require(count <= (1LL << 20), Err::TooLarge, "window enumeration too large");
  }

  std::vector<Vector> window(static_cast<std::size_t>(window_len));
  std::vector<int> symbols(static_cast<std::size_t>(window_len), 0);
  double acc = 0.0;
  for (long long idx = 0; idx < count; ++idx) {
    long long rest = idx;
    for (int i = window_len - 1; i >= 0; --i) {
      symbols[size_t(i)] = int(rest % alphabet);
      rest /= alphabet;
      window[size_t(i)] = embed(symbol_value(symbols[size_t(i)], alphabet), dim);
    }
    Vector out = predict(window);
    require(int(out.size()) == dim, Err::DimMismatch, "predictor width mismatch");
    if (lag <= window_len - 1) {
      // The target symbol sits inside the window, lag steps before its end.
      Vector want = embed(symbol_value(symbols[size_t(window_len - 1 - lag)], alphabet), dim);
      Vector diff = vec_sub(out, want);
      acc += dot(diff, diff);
    } else {
      // The target predates the window; average over its uniform law.
      double part = 0.0;
      for (int s = 0; s < alphabet; ++s) {
        Vector want = embed(symbol_value(s, alphabet), dim);
        Vector diff = vec_sub(out, want);
        part += dot(diff, diff);
      }
      acc += part / double(alphabet);
    }
  }
  return acc / double(count);
}

double delayed_copy_variance(int alphabet) {
  require(alphabet >= 2, Err::BadConfig, "alphabet needs at least two symbols");
  double mean = 0.0;
  for (int s = 0; s < alphabet; ++s) mean += symbol_value(s, alphabet);
  mean /= double(alphabet);
  double var = 0.0;
  for (int s = 0; s < alphabet; ++s) {
    double d = symbol_value(s, alphabet) - mean;
    var += d * d;
  }
  return var / double(alphabet);
}

}  // namespace odelab
