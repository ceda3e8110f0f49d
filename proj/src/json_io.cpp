#include "odelab/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "odelab/errors.hpp"

namespace odelab {
namespace {

// Field access with library error codes instead of nlohmann exceptions.
const Json* find(const Json& j, const char* name) {
  require(j.is_object(), Err::BadConfig, std::string("expected an object around '") + name + "'");
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

const Json& need(const Json& j, const char* name) {
  const Json* p = find(j, name);
  require(p != nullptr, Err::BadConfig, std::string("missing field '") + name + "'");
  return *p;
}

double as_num(const Json& j, const char* what) {
  require(j.is_number(), Err::BadConfig, std::string("field '") + what + "' must be a number");
  return j.get<double>();
}

int as_int(const Json& j, const char* what) {
  require(j.is_number_integer(), Err::BadConfig,
          std::string("field '") + what + "' must be an integer");
  return j.get<int>();
}

bool as_bool(const Json& j, const char* what) {
  require(j.is_boolean(), Err::BadConfig, std::string("field '") + what + "' must be a boolean");
  return j.get<bool>();
}

std::string as_str(const Json& j, const char* what) {
  require(j.is_string(), Err::BadConfig, std::string("field '") + what + "' must be a string");
  return j.get<std::string>();
}

double num_field(const Json& j, const char* name, double fallback) {
  const Json* p = find(j, name);
  return p ? as_num(*p, name) : fallback;
}

int int_field(const Json& j, const char* name, int fallback) {
  const Json* p = find(j, name);
  return p ? as_int(*p, name) : fallback;
}

std::vector<Matrix> matrix_list(const Json& j, const char* what) {
  require(j.is_array(), Err::BadConfig, std::string("field '") + what + "' must be an array");
  std::vector<Matrix> out;
  out.reserve(j.size());
  for (const Json& entry : j) out.push_back(matrix_from_json(entry));
  return out;
}

std::vector<Vector> vector_list(const Json& j, const char* what) {
  require(j.is_array(), Err::BadConfig, std::string("field '") + what + "' must be an array");
  std::vector<Vector> out;
  out.reserve(j.size());
  for (const Json& entry : j) out.push_back(vector_from_json(entry));
  return out;
}

Json json_of_matrices(const std::vector<Matrix>& ms) {
  Json arr = Json::array();
  for (const Matrix& m : ms) arr.push_back(json_of(m));
  return arr;
}

Json json_of_vectors(const std::vector<Vector>& vs) {
  Json arr = Json::array();
  for (const Vector& v : vs) arr.push_back(json_of(v));
  return arr;
}

StageFn stagefn_from_json(const Json& j) { return StageFn(act_from_name(as_str(j, "sigma"))); }

Json json_of_stagefn(const StageFn& s) {
  require(!s.is_custom(), Err::UnsupportedSpec,
          "custom activation closures have no file form");
  return Json(act_name(s.kind));
}

}  // namespace

// ---------------------------------------------------------------------------
// primitives

Json json_of(const Vector& v) { return Json(v); }

Json json_of(const Matrix& m) {
  if (m.empty()) return Json();
  Json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Vector vector_from_json(const Json& j) {
  require(j.is_array(), Err::BadConfig, "vector must be a JSON array");
  Vector v;
  v.reserve(j.size());
  for (const Json& x : j) v.push_back(as_num(x, "vector entry"));
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (j.is_null()) return Matrix{};
  require(j.is_object(), Err::BadConfig, "matrix must be an object or null");
  int rows = as_int(need(j, "rows"), "rows");
  int cols = as_int(need(j, "cols"), "cols");
  require(rows >= 1 && cols >= 1, Err::BadConfig, "matrix dims must be positive");
  Vector data = vector_from_json(need(j, "data"));
  require(int(data.size()) == rows * cols, Err::DimMismatch,
          "matrix data length must equal rows*cols");
  Matrix m(rows, cols);
  m.data = std::move(data);
  return m;
}

// ---------------------------------------------------------------------------
// update-rule configs

Json json_of(const OdeRnnConfig& cfg) {
  require(!cfg.is_dynamical(), Err::UnsupportedSpec,
          "dynamical-weight configs are runtime objects with no file form");
  Json j;
  j["stages"] = cfg.stages;
  j["memory"] = cfg.memory;
  j["state_dim"] = cfg.state_dim;
  j["hidden_dim"] = cfg.hidden_dim;
  j["h"] = cfg.h;
  j["coupling"] = cfg.coupling == Coupling::direct ? "direct" : "through_weights";
  j["padding"] = cfg.padding == Padding::zero ? "zero" : "repeat_first";
  j["W"] = json_of_matrices(cfg.W);
  j["b"] = json_of_vectors(cfg.b);
  Json alpha = Json::array();
  for (const auto& row : cfg.alpha) alpha.push_back(json_of_matrices(row));
  j["alpha"] = alpha;
  j["beta"] = json_of_matrices(cfg.beta);
  j["gamma"] = json_of_matrices(cfg.gamma);
  j["kappa"] = json_of_matrices(cfg.kappa);
  Json sigma = Json::array();
  for (const StageFn& s : cfg.sigma) sigma.push_back(json_of_stagefn(s));
  j["sigma"] = sigma;
  return j;
}

OdeRnnConfig odernn_from_json(const Json& j) {
  OdeRnnConfig cfg;
  cfg.stages = int_field(j, "stages", cfg.stages);
  cfg.memory = int_field(j, "memory", cfg.memory);
  cfg.state_dim = int_field(j, "state_dim", cfg.state_dim);
  cfg.hidden_dim = int_field(j, "hidden_dim", cfg.hidden_dim);
  cfg.h = num_field(j, "h", cfg.h);
  if (const Json* p = find(j, "coupling")) {
    std::string c = as_str(*p, "coupling");
    if (c == "direct")
      cfg.coupling = Coupling::direct;
    else if (c == "through_weights")
      cfg.coupling = Coupling::through_weights;
    else
      fail(Err::BadConfig, "unknown coupling '" + c + "'");
  }
  if (const Json* p = find(j, "padding")) {
    std::string s = as_str(*p, "padding");
    if (s == "zero")
      cfg.padding = Padding::zero;
    else if (s == "repeat_first")
      cfg.padding = Padding::repeat_first;
    else
      fail(Err::BadConfig, "unknown padding '" + s + "'");
  }
  std::size_t n = std::size_t(cfg.stages);
  cfg.W = matrix_list(need(j, "W"), "W");
  cfg.b = vector_list(need(j, "b"), "b");
  if (const Json* p = find(j, "alpha")) {
    require(p->is_array(), Err::BadConfig, "field 'alpha' must be an array of rows");
    for (const Json& row : *p) cfg.alpha.push_back(matrix_list(row, "alpha row"));
  } else {
    cfg.alpha.assign(n, std::vector<Matrix>(n));
  }
  if (const Json* p = find(j, "beta"))
    cfg.beta = matrix_list(*p, "beta");
  else
    cfg.beta.assign(n, Matrix{});
  if (const Json* p = find(j, "gamma"))
    cfg.gamma = matrix_list(*p, "gamma");
  else
    cfg.gamma.assign(n + 1, Matrix{});
  if (const Json* p = find(j, "kappa"))
    cfg.kappa = matrix_list(*p, "kappa");
  else
    cfg.kappa.assign(n + 1, Matrix{});
  if (const Json* p = find(j, "sigma")) {
    require(p->is_array(), Err::BadConfig, "field 'sigma' must be an array");
    for (const Json& s : *p) cfg.sigma.push_back(stagefn_from_json(s));
  } else {
    cfg.sigma.assign(n + 1, StageFn(Act::identity));
  }
  cfg.validate();
  return cfg;
}

Json json_of(const RkScheme& scheme) {
  Json j;
  j["stages"] = scheme.stages;
  j["a"] = json_of(scheme.a);
  j["e"] = json_of(scheme.e);
  j["c"] = json_of(scheme.c);
  j["d"] = json_of(scheme.d);
  j["delta"] = scheme.delta;
  return j;
}

RkScheme rk_scheme_from_json(const Json& j) {
  if (const Json* name = find(j, "name")) {
    double delta = as_num(need(j, "delta"), "delta");
    return rk_named(as_str(*name, "name"), delta);
  }
  RkScheme s;
  s.stages = as_int(need(j, "stages"), "stages");
  s.a = matrix_from_json(need(j, "a"));
  s.e = vector_from_json(need(j, "e"));
  if (const Json* p = find(j, "c"))
    s.c = vector_from_json(*p);
  else
    s.c.assign(std::size_t(s.stages), 0.0);
  if (const Json* p = find(j, "d"))
    s.d = vector_from_json(*p);
  else
    s.d.assign(std::size_t(s.stages), 1.0);
  s.delta = as_num(need(j, "delta"), "delta");
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// stability

Json json_of(const ProbePlan& plan) {
  Json j;
  j["steps"] = plan.steps;
  j["seeds"] = plan.seeds;
  j["delta_norm"] = plan.delta_norm;
  j["step_tol"] = plan.step_tol;
  j["rng_seed"] = plan.rng_seed;
  return j;
}

ProbePlan probe_plan_from_json(const Json& j) {
  ProbePlan plan;
  plan.steps = int_field(j, "steps", plan.steps);
  plan.seeds = int_field(j, "seeds", plan.seeds);
  plan.delta_norm = num_field(j, "delta_norm", plan.delta_norm);
  plan.step_tol = num_field(j, "step_tol", plan.step_tol);
  if (const Json* p = find(j, "rng_seed")) {
    require(p->is_number_integer(), Err::BadConfig, "field 'rng_seed' must be an integer");
    plan.rng_seed = p->get<std::uint64_t>();
  }
  require(plan.steps >= 1 && plan.seeds >= 1, Err::BadConfig,
          "probe plan needs positive steps and seeds");
  return plan;
}

Json json_of(const StabilityReport& report) {
  Json j;
  j["certified"] = report.certified;
  j["q_psd"] = report.q_psd;
  j["betas_psd"] = report.betas_psd;
  j["min_eig_q"] = report.min_eig_q;
  j["empirical_max_growth"] = report.empirical_max_growth;
  j["probes_run"] = report.probes_run;
  return j;
}

StabilityReport stability_report_from_json(const Json& j) {
  StabilityReport r;
  r.certified = as_bool(need(j, "certified"), "certified");
  r.q_psd = as_bool(need(j, "q_psd"), "q_psd");
  const Json& betas = need(j, "betas_psd");
  require(betas.is_array(), Err::BadConfig, "field 'betas_psd' must be an array");
  for (const Json& b : betas) r.betas_psd.push_back(as_bool(b, "betas_psd entry"));
  r.min_eig_q = as_num(need(j, "min_eig_q"), "min_eig_q");
  r.empirical_max_growth = as_num(need(j, "empirical_max_growth"), "empirical_max_growth");
  r.probes_run = as_int(need(j, "probes_run"), "probes_run");
  return r;
}

// ---------------------------------------------------------------------------
// architecture specs

Json json_of(const LstmSpec& spec) {
  Json j;
  j["layers"] = spec.layers;
  j["dim"] = spec.dim;
  j["w"] = json_of_matrices(spec.w);
  Json gates = Json::array();
  for (Act a : spec.gates) gates.push_back(act_name(a));
  j["gates"] = gates;
  if (!spec.cells.empty()) j["cells"] = json_of_vectors(spec.cells);
  return j;
}

LstmSpec lstm_from_json(const Json& j) {
  LstmSpec spec;
  spec.layers = int_field(j, "layers", spec.layers);
  spec.dim = int_field(j, "dim", spec.dim);
  spec.w = matrix_list(need(j, "w"), "w");
  if (const Json* p = find(j, "gates")) {
    require(p->is_array() && p->size() == 4, Err::BadConfig,
            "field 'gates' must list four activations");
    for (std::size_t g = 0; g < 4; ++g) spec.gates[g] = act_from_name(as_str((*p)[g], "gate"));
  }
  if (const Json* p = find(j, "cells")) spec.cells = vector_list(*p, "cells");
  spec.validate();
  return spec;
}

Json json_of(const GruSpec& spec) {
  Json j;
  j["layers"] = spec.layers;
  j["dim"] = spec.dim;
  j["w"] = json_of_matrices(spec.w);
  j["w_x"] = json_of_matrices(spec.w_x);
  j["w_g"] = json_of_matrices(spec.w_g);
  j["gate"] = act_name(spec.gate);
  return j;
}

GruSpec gru_from_json(const Json& j) {
  GruSpec spec;
  spec.layers = int_field(j, "layers", spec.layers);
  spec.dim = int_field(j, "dim", spec.dim);
  spec.w = matrix_list(need(j, "w"), "w");
  spec.w_x = matrix_list(need(j, "w_x"), "w_x");
  spec.w_g = matrix_list(need(j, "w_g"), "w_g");
  if (const Json* p = find(j, "gate")) spec.gate = act_from_name(as_str(*p, "gate"));
  spec.validate();
  return spec;
}

Json json_of(const UrnnSpec& spec) {
  Json j;
  j["layers"] = spec.layers;
  j["dim"] = spec.dim;
  j["input_dim"] = spec.input_dim;
  j["skew_params"] = json_of_vectors(spec.skew_params);
  j["v"] = json_of_matrices(spec.v);
  if (!spec.w_explicit.empty()) j["w_explicit"] = json_of_matrices(spec.w_explicit);
  j["activation"] = act_name(spec.activation);
  return j;
}

UrnnSpec urnn_from_json(const Json& j) {
  UrnnSpec spec;
  spec.layers = int_field(j, "layers", spec.layers);
  spec.dim = int_field(j, "dim", spec.dim);
  spec.input_dim = int_field(j, "input_dim", spec.dim);
  spec.skew_params = vector_list(need(j, "skew_params"), "skew_params");
  spec.v = matrix_list(need(j, "v"), "v");
  if (const Json* p = find(j, "w_explicit")) spec.w_explicit = matrix_list(*p, "w_explicit");
  if (const Json* p = find(j, "activation")) spec.activation = act_from_name(as_str(*p, "activation"));
  spec.validate();
  return spec;
}

Json json_of(const CwRnnSpec& spec) {
  Json j;
  j["block_sizes"] = spec.block_sizes;
  j["periods"] = spec.periods;
  j["w_h"] = json_of(spec.w_h);
  j["w_i"] = json_of(spec.w_i);
  j["w_o"] = json_of(spec.w_o);
  j["hidden_act"] = act_name(spec.hidden_act);
  j["output_act"] = act_name(spec.output_act);
  return j;
}

CwRnnSpec cwrnn_from_json(const Json& j) {
  CwRnnSpec spec;
  const Json& blocks = need(j, "block_sizes");
  require(blocks.is_array(), Err::BadConfig, "field 'block_sizes' must be an array");
  for (const Json& b : blocks) spec.block_sizes.push_back(as_int(b, "block size"));
  if (const Json* p = find(j, "periods")) {
    require(p->is_array(), Err::BadConfig, "field 'periods' must be an array");
    for (const Json& t : *p) {
      require(t.is_number_integer(), Err::BadConfig, "periods must be integers");
      spec.periods.push_back(t.get<long long>());
    }
  } else {
    spec.periods = default_periods(int(spec.block_sizes.size()));
  }
  spec.w_h = matrix_from_json(need(j, "w_h"));
  spec.w_i = matrix_from_json(need(j, "w_i"));
  spec.w_o = matrix_from_json(need(j, "w_o"));
  if (const Json* p = find(j, "hidden_act")) spec.hidden_act = act_from_name(as_str(*p, "hidden_act"));
  if (const Json* p = find(j, "output_act")) spec.output_act = act_from_name(as_str(*p, "output_act"));
  spec.validate();
  return spec;
}

Json json_of(const MappingReport& report) {
  Json j;
  j["architecture"] = report.architecture;
  j["layers"] = report.layers;
  j["realized_stages"] = report.realized_stages;
  j["realized_memory"] = report.realized_memory;
  j["stacked_nonlinearity_order"] = report.stacked_nonlinearity_order;
  j["stacked_memory_order"] = report.stacked_memory_order;
  j["per_layer_nonlinearity_order"] = report.per_layer_nonlinearity_order;
  j["per_layer_memory_order"] = report.per_layer_memory_order;
  return j;
}

MappingReport mapping_report_from_json(const Json& j) {
  MappingReport r;
  r.architecture = as_str(need(j, "architecture"), "architecture");
  r.layers = as_int(need(j, "layers"), "layers");
  r.realized_stages = as_int(need(j, "realized_stages"), "realized_stages");
  r.realized_memory = as_int(need(j, "realized_memory"), "realized_memory");
  r.stacked_nonlinearity_order =
      as_int(need(j, "stacked_nonlinearity_order"), "stacked_nonlinearity_order");
  r.stacked_memory_order = as_int(need(j, "stacked_memory_order"), "stacked_memory_order");
  r.per_layer_nonlinearity_order =
      as_int(need(j, "per_layer_nonlinearity_order"), "per_layer_nonlinearity_order");
  r.per_layer_memory_order = as_int(need(j, "per_layer_memory_order"), "per_layer_memory_order");
  return r;
}

// ---------------------------------------------------------------------------
// clocked unitary networks

namespace {

Json json_of_schedule(const CoeffSchedule& s) {
  if (s.values.size() == 1) return Json(s.values.front());
  return Json(s.values);
}

CoeffSchedule schedule_from_json(const Json& j, const char* what) {
  if (j.is_number()) return CoeffSchedule(j.get<double>());
  require(j.is_array(), Err::BadConfig,
          std::string("field '") + what + "' must be a number or an array");
  std::vector<double> vals;
  for (const Json& v : j) vals.push_back(as_num(v, what));
  return CoeffSchedule(vals);
}

}  // namespace

Json json_of(const QunnConfig& cfg) {
  Json j;
  j["clock_dim"] = cfg.clock_dim;
  j["depth"] = cfg.depth;
  j["data_dim"] = cfg.data_dim;
  j["p1"] = json_of_schedule(cfg.p1);
  j["p2"] = json_of_schedule(cfg.p2);
  Json res;
  switch (cfg.residual.kind) {
    case ResidualSpec::Kind::identity: res["kind"] = "identity"; break;
    case ResidualSpec::Kind::scales:
      res["kind"] = "scales";
      res["scale"] = cfg.residual.scale;
      break;
    case ResidualSpec::Kind::matrices:
      res["kind"] = "matrices";
      res["mat"] = json_of_matrices(cfg.residual.mat);
      break;
  }
  j["residual"] = res;
  j["sigma_in"] = act_name(cfg.sigma_in);
  j["sigma_hidden"] = act_name(cfg.sigma_hidden);
  j["sigma_out"] = act_name(cfg.sigma_out);
  j["weight_base"] = json_of(cfg.weight_base);
  return j;
}

QunnConfig qunn_from_json(const Json& j) {
  QunnConfig cfg;
  cfg.clock_dim = int_field(j, "clock_dim", cfg.clock_dim);
  cfg.depth = int_field(j, "depth", cfg.depth);
  cfg.data_dim = int_field(j, "data_dim", cfg.data_dim);
  if (const Json* p = find(j, "p1")) cfg.p1 = schedule_from_json(*p, "p1");
  if (const Json* p = find(j, "p2")) cfg.p2 = schedule_from_json(*p, "p2");
  if (const Json* p = find(j, "residual")) {
    std::string kind = as_str(need(*p, "kind"), "residual kind");
    if (kind == "identity") {
      cfg.residual = ResidualSpec::identity_mix();
    } else if (kind == "scales") {
      const Json& s = need(*p, "scale");
      require(s.is_array(), Err::BadConfig, "residual scales must be an array");
      std::vector<double> scale;
      for (const Json& v : s) scale.push_back(as_num(v, "residual scale"));
      cfg.residual = ResidualSpec::scale_mix(scale);
    } else if (kind == "matrices") {
      cfg.residual = ResidualSpec::matrix_mix(matrix_list(need(*p, "mat"), "residual mat"));
    } else {
      fail(Err::BadConfig, "unknown residual kind '" + kind + "'");
    }
  }
  if (const Json* p = find(j, "sigma_in")) cfg.sigma_in = act_from_name(as_str(*p, "sigma_in"));
  if (const Json* p = find(j, "sigma_hidden"))
    cfg.sigma_hidden = act_from_name(as_str(*p, "sigma_hidden"));
  if (const Json* p = find(j, "sigma_out")) cfg.sigma_out = act_from_name(as_str(*p, "sigma_out"));
  if (const Json* p = find(j, "weight_base")) cfg.weight_base = matrix_from_json(*p);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// clock Hamiltonians

Json json_of(const ClockProgram& prog) {
  Json j;
  j["data_dim"] = prog.data_dim;
  j["mode"] = prog.mode == ProgramMode::unitary ? "unitary" : "rank_one";
  if (prog.mode == ProgramMode::unitary) {
    j["unitaries"] = json_of_matrices(prog.unitaries);
  } else {
    j["reads"] = json_of_vectors(prog.reads);
    j["writes"] = json_of_vectors(prog.writes);
  }
  return j;
}

ClockProgram clock_program_from_json(const Json& j) {
  ClockProgram prog;
  prog.data_dim = as_int(need(j, "data_dim"), "data_dim");
  std::string mode = "unitary";
  if (const Json* p = find(j, "mode")) mode = as_str(*p, "mode");
  if (mode == "unitary") {
    prog.mode = ProgramMode::unitary;
    const Json& steps = need(j, "unitaries");
    require(steps.is_array(), Err::BadConfig, "field 'unitaries' must be an array");
    for (const Json& entry : steps) {
      if (entry.is_object() && entry.contains("truth_table")) {
        const Json& table = need(entry, "truth_table");
        require(table.is_array(), Err::BadConfig, "truth_table must be an array");
        std::vector<int> t;
        for (const Json& v : table) t.push_back(as_int(v, "truth_table entry"));
        prog.unitaries.push_back(compile_truth_table(t, as_int(need(entry, "bits"), "bits")));
      } else {
        prog.unitaries.push_back(matrix_from_json(entry));
      }
    }
  } else if (mode == "rank_one") {
    prog.mode = ProgramMode::rank_one;
    prog.reads = vector_list(need(j, "reads"), "reads");
    prog.writes = vector_list(need(j, "writes"), "writes");
  } else {
    fail(Err::BadConfig, "unknown program mode '" + mode + "'");
  }
  prog.validate();
  return prog;
}

Json json_of(const GroundReport& report) {
  Json j;
  j["ground_energy"] = report.ground_energy;
  j["sector_gap"] = report.sector_gap;
  j["history_residual"] = report.history_residual;
  j["unique_in_sector"] = report.unique_in_sector;
  return j;
}

GroundReport ground_report_from_json(const Json& j) {
  GroundReport r;
  r.ground_energy = as_num(need(j, "ground_energy"), "ground_energy");
  r.sector_gap = as_num(need(j, "sector_gap"), "sector_gap");
  r.history_residual = as_num(need(j, "history_residual"), "history_residual");
  r.unique_in_sector = as_bool(need(j, "unique_in_sector"), "unique_in_sector");
  return r;
}

// ---------------------------------------------------------------------------
// tasks and training

namespace {

const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::delayed_copy: return "delayed_copy";
    case TaskKind::damped_oscillator: return "damped_oscillator";
    case TaskKind::sine_prediction: return "sine_prediction";
  }
  fail(Err::BadConfig, "unknown task kind");
}

TaskKind task_kind_from_name(const std::string& name) {
  if (name == "delayed_copy") return TaskKind::delayed_copy;
  if (name == "damped_oscillator") return TaskKind::damped_oscillator;
  if (name == "sine_prediction") return TaskKind::sine_prediction;
  fail(Err::BadConfig, "unknown task kind '" + name + "'");
}

}  // namespace

Json json_of(const Task& task) {
  Json j;
  j["kind"] = task_kind_name(task.kind);
  j["length"] = task.length;
  j["split"] = task.split;
  j["rng_seed"] = task.rng_seed;
  j["dim"] = task.dim;
  j["lag"] = task.lag;
  j["alphabet"] = task.alphabet;
  j["omega"] = task.omega;
  j["zeta"] = task.zeta;
  j["dt"] = task.dt;
  j["period"] = task.period;
  return j;
}

Task task_from_json(const Json& j) {
  Task t;
  t.kind = task_kind_from_name(as_str(need(j, "kind"), "kind"));
  t.length = int_field(j, "length", t.length);
  t.split = int_field(j, "split", t.split);
  if (const Json* p = find(j, "rng_seed")) {
    require(p->is_number_integer(), Err::BadConfig, "field 'rng_seed' must be an integer");
    t.rng_seed = p->get<std::uint64_t>();
  }
  t.dim = int_field(j, "dim", t.dim);
  t.lag = int_field(j, "lag", t.lag);
  t.alphabet = int_field(j, "alphabet", t.alphabet);
  t.omega = num_field(j, "omega", t.omega);
  t.zeta = num_field(j, "zeta", t.zeta);
  t.dt = num_field(j, "dt", t.dt);
  t.period = num_field(j, "period", t.period);
  t.validate();
  return t;
}

Json json_of(const TrainTrace& trace) {
  Json j;
  j["loss"] = trace.loss;
  j["grad_norm"] = trace.grad_norm;
  j["nan_flag"] = trace.nan_flag;
  j["halted_at"] = trace.halted_at;
  j["params"] = trace.params;
  return j;
}

TrainTrace train_trace_from_json(const Json& j) {
  TrainTrace t;
  for (const Json& v : need(j, "loss")) t.loss.push_back(as_num(v, "loss entry"));
  for (const Json& v : need(j, "grad_norm")) t.grad_norm.push_back(as_num(v, "grad_norm entry"));
  t.nan_flag = as_bool(need(j, "nan_flag"), "nan_flag");
  t.halted_at = as_int(need(j, "halted_at"), "halted_at");
  t.params = vector_from_json(need(j, "params"));
  return t;
}

// ---------------------------------------------------------------------------
// files

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::IoError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(Err::IoError, "cannot parse '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::IoError, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  require(out.good(), Err::IoError, "write failed for '" + path + "'");
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  require(!header.empty(), Err::BadConfig, "csv needs a header");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::IoError, "cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  char buf[40];
  for (const auto& row : rows) {
    require(row.size() == header.size(), Err::DimMismatch, "csv row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf;
    }
    out << '\n';
  }
  require(out.good(), Err::IoError, "write failed for '" + path + "'");
}

}  // namespace odelab
