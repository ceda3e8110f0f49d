#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "odelab/adapters.hpp"
#include "odelab/clockham.hpp"
#include "odelab/json_io.hpp"
#include "odelab/odernn.hpp"
#include "odelab/qunn.hpp"
#include "odelab/rk.hpp"
#include "odelab/stability.hpp"
#include "odelab/training.hpp"

using namespace odelab;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/odelab_jsonio_") + stem;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

bool same_matrices(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_matrix(a[i], b[i])) return false;
  return true;
}

Matrix random_orthogonal(Rng& rng, int n) {
  // Gram-Schmidt on a Gaussian draw.
  Matrix m = rng.gauss_matrix(n, n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += m(i, j) * m(i, k);
      for (int i = 0; i < n; ++i) m(i, j) -= d * m(i, k);
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += m(i, j) * m(i, j);
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) m(i, j) /= nrm;
  }
  return m;
}

}  // namespace

TEST_CASE("vectors and matrices survive the json round trip bitwise") {
  Vector v{1.5, -2.25, 0.1, 1e-308};
  CHECK(vector_from_json(json_of(v)) == v);

  Rng rng(11);
  Matrix m = rng.gauss_matrix(3, 4, 1.0);
  Matrix back = matrix_from_json(json_of(m));
  CHECK(same_matrix(m, back));
}

TEST_CASE("an empty matrix is stored as null and read back empty") {
  Matrix empty;
  Json j = json_of(empty);
  CHECK(j.is_null());
  CHECK(matrix_from_json(j).empty());
}

TEST_CASE("malformed matrix objects are rejected with the field named") {
  Json bad;
  bad["rows"] = 2;
  bad["cols"] = 2;
  bad["data"] = Json::array({1.0, 2.0, 3.0});
  try {
    matrix_from_json(bad);
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DimMismatch);
  }

  try {
    matrix_from_json(Json::array({1.0}));
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::BadConfig);
  }

  Json zero;
  zero["rows"] = 0;
  zero["cols"] = 3;
  zero["data"] = Json::array();
  CHECK_THROWS_AS(matrix_from_json(zero), Error);
}

TEST_CASE("a certified update-rule config reloads to an identical machine") {
  OdeRnnConfig cfg = make_certified_config(2, 3, 0.5, DissipativeKind::linear_skew_shift, 7);
  OdeRnnConfig back = odernn_from_json(json_of(cfg));

  CHECK(back.stages == cfg.stages);
  CHECK(back.memory == cfg.memory);
  CHECK(back.state_dim == cfg.state_dim);
  CHECK(back.hidden_dim == cfg.hidden_dim);
  CHECK(back.h == cfg.h);
  CHECK(back.coupling == cfg.coupling);
  CHECK(back.padding == cfg.padding);
  CHECK(same_matrices(back.W, cfg.W));
  CHECK(back.b == cfg.b);
  CHECK(same_matrices(back.beta, cfg.beta));
  CHECK(same_matrices(back.kappa, cfg.kappa));

  // Strongest check: both machines produce bitwise-equal trajectories.
  Rng rng(3);
  Vector y0 = rng.gauss_vector(cfg.state_dim);
  OdernnRunner a(cfg), b(back);
  auto ta = a.free_run(y0, 20);
  auto tb = b.free_run(y0, 20);
  REQUIRE(ta.size() == tb.size());
  for (size_t t = 0; t < ta.size(); ++t) CHECK(ta[t] == tb[t]);
}

TEST_CASE("absent coefficient blocks default to empty slots of the right count") {
  Json j;
  j["stages"] = 2;
  j["memory"] = 3;
  j["state_dim"] = 2;
  j["hidden_dim"] = 2;
  j["h"] = 0.25;
  Json ws = Json::array();
  Json bs = Json::array();
  for (int q = 0; q < 3; ++q) {
    ws.push_back(json_of(Matrix::identity(2)));
    bs.push_back(json_of(Vector{0.0, 0.0}));
  }
  j["W"] = ws;
  j["b"] = bs;

  OdeRnnConfig cfg = odernn_from_json(j);
  CHECK(cfg.alpha.size() == 2);
  CHECK(cfg.alpha[0].size() == 2);
  CHECK(cfg.alpha[1][1].empty());
  CHECK(cfg.beta.size() == 2);
  CHECK(cfg.gamma.size() == 3);
  CHECK(cfg.kappa.size() == 3);
  CHECK(cfg.sigma.size() == 3);
  CHECK(cfg.sigma[0].is_identity());
  CHECK(cfg.coupling == Coupling::direct);
  CHECK(cfg.padding == Padding::zero);
}

TEST_CASE("runtime-only configs refuse to serialize") {
  Rng rng(5);
  LstmSpec spec;
  spec.layers = 1;
  spec.dim = 2;
  spec.w.push_back(rng.gauss_matrix(8, 4, 0.4));
  OdeRnnConfig mapped = map_to_odernn(spec);
  try {
    json_of(mapped);
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::UnsupportedSpec);
  }

  OdeRnnConfig custom = make_certified_config(2, 2, 0.5, DissipativeKind::tanh_diagonal, 1);
  custom.sigma[1] = StageFn::wrap([](const Vector& v) { return v; });
  try {
    json_of(custom);
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::UnsupportedSpec);
  }
}

TEST_CASE("integrator tableaus round trip and accept the name shorthand") {
  RkScheme rk4 = rk4_classic(0.125);
  RkScheme back = rk_scheme_from_json(json_of(rk4));
  CHECK(back.stages == rk4.stages);
  CHECK(same_matrix(back.a, rk4.a));
  CHECK(back.e == rk4.e);
  CHECK(back.c == rk4.c);
  CHECK(back.d == rk4.d);
  CHECK(back.delta == rk4.delta);

  Json named;
  named["name"] = "implicit_midpoint";
  named["delta"] = 0.0625;
  RkScheme mid = rk_scheme_from_json(named);
  RkScheme ref = rk_implicit_midpoint(0.0625);
  CHECK(mid.stages == ref.stages);
  CHECK(same_matrix(mid.a, ref.a));
  CHECK(mid.e == ref.e);

  Json bad;
  bad["name"] = "leapfrog";
  bad["delta"] = 0.1;
  CHECK_THROWS_AS(rk_scheme_from_json(bad), Error);
}

TEST_CASE("a tableau without nodes gets zero shifts and unit damping") {
  Json j;
  j["stages"] = 1;
  Matrix a(1, 1);
  j["a"] = json_of(a);
  j["e"] = json_of(Vector{1.0});
  j["delta"] = 0.5;
  RkScheme s = rk_scheme_from_json(j);
  CHECK(s.c == Vector{0.0});
  CHECK(s.d == Vector{1.0});
}

TEST_CASE("probe plans and stability reports keep every field") {
  ProbePlan plan;
  plan.steps = 77;
  plan.seeds = 13;
  plan.delta_norm = 2e-5;
  plan.step_tol = 3e-10;
  plan.rng_seed = 42;
  ProbePlan pback = probe_plan_from_json(json_of(plan));
  CHECK(pback.steps == plan.steps);
  CHECK(pback.seeds == plan.seeds);
  CHECK(pback.delta_norm == plan.delta_norm);
  CHECK(pback.step_tol == plan.step_tol);
  CHECK(pback.rng_seed == plan.rng_seed);

  StabilityReport rep;
  rep.certified = true;
  rep.q_psd = true;
  rep.betas_psd = {true, false, true};
  rep.min_eig_q = 1.25e-3;
  rep.empirical_max_growth = 1.0 + 1e-9;
  rep.probes_run = 100;
  StabilityReport rback = stability_report_from_json(json_of(rep));
  CHECK(rback.certified == rep.certified);
  CHECK(rback.q_psd == rep.q_psd);
  CHECK(rback.betas_psd == rep.betas_psd);
  CHECK(rback.min_eig_q == rep.min_eig_q);
  CHECK(rback.empirical_max_growth == rep.empirical_max_growth);
  CHECK(rback.probes_run == rep.probes_run);
}

TEST_CASE("all four architecture specs reload with identical weights") {
  Rng rng(23);

  LstmSpec lstm;
  lstm.layers = 2;
  lstm.dim = 3;
  for (int l = 0; l < 2; ++l) lstm.w.push_back(rng.gauss_matrix(12, 6, 0.3));
  lstm.gates[3] = Act::relu;
  lstm.cells.push_back(rng.gauss_vector(3));
  lstm.cells.push_back(rng.gauss_vector(3));
  LstmSpec lback = lstm_from_json(json_of(lstm));
  CHECK(lback.layers == lstm.layers);
  CHECK(lback.dim == lstm.dim);
  CHECK(same_matrices(lback.w, lstm.w));
  CHECK(lback.gates == lstm.gates);
  CHECK(lback.cells == lstm.cells);

  GruSpec gru;
  gru.layers = 1;
  gru.dim = 2;
  gru.w.push_back(rng.gauss_matrix(4, 4, 0.3));
  gru.w_x.push_back(rng.gauss_matrix(2, 2, 0.3));
  gru.w_g.push_back(rng.gauss_matrix(2, 2, 0.3));
  GruSpec gback = gru_from_json(json_of(gru));
  CHECK(gback.layers == gru.layers);
  CHECK(same_matrices(gback.w, gru.w));
  CHECK(same_matrices(gback.w_x, gru.w_x));
  CHECK(same_matrices(gback.w_g, gru.w_g));
  CHECK(gback.gate == gru.gate);

  UrnnSpec urnn;
  urnn.layers = 1;
  urnn.dim = 3;
  urnn.input_dim = 3;
  urnn.skew_params.push_back(rng.gauss_vector(3));
  urnn.v.push_back(rng.gauss_matrix(3, 3, 0.3));
  UrnnSpec uback = urnn_from_json(json_of(urnn));
  CHECK(uback.layers == urnn.layers);
  CHECK(uback.dim == urnn.dim);
  CHECK(uback.input_dim == urnn.input_dim);
  CHECK(uback.skew_params == urnn.skew_params);
  CHECK(same_matrices(uback.v, urnn.v));
  CHECK(uback.activation == urnn.activation);

  CwRnnSpec cw;
  cw.block_sizes = {2, 2};
  cw.periods = {1, 4};
  cw.w_h = rng.gauss_matrix(4, 4, 0.3);
  cw.w_i = rng.gauss_matrix(4, 1, 0.3);
  cw.w_o = rng.gauss_matrix(1, 4, 0.3);
  CwRnnSpec cback = cwrnn_from_json(json_of(cw));
  CHECK(cback.block_sizes == cw.block_sizes);
  CHECK(cback.periods == cw.periods);
  CHECK(same_matrix(cback.w_h, cw.w_h));
  CHECK(same_matrix(cback.w_i, cw.w_i));
  CHECK(same_matrix(cback.w_o, cw.w_o));
}

TEST_CASE("clockwork specs without periods get the doubling ladder") {
  Rng rng(31);
  Json j;
  j["block_sizes"] = Json::array({1, 1, 1});
  j["w_h"] = json_of(rng.gauss_matrix(3, 3, 0.3));
  j["w_i"] = json_of(rng.gauss_matrix(3, 1, 0.3));
  j["w_o"] = json_of(rng.gauss_matrix(1, 3, 0.3));
  CwRnnSpec spec = cwrnn_from_json(j);
  CHECK(spec.periods == std::vector<long long>{1, 2, 4});
}

TEST_CASE("mapping reports keep all order fields") {
  MappingReport rep;
  rep.architecture = "lstm";
  rep.layers = 3;
  rep.realized_stages = 9;
  rep.realized_memory = 1;
  rep.stacked_nonlinearity_order = 6;
  rep.stacked_memory_order = 3;
  rep.per_layer_nonlinearity_order = 2;
  rep.per_layer_memory_order = 1;
  MappingReport back = mapping_report_from_json(json_of(rep));
  CHECK(back.architecture == rep.architecture);
  CHECK(back.layers == rep.layers);
  CHECK(back.realized_stages == rep.realized_stages);
  CHECK(back.realized_memory == rep.realized_memory);
  CHECK(back.stacked_nonlinearity_order == rep.stacked_nonlinearity_order);
  CHECK(back.stacked_memory_order == rep.stacked_memory_order);
  CHECK(back.per_layer_nonlinearity_order == rep.per_layer_nonlinearity_order);
  CHECK(back.per_layer_memory_order == rep.per_layer_memory_order);
}

TEST_CASE("clock-network configs round trip through both schedule forms") {
  QunnConfig cfg;
  cfg.clock_dim = 4;
  cfg.depth = 2;
  cfg.data_dim = 1;
  cfg.p1 = CoeffSchedule(0.3);
  cfg.p2 = CoeffSchedule(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  cfg.residual = ResidualSpec::scale_mix({0.9, 1.1});
  cfg.sigma_out = Act::identity;
  Rng rng(17);
  Matrix g = rng.gauss_matrix(4, 4, 0.5);
  cfg.weight_base = Matrix(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) cfg.weight_base(i, k) = g(i, k) - g(k, i);

  Json j = json_of(cfg);
  CHECK(j["p1"].is_number());
  CHECK(j["p2"].is_array());

  QunnConfig back = qunn_from_json(j);
  CHECK(back.clock_dim == cfg.clock_dim);
  CHECK(back.depth == cfg.depth);
  CHECK(back.data_dim == cfg.data_dim);
  CHECK(back.p1.values == cfg.p1.values);
  CHECK(back.p2.values == cfg.p2.values);
  CHECK(back.residual.kind == cfg.residual.kind);
  CHECK(back.residual.scale == cfg.residual.scale);
  CHECK(back.sigma_in == cfg.sigma_in);
  CHECK(back.sigma_hidden == cfg.sigma_hidden);
  CHECK(back.sigma_out == cfg.sigma_out);
  CHECK(same_matrix(back.weight_base, cfg.weight_base));
}

TEST_CASE("residual kinds are named and unknown names rejected") {
  QunnConfig cfg;
  cfg.clock_dim = 2;
  cfg.depth = 1;
  cfg.data_dim = 1;
  Json j = json_of(cfg);
  CHECK(j["residual"]["kind"] == "identity");
  CHECK(j["weight_base"].is_null());

  j["residual"]["kind"] = "spline";
  CHECK_THROWS_AS(qunn_from_json(j), Error);
}

TEST_CASE("clock programs round trip in both modes") {
  Rng rng(29);
  ClockProgram prog;
  prog.data_dim = 2;
  prog.unitaries.push_back(random_orthogonal(rng, 2));
  prog.unitaries.push_back(random_orthogonal(rng, 2));
  ClockProgram back = clock_program_from_json(json_of(prog));
  CHECK(back.data_dim == prog.data_dim);
  CHECK(back.mode == ProgramMode::unitary);
  CHECK(same_matrices(back.unitaries, prog.unitaries));

  ClockProgram r1;
  r1.data_dim = 2;
  r1.mode = ProgramMode::rank_one;
  r1.reads.push_back(Vector{1.0, 0.0});
  r1.writes.push_back(Vector{0.0, 1.0});
  ClockProgram rback = clock_program_from_json(json_of(r1));
  CHECK(rback.mode == ProgramMode::rank_one);
  CHECK(rback.reads == r1.reads);
  CHECK(rback.writes == r1.writes);
}

TEST_CASE("truth-table steps expand to their permutation matrices on load") {
  Json j;
  j["data_dim"] = 2;
  Json step;
  step["truth_table"] = Json::array({1, 0});
  step["bits"] = 1;
  j["unitaries"] = Json::array({step});
  ClockProgram prog = clock_program_from_json(j);
  REQUIRE(prog.unitaries.size() == 1);
  CHECK(same_matrix(prog.unitaries[0], compile_truth_table({1, 0}, 1)));
}

TEST_CASE("ground reports keep every field") {
  GroundReport rep;
  rep.ground_energy = 1.5e-12;
  rep.sector_gap = 0.031;
  rep.history_residual = 4.2e-13;
  rep.unique_in_sector = true;
  GroundReport back = ground_report_from_json(json_of(rep));
  CHECK(back.ground_energy == rep.ground_energy);
  CHECK(back.sector_gap == rep.sector_gap);
  CHECK(back.history_residual == rep.history_residual);
  CHECK(back.unique_in_sector == rep.unique_in_sector);
}

TEST_CASE("tasks round trip and default everything except the kind") {
  Task t;
  t.kind = TaskKind::sine_prediction;
  t.length = 128;
  t.split = 96;
  t.rng_seed = 9;
  t.period = 24.0;
  Task back = task_from_json(json_of(t));
  CHECK(back.kind == t.kind);
  CHECK(back.length == t.length);
  CHECK(back.split == t.split);
  CHECK(back.rng_seed == t.rng_seed);
  CHECK(back.period == t.period);

  Json minimal;
  minimal["kind"] = "delayed_copy";
  Task d = task_from_json(minimal);
  Task ref;
  CHECK(d.length == ref.length);
  CHECK(d.split == ref.split);
  CHECK(d.lag == ref.lag);
  CHECK(d.alphabet == ref.alphabet);

  minimal["kind"] = "parity";
  CHECK_THROWS_AS(task_from_json(minimal), Error);
}

TEST_CASE("training traces reload with losses and final parameters intact") {
  TrainTrace tr;
  tr.loss = {1.0, 0.5, 0.25};
  tr.grad_norm = {2.0, 1.0, 0.5};
  tr.nan_flag = false;
  tr.halted_at = -1;
  tr.params = {0.1, -0.2};
  TrainTrace back = train_trace_from_json(json_of(tr));
  CHECK(back.loss == tr.loss);
  CHECK(back.grad_norm == tr.grad_norm);
  CHECK(back.nan_flag == tr.nan_flag);
  CHECK(back.halted_at == tr.halted_at);
  CHECK(back.params == tr.params);
}

TEST_CASE("json files write with stable bytes and read back equal") {
  std::string path = temp_path("roundtrip.json");
  Json j;
  j["zeta"] = 0.1;
  j["alpha"] = Json::array({1, 2, 3});
  j["name"] = "probe";
  write_json_file(path, j);
  std::string first = slurp(path);
  CHECK(!first.empty());
  CHECK(first.back() == '\n');
  write_json_file(path, j);
  CHECK(slurp(path) == first);

  Json back = load_json_file(path);
  CHECK(back == j);
  // Keys serialize in sorted order, so dumps are layout-independent.
  CHECK(first.find("\"alpha\"") < first.find("\"name\""));
  CHECK(first.find("\"name\"") < first.find("\"zeta\""));
  std::remove(path.c_str());
}

TEST_CASE("missing and malformed files surface as io errors") {
  try {
    load_json_file("/tmp/odelab_jsonio_does_not_exist.json");
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::IoError);
  }

  std::string path = temp_path("garbage.json");
  {
    std::ofstream out(path);
    out << "{not json";
  }
  try {
    load_json_file(path);
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::IoError);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv files carry full double precision and reject ragged rows") {
  std::string path = temp_path("table.csv");
  write_csv_file(path, {"step", "value"}, {{0.0, 0.1}, {1.0, 0.25}});
  CHECK(slurp(path) ==
        "step,value\n"
        "0,0.10000000000000001\n"
        "1,0.25\n");
  write_csv_file(path, {"step", "value"}, {{0.0, 0.1}, {1.0, 0.25}});
  CHECK(slurp(path) ==
        "step,value\n"
        "0,0.10000000000000001\n"
        "1,0.25\n");
  std::remove(path.c_str());

  try {
    write_csv_file(temp_path("ragged.csv"), {"a", "b"}, {{1.0}});
    FAIL("expected a rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DimMismatch);
  }
  std::remove(temp_path("ragged.csv").c_str());
}
