#include "odelab/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "odelab/adapters.hpp"
#include "odelab/clockham.hpp"
#include "odelab/errors.hpp"
#include "odelab/json_io.hpp"
#include "odelab/odernn.hpp"
#include "odelab/qunn.hpp"
#include "odelab/rk.hpp"
#include "odelab/stability.hpp"
#include "odelab/svg.hpp"
#include "odelab/training.hpp"

namespace odelab {
namespace {

constexpr const char* kToolVersion = "0.1.0";

const char* kUsage =
    "usage: odelab <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  stability   certify an update rule and probe twin trajectories\n"
    "  map         compile an architecture spec and check equivalence\n"
    "  integrate   run a tableau integrator on a linear field\n"
    "  train       fit a sequence model with finite-difference SGD\n"
    "  clockham    assemble a program Hamiltonian and verify its ground space\n"
    "  qunn-demo   run a clock network and report parameter scaling\n"
    "\n"
    "options:\n"
    "  --config PATH   configuration file (every subcommand except map)\n"
    "  --arch NAME     architecture to map: lstm, gru, urnn, cwrnn\n"
    "  --spec PATH     architecture spec file (map only)\n"
    "  --out DIR       output directory, created if absent (default .)\n"
    "  --seed N        random seed where applicable (default 1)\n"
    "  --format F      series artifact format, csv or json (default csv)\n";

struct Command {
  std::string subcommand;
  std::string config_path;
  std::string arch;
  std::string spec_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string format = "csv";
};

// ---------------------------------------------------------------------------
// artifact bookkeeping

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::IoError, "cannot reopen '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects size and content hash of each emitted file, then pins them in the
// manifest so a rerun can be checked bitwise.
struct ArtifactLog {
  std::string dir;
  Json files = Json::array();

  explicit ArtifactLog(std::string d) : dir(std::move(d)) {
    std::filesystem::create_directories(dir);
  }

  std::string path(const std::string& rel) const { return dir + "/" + rel; }

  void note(const std::string& rel) {
    std::string bytes = read_bytes(path(rel));
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    Json entry;
    entry["path"] = rel;
    entry["bytes"] = bytes.size();
    entry["fnv1a64"] = hex;
    files.push_back(entry);
  }

  void finish(const Command& cmd) {
    Json manifest;
    manifest["tool"] = "odelab";
    manifest["tool_version"] = kToolVersion;
    manifest["subcommand"] = cmd.subcommand;
    manifest["config_path"] = cmd.subcommand == "map" ? cmd.spec_path : cmd.config_path;
    manifest["seed"] = cmd.seed;
    manifest["format"] = cmd.format;
    manifest["files"] = files;
    write_json_file(path("run_manifest.json"), manifest);
  }
};

// Series artifacts switch between csv and a {"header","rows"} json layout.
std::string write_series(ArtifactLog& log, const Command& cmd, const std::string& stem,
                         const std::vector<std::string>& header,
                         const std::vector<std::vector<double>>& rows) {
  std::string rel;
  if (cmd.format == "csv") {
    rel = stem + ".csv";
    write_csv_file(log.path(rel), header, rows);
  } else {
    rel = stem + ".json";
    Json j;
    j["header"] = header;
    j["rows"] = rows;
    write_json_file(log.path(rel), j);
  }
  log.note(rel);
  return rel;
}

void write_plot(ArtifactLog& log, const std::string& rel, const std::string& title,
                const std::vector<SvgSeries>& series) {
  write_svg_plot(log.path(rel), title, series);
  log.note(rel);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

// ---------------------------------------------------------------------------
// subcommand runners

void run_stability(const Command& cmd, std::ostream& out) {
  Json config = load_json_file(cmd.config_path);
  require(config.contains("odernn"), Err::BadConfig, "config needs an 'odernn' section");
  OdeRnnConfig cfg = odernn_from_json(config["odernn"]);
  ProbePlan plan;
  if (config.contains("plan") && !config["plan"].is_null())
    plan = probe_plan_from_json(config["plan"]);
  if (cmd.seed_given) plan.rng_seed = cmd.seed;

  PerturbationTrace worst;
  StabilityReport report = analyze_stability(cfg, plan, &worst);

  ArtifactLog log(cmd.out_dir);
  write_json_file(log.path("stability_report.json"), json_of(report));
  log.note("stability_report.json");

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < worst.deviation.size(); ++k)
    rows.push_back({double(k), worst.deviation[k]});
  write_series(log, cmd, "deviation", {"step", "deviation"}, rows);
  write_plot(log, "deviation.svg", "worst-seed perturbation",
             {{"deviation", column(rows, 0), column(rows, 1)}});
  log.finish(cmd);

  out << "certified=" << (report.certified ? "true" : "false")
      << " min_eig_q=" << report.min_eig_q
      << " max_growth=" << report.empirical_max_growth
      << " probes=" << report.probes_run << "\n";
}

void run_map(const Command& cmd, std::ostream& out) {
  constexpr int kProbeSteps = 50;
  Rng rng(cmd.seed);

  MappingReport report;
  std::vector<Vector> native;
  OdeRnnConfig mapped;
  int input_dim = 0;

  if (cmd.arch == "lstm") {
    LstmSpec spec = lstm_from_json(load_json_file(cmd.spec_path));
    input_dim = spec.dim;
    std::vector<Vector> inputs;
    for (int t = 0; t < kProbeSteps; ++t) inputs.push_back(rng.gauss_vector(input_dim));
    native = lstm_run(spec, inputs);
    mapped = map_to_odernn(spec);
    report = mapping_report(spec);
  } else if (cmd.arch == "gru") {
    GruSpec spec = gru_from_json(load_json_file(cmd.spec_path));
    input_dim = spec.dim;
    std::vector<Vector> inputs;
    for (int t = 0; t < kProbeSteps; ++t) inputs.push_back(rng.gauss_vector(input_dim));
    native = gru_run(spec, inputs);
    mapped = map_to_odernn(spec);
    report = mapping_report(spec);
  } else if (cmd.arch == "urnn") {
    UrnnSpec spec = urnn_from_json(load_json_file(cmd.spec_path));
    input_dim = spec.input_dim;
    std::vector<Vector> inputs;
    for (int t = 0; t < kProbeSteps; ++t) inputs.push_back(rng.gauss_vector(input_dim));
    native = urnn_run(spec, inputs);
    mapped = map_to_odernn(spec);
    report = mapping_report(spec);
  } else if (cmd.arch == "cwrnn") {
    CwRnnSpec spec = cwrnn_from_json(load_json_file(cmd.spec_path));
    input_dim = spec.w_i.cols;
    std::vector<Vector> inputs;
    for (int t = 0; t < kProbeSteps; ++t) inputs.push_back(rng.gauss_vector(input_dim));
    native = cwrnn_run(spec, inputs);
    mapped = map_to_odernn(spec);
    report = mapping_report(spec);
  } else {
    fail(Err::BadConfig, "unknown architecture '" + cmd.arch + "'");
  }

  // The mapped run replays the same seeded inputs through the compiled rule.
  Rng replay(cmd.seed);
  std::vector<Vector> inputs;
  for (int t = 0; t < kProbeSteps; ++t) inputs.push_back(replay.gauss_vector(input_dim));
  OdernnRunner runner(mapped);
  std::vector<Vector> compiled = runner.run(inputs);

  std::vector<std::vector<double>> rows;
  double deviation = 0.0;
  for (std::size_t t = 0; t < native.size(); ++t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < native[t].size(); ++i)
      worst = std::max(worst, std::abs(native[t][i] - compiled[t][i]));
    deviation = std::max(deviation, worst);
    rows.push_back({double(t), worst});
  }

  ArtifactLog log(cmd.out_dir);
  Json j = json_of(report);
  j["equivalence_deviation"] = deviation;
  j["probe_steps"] = kProbeSteps;
  write_json_file(log.path("mapping_report.json"), j);
  log.note("mapping_report.json");
  write_series(log, cmd, "native_vs_mapped", {"step", "deviation"}, rows);
  write_plot(log, "deviation.svg", "native vs mapped deviation",
             {{"deviation", column(rows, 0), column(rows, 1)}});
  log.finish(cmd);

  out << "architecture=" << report.architecture << " layers=" << report.layers
      << " stages=" << report.realized_stages << " memory=" << report.realized_memory
      << " deviation=" << deviation << "\n";
}

void run_integrate(const Command& cmd, std::ostream& out) {
  Json config = load_json_file(cmd.config_path);
  require(config.contains("scheme"), Err::BadConfig, "config needs a 'scheme' section");
  RkScheme scheme = rk_scheme_from_json(config["scheme"]);
  require(config.contains("field"), Err::BadConfig, "config needs a 'field' section");
  const Json& field = config["field"];
  std::string kind = field.contains("kind") ? field["kind"].get<std::string>() : "linear";
  require(kind == "linear", Err::BadConfig, "unknown field kind '" + kind + "'");
  require(field.contains("matrix"), Err::BadConfig, "linear field needs a 'matrix'");
  Matrix a = matrix_from_json(field["matrix"]);
  require(a.square() && !a.empty(), Err::BadConfig, "field matrix must be square");

  require(config.contains("y0"), Err::BadConfig, "config needs a start state 'y0'");
  Vector y0 = vector_from_json(config["y0"]);
  require(int(y0.size()) == a.rows, Err::DimMismatch, "y0 must match the field dimension");
  require(config.contains("steps"), Err::BadConfig, "config needs a step count 'steps'");
  int steps = config["steps"].get<int>();
  require(steps >= 1, Err::BadConfig, "steps must be positive");
  double t0 = config.contains("t0") ? config["t0"].get<double>() : 0.0;

  OdeField f = [&a](const Vector& y, double) { return a * y; };
  std::vector<Vector> traj = rk_integrate(scheme, f, y0, steps, t0);

  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < y0.size(); ++i) header.push_back("y" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row{t0 + double(k) * scheme.delta};
    row.insert(row.end(), traj[k].begin(), traj[k].end());
    rows.push_back(row);
  }

  ArtifactLog log(cmd.out_dir);
  Json summary;
  summary["scheme_stages"] = scheme.stages;
  summary["delta"] = scheme.delta;
  summary["steps"] = steps;
  summary["final_time"] = t0 + double(steps) * scheme.delta;
  summary["final_state"] = json_of(traj.back());
  summary["final_norm"] = norm2(traj.back());
  write_json_file(log.path("integrate_summary.json"), summary);
  log.note("integrate_summary.json");

  write_series(log, cmd, "trajectory", header, rows);
  std::vector<SvgSeries> curves;
  for (std::size_t i = 0; i < y0.size(); ++i)
    curves.push_back({header[i + 1], column(rows, 0), column(rows, i + 1)});
  write_plot(log, "trajectory.svg", "integrated trajectory", curves);
  log.finish(cmd);

  out << "steps=" << steps << " final_norm=" << norm2(traj.back()) << "\n";
}

TrainableModel model_from_json(const Json& model, const Task& task, std::uint64_t seed) {
  require(model.contains("arch"), Err::BadConfig, "model needs an 'arch' name");
  std::string arch = model["arch"].get<std::string>();
  auto field = [&model](const char* name, int fallback) {
    return model.contains(name) ? model[name].get<int>() : fallback;
  };
  int dim = field("dim", task.dim);
  if (arch == "odernn")
    return make_trainable_odernn(field("stages", 2), field("memory", 2), dim, seed);
  if (arch == "certified") {
    double h = model.contains("h") ? model["h"].get<double>() : 0.5;
    std::string kind =
        model.contains("kind") ? model["kind"].get<std::string>() : "linear_skew_shift";
    DissipativeKind dk;
    if (kind == "linear_skew_shift")
      dk = DissipativeKind::linear_skew_shift;
    else if (kind == "tanh_diagonal")
      dk = DissipativeKind::tanh_diagonal;
    else
      fail(Err::BadConfig, "unknown dissipative kind '" + kind + "'");
    return make_trainable_certified(field("stages", 2), dim, h, dk, seed);
  }
  if (arch == "lstm") return make_trainable_lstm(field("layers", 1), dim, seed);
  if (arch == "gru") return make_trainable_gru(field("layers", 1), dim, seed);
  if (arch == "urnn") return make_trainable_urnn(field("layers", 1), dim, seed);
  if (arch == "cwrnn")
    return make_trainable_cwrnn(field("clocks", 2), field("block_size", 2), dim, seed);
  if (arch == "qunn")
    return make_trainable_qunn(field("clock_dim", 4), field("depth", 2), dim, seed);
  fail(Err::BadConfig, "unknown model architecture '" + arch + "'");
}

void run_train(const Command& cmd, std::ostream& out) {
  Json config = load_json_file(cmd.config_path);
  require(config.contains("task"), Err::BadConfig, "config needs a 'task' section");
  Task task = task_from_json(config["task"]);
  require(config.contains("model"), Err::BadConfig, "config needs a 'model' section");
  TrainableModel model = model_from_json(config["model"], task, cmd.seed);

  Dataset data = make_task_data(task);
  TrainRun run;
  run.loss_fn = task_loss(model, data);
  run.init = model.init;
  if (config.contains("train")) {
    const Json& t = config["train"];
    if (t.contains("steps")) run.steps = t["steps"].get<int>();
    if (t.contains("learn_rate")) run.learn_rate = t["learn_rate"].get<double>();
    if (t.contains("clip_norm")) run.clip_norm = t["clip_norm"].get<double>();
    if (t.contains("fd_delta")) run.fd_delta = t["fd_delta"].get<double>();
  }
  TrainTrace trace = train(run);

  std::vector<Vector> outputs = model.run(trace.params, data.inputs);
  double train_mse = window_mse(outputs, data, data.warmup, data.split);
  double test_mse = window_mse(outputs, data, data.split, int(data.inputs.size()));
  double baseline = constant_baseline(data, data.split, int(data.inputs.size()));

  ArtifactLog log(cmd.out_dir);
  write_json_file(log.path("train_trace.json"), json_of(trace));
  log.note("train_trace.json");

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < trace.loss.size(); ++k)
    rows.push_back({double(k), trace.loss[k], trace.grad_norm[k]});
  write_series(log, cmd, "train_metrics", {"step", "loss", "grad_norm"}, rows);

  Json summary;
  summary["arch"] = config["model"]["arch"];
  summary["param_count"] = model.param_count;
  summary["steps_run"] = trace.loss.size();
  summary["final_loss"] = trace.loss.empty() ? 0.0 : trace.loss.back();
  summary["train_mse"] = train_mse;
  summary["test_mse"] = test_mse;
  summary["baseline_test_mse"] = baseline;
  summary["nan_flag"] = trace.nan_flag;
  summary["halted_at"] = trace.halted_at;
  write_json_file(log.path("train_summary.json"), summary);
  log.note("train_summary.json");

  if (!rows.empty())
    write_plot(log, "loss.svg", "training loss", {{"loss", column(rows, 0), column(rows, 1)}});
  log.finish(cmd);

  out << "params=" << model.param_count << " train_mse=" << train_mse
      << " test_mse=" << test_mse << " baseline=" << baseline << "\n";
}

void run_clockham(const Command& cmd, std::ostream& out) {
  Json config = load_json_file(cmd.config_path);
  require(config.contains("program"), Err::BadConfig, "config needs a 'program' section");
  ClockProgram prog = clock_program_from_json(config["program"]);

  Vector initial(std::size_t(prog.data_dim), 0.0);
  initial[0] = 1.0;
  if (config.contains("initial")) initial = vector_from_json(config["initial"]);

  ClockHamiltonian ch = build_h_tm(prog);
  Vector history = history_state(prog, initial);
  GroundReport report = verify_ground_space(ch, prog, initial);
  Vector output = readout(history, ch.steps, ch.data_dim);

  double direct_dev = -1.0;
  if (prog.mode == ProgramMode::unitary) {
    Vector direct = initial;
    for (int j = 1; j <= prog.step_count(); ++j) direct = prog.step_matrix(j) * direct;
    direct_dev = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
      direct_dev = std::max(direct_dev, std::abs(direct[i] - output[i]));
  }

  ArtifactLog log(cmd.out_dir);
  write_json_file(log.path("ground_report.json"), json_of(report));
  log.note("ground_report.json");

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ch.spectrum.size(); ++i)
    rows.push_back({double(i), ch.spectrum[i]});
  write_series(log, cmd, "spectrum", {"index", "eigenvalue"}, rows);

  Json summary;
  summary["steps"] = ch.steps;
  summary["data_dim"] = ch.data_dim;
  summary["hamiltonian_dim"] = ch.h.rows;
  summary["ground_energy"] = ch.ground_energy;
  summary["gap"] = ch.gap;
  summary["readout"] = json_of(output);
  if (direct_dev >= 0.0) summary["readout_deviation"] = direct_dev;
  write_json_file(log.path("clockham_summary.json"), summary);
  log.note("clockham_summary.json");

  write_plot(log, "spectrum.svg", "program Hamiltonian spectrum",
             {{"eigenvalue", column(rows, 0), column(rows, 1)}});
  log.finish(cmd);

  out << "ground_energy=" << report.ground_energy << " gap=" << ch.gap
      << " residual=" << report.history_residual
      << " unique=" << (report.unique_in_sector ? "true" : "false") << "\n";
}

void run_qunn_demo(const Command& cmd, std::ostream& out) {
  Json config = load_json_file(cmd.config_path);
  require(config.contains("qunn"), Err::BadConfig, "config needs a 'qunn' section");
  QunnConfig cfg = qunn_from_json(config["qunn"]);
  int steps = config.contains("steps") ? config["steps"].get<int>() : cfg.clock_dim;
  require(steps >= 1, Err::BadConfig, "steps must be positive");

  Rng rng(cmd.seed);
  std::vector<Vector> inputs;
  for (int t = 0; t < steps; ++t) inputs.push_back(rng.gauss_vector(cfg.data_dim));
  std::vector<Vector> outputs = qunn_forward(cfg, inputs);

  // Parameter scaling comparison at matched hidden width n = N * s: shared
  // schedules stay constant in N, per-position schedules grow linearly,
  // a gated cell of the same width needs 8 n^2 weights.
  std::vector<std::vector<double>> counts;
  for (int n : {2, 4, 8, 16}) {
    QunnConfig shared = cfg;
    shared.clock_dim = n;
    shared.p1 = CoeffSchedule(cfg.p1.at(1));
    shared.p2 = CoeffSchedule(cfg.p2.at(1));
    shared.residual = ResidualSpec::scale_mix(std::vector<double>(std::size_t(cfg.depth), 1.0));
    shared.weight_base = Matrix{};
    QunnConfig per = shared;
    per.p1 = CoeffSchedule(std::vector<double>(std::size_t(n), cfg.p1.at(1)));
    per.p2 = CoeffSchedule(std::vector<double>(std::size_t(n), cfg.p2.at(1)));
    double hidden = double(n) * double(cfg.data_dim);
    counts.push_back({double(n), double(qunn_param_count(shared)),
                      double(qunn_param_count(per)), 8.0 * hidden * hidden});
  }

  ArtifactLog log(cmd.out_dir);
  Json report;
  report["clock_dim"] = cfg.clock_dim;
  report["depth"] = cfg.depth;
  report["data_dim"] = cfg.data_dim;
  report["hidden_dim"] = cfg.hidden_dim();
  report["param_count"] = qunn_param_count(cfg);
  report["lstm_param_count_same_width"] =
      8.0 * double(cfg.hidden_dim()) * double(cfg.hidden_dim());
  report["steps"] = steps;
  write_json_file(log.path("qunn_report.json"), report);
  log.note("qunn_report.json");

  std::vector<std::string> header{"step"};
  for (int i = 0; i < cfg.data_dim; ++i) header.push_back("out" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    std::vector<double> row{double(k)};
    row.insert(row.end(), outputs[k].begin(), outputs[k].end());
    rows.push_back(row);
  }
  write_series(log, cmd, "outputs", header, rows);

  write_series(log, cmd, "counts_vs_clock",
               {"clock_dim", "shared_params", "per_position_params", "gated_cell_params"},
               counts);
  write_plot(log, "counts.svg", "parameter count vs clock dimension",
             {{"per-position", column(counts, 0), column(counts, 2)},
              {"gated cell", column(counts, 0), column(counts, 3)}});
  log.finish(cmd);

  out << "params=" << qunn_param_count(cfg) << " hidden_dim=" << cfg.hidden_dim()
      << " steps=" << steps << "\n";
}

// ---------------------------------------------------------------------------
// argument parsing

bool parse_args(int argc, const char* const* argv, Command& cmd, std::string& problem) {
  cmd.subcommand = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string flag = argv[i];
    if (i + 1 >= argc) {
      problem = "flag '" + flag + "' needs a value";
      return false;
    }
    std::string value = argv[++i];
    if (flag == "--config") {
      cmd.config_path = value;
    } else if (flag == "--arch") {
      cmd.arch = value;
    } else if (flag == "--spec") {
      cmd.spec_path = value;
    } else if (flag == "--out") {
      cmd.out_dir = value;
    } else if (flag == "--seed") {
      try {
        cmd.seed = std::stoull(value);
      } catch (const std::exception&) {
        problem = "flag '--seed' needs a non-negative integer";
        return false;
      }
      cmd.seed_given = true;
    } else if (flag == "--format") {
      cmd.format = value;
    } else {
      problem = "unknown flag '" + flag + "'";
      return false;
    }
  }
  return true;
}

void check_thread_cap() {
  const char* cap = std::getenv("ODERNN_LAB_THREADS");
  if (!cap) return;
  char* end = nullptr;
  long v = std::strtol(cap, &end, 10);
  require(end != cap && *end == '\0' && v >= 1, Err::BadConfig,
          "ODERNN_LAB_THREADS must be a positive integer");
  // All module paths are single-threaded, so any positive cap is honored.
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    err << kUsage;
    return 2;
  }

  Command cmd;
  std::string problem;
  if (!parse_args(argc, argv, cmd, problem)) {
    err << "odelab: " << problem << "\n" << kUsage;
    return 2;
  }

  bool known = cmd.subcommand == "stability" || cmd.subcommand == "map" ||
               cmd.subcommand == "integrate" || cmd.subcommand == "train" ||
               cmd.subcommand == "clockham" || cmd.subcommand == "qunn-demo";
  if (!known) {
    err << "odelab: unknown subcommand '" << cmd.subcommand << "'\n" << kUsage;
    return 2;
  }

  if (cmd.subcommand == "map") {
    if (cmd.arch.empty() || cmd.spec_path.empty()) {
      err << "odelab: map needs --arch and --spec\n" << kUsage;
      return 2;
    }
  } else if (cmd.config_path.empty()) {
    err << "odelab: " << cmd.subcommand << " needs --config\n" << kUsage;
    return 2;
  }

  try {
    require(cmd.format == "csv" || cmd.format == "json", Err::BadConfig,
            "format must be 'csv' or 'json'");
    check_thread_cap();
    if (cmd.subcommand == "stability")
      run_stability(cmd, out);
    else if (cmd.subcommand == "map")
      run_map(cmd, out);
    else if (cmd.subcommand == "integrate")
      run_integrate(cmd, out);
    else if (cmd.subcommand == "train")
      run_train(cmd, out);
    else if (cmd.subcommand == "clockham")
      run_clockham(cmd, out);
    else
      run_qunn_demo(cmd, out);
  } catch (const Error& e) {
    err << "odelab: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "odelab: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace odelab
