// JSON and CSV serialization for configs and reports.
//
// Every writer has a matching loader so emitted reports round-trip through
// the library's own parsing. Loaders validate what they return: a config
// read from disk is immediately usable or the load throws. Matrices are
// stored row-major as {"rows", "cols", "data"}; an absent or null matrix
// field reads back as the empty matrix (the zero/identity placeholder the
// step engines understand). Dynamical-weight configs and custom activation
// closures are runtime objects with no faithful file form; serializing one
// throws UnsupportedSpec.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "odelab/adapters.hpp"
#include "odelab/clockham.hpp"
#include "odelab/odernn.hpp"
#include "odelab/qunn.hpp"
#include "odelab/rk.hpp"
#include "odelab/stability.hpp"
#include "odelab/training.hpp"

namespace odelab {

using Json = nlohmann::json;

// ---- primitives ----
Json json_of(const Vector& v);
Json json_of(const Matrix& m);  // empty matrix -> null
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);  // null -> empty matrix

// ---- update-rule configs ----
Json json_of(const OdeRnnConfig& cfg);
OdeRnnConfig odernn_from_json(const Json& j);

Json json_of(const RkScheme& scheme);
// Accepts either a full tableau or {"name": "rk4", "delta": h} shorthand.
RkScheme rk_scheme_from_json(const Json& j);

// ---- stability ----
Json json_of(const ProbePlan& plan);
ProbePlan probe_plan_from_json(const Json& j);
Json json_of(const StabilityReport& report);
StabilityReport stability_report_from_json(const Json& j);

// ---- architecture specs and mapping reports ----
Json json_of(const LstmSpec& spec);
LstmSpec lstm_from_json(const Json& j);
Json json_of(const GruSpec& spec);
GruSpec gru_from_json(const Json& j);
Json json_of(const UrnnSpec& spec);
UrnnSpec urnn_from_json(const Json& j);
Json json_of(const CwRnnSpec& spec);
CwRnnSpec cwrnn_from_json(const Json& j);
Json json_of(const MappingReport& report);
MappingReport mapping_report_from_json(const Json& j);

// ---- clocked unitary networks ----
Json json_of(const QunnConfig& cfg);
QunnConfig qunn_from_json(const Json& j);

// ---- clock Hamiltonians ----
// Unitary entries may be written inline as matrices or as
// {"truth_table": [...], "bits": b}, which compiles to the reversible
// permutation (or ancilla embedding) of that table.
Json json_of(const ClockProgram& prog);
ClockProgram clock_program_from_json(const Json& j);
Json json_of(const GroundReport& report);
GroundReport ground_report_from_json(const Json& j);

// ---- tasks and training ----
Json json_of(const Task& task);
Task task_from_json(const Json& j);
Json json_of(const TrainTrace& trace);
TrainTrace train_trace_from_json(const Json& j);

// ---- files ----
// Parse failures and filesystem errors throw IoError.
Json load_json_file(const std::string& path);
// Stable formatting: two-space indent, sorted keys, trailing newline, so a
// rerun reproduces the exact bytes.
void write_json_file(const std::string& path, const Json& j);

// One header row plus %.17g-formatted data rows; rewriting the same data
// reproduces the file bitwise.
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

}  // namespace odelab
