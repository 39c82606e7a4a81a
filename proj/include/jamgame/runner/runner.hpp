#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jamgame/reactive_solver.hpp"
#include "jamgame/runner/config.hpp"

namespace jamgame::runner {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNotConverged = 3 };

/// Outputs of one non-sweep run.
struct PointResult {
  Json outputs = Json::object();
  std::vector<reactive::TraceRow> trace;
  bool has_trace = false;
  bool converged = true;
  std::string error;  // set when the solver could not produce a point
};

/// Runs one point; `config.mode` must not be sweep. Invalid combinations
/// throw ConfigError; solver failures are reported through `error`.
PointResult run_point(const ExperimentConfig& config);

/// Expands a sweep into its points, first axis outermost.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

/// Column order of the table for one mode.
std::vector<std::string> table_columns(Mode mode, std::size_t dim);

std::string trace_csv(const std::vector<reactive::TraceRow>& trace);

struct RunOutcome {
  Json record;                 // config, outputs, provenance, optional trace file name
  std::vector<Json> rows;      // table rows
  std::vector<std::string> columns;
  int exit_code = kExitOk;
};

/// Runs a config. With a nonempty `out_dir` it writes result.json,
/// table.csv and, for solver runs, the trace files there.
RunOutcome run(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

std::string version();

}  // namespace jamgame::runner
