#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "provis/json.hpp"
#include "provis/session.hpp"

namespace provis {

struct ScriptStep {
  std::string view;
  Selection selection;
};

/// [{"view", "selection"}] or {"steps": [...]}. Throws ParseError, BadSelection.
std::vector<ScriptStep> script_from_json(const Json& j);
Json script_to_json(const std::vector<ScriptStep>& steps);
/// Range brushes over the views of the flight dashboard, cycling through them.
std::vector<ScriptStep> random_script(std::size_t steps, std::uint64_t seed);

struct BenchOptions {
  std::filesystem::path data;
  std::vector<ScriptStep> script;
  /// Repetitions of each measurement; the first is discarded when there are more.
  int reps = 5;
  bool http = true;
  /// ontime rows in the sample the result-equivalence guard checks.
  std::size_t guard_rows = 1000;
};

/// Nearest-rank percentile, q in [0, 1]; 0 for an empty sample.
double percentile(std::vector<double> samples, double q);

/// Crossfilter output on a sample of `data` compared with re-executing every
/// other view with the selection as a predicate. Returns the number of
/// (step, view) pairs checked; throws InvalidArgument on a mismatch.
std::size_t check_result_equivalence(const Catalog& data, const std::vector<ScriptStep>& script,
                                     std::size_t sample_rows);

/// Loads the dataset, runs the guard, then times the dashboard build with and
/// without lineage, traces, and the script's crossfilters in process and over
/// HTTP. Engine errors propagate.
Json run_bench(const BenchOptions& options);

/// Compiler, build type, CPU and thread count.
Json environment_note();

}  // namespace provis
