// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "subexp/config.hpp"
#include "subexp/experiments.hpp"

namespace subexp {

/// Column order of results.csv.
inline constexpr const char* kCsvHeader = "run_id,experiment,strategy,seed,n,statistic,value,tolerance,verdict";

/// Exit codes of `run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

/// 16 hex digits of FNV-1a over the resolved config, excluding output_dir
/// and threads so the id is stable across output locations and parallelism.
std::string run_id(const RunConfig& config);

/// Dispatches to the experiment named in the config.
ExperimentResult execute(const RunConfig& config);

/// Doubles are written with 17 significant digits.
std::string format_double(double x);
std::string results_csv(const ExperimentResult& result, const std::string& run_id);
nlohmann::json results_json(const ExperimentResult& result, const std::string& run_id);

/// Executes and writes results.json, results.csv and resolved_config.json
/// into config.output_dir. Returns kExitPass iff every verdict passes. On
/// an exception, writes failure.json and returns kExitError.
int run(const RunConfig& config, std::ostream& log);

/// Writes failure.json {"error", "message"} into `dir`.
void write_failure(const std::string& dir, const std::string& kind, const std::string& message);

}  // namespace subexp
