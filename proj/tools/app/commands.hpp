#pragma once

#include "config.hpp"

#include <nlohmann/json.hpp>

#include <exception>
#include <optional>
#include <string>

namespace cocyclelab::app {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitError = 1,
  kExitNegative = 2,
  kExitInconclusive = 3,
};

struct CommandOutput {
  int exit_code = kExitSuccess;
  nlohmann::json document;  // command, version, config, status, result
  std::string csv;          // empty when the command has no rows to export
};

// Runs the command in memory. Module errors become documents with exit code
// 1, or 3 for exhausted budgets.
CommandOutput execute(const ExperimentConfig& cfg);

nlohmann::json error_document(const std::string& command, const nlohmann::json& config,
                              const std::exception& e);

// Writes <out>/<command>.json, the optional .csv, and the
// <command>.meta.json timing sidecar. Returns the exit code.
int run(const ExperimentConfig& cfg);

}  // namespace cocyclelab::app
