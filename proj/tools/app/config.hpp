#pragma once

// Experiment configuration: JSON file plus command line overrides, validated
// in full before anything runs.

#include <cocyclelab/cocycle.hpp>
#include <cocyclelab/lyapunov.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cocyclelab::app {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "spectrum",     "periodic-scan", "certify",      "growth-bound",  "shadow",
      "livsic-check", "livsic-solve",  "livsic-verify", "contradiction"};
  return names;
}

bool is_stochastic(const std::string& command);

struct Params {
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> orbit_budget;
  std::optional<std::uint64_t> samples;
  std::uint64_t budget = kDefaultBudget;
  std::optional<int> max_period;
  std::optional<int> depth;
  std::optional<int> n_max;
  std::optional<int> growth_n_max;
  std::optional<int> verify_n;
  std::optional<int> n;
  std::optional<int> point_start;
  std::optional<int> exterior;
  std::optional<int> obstruction_period;
  std::optional<double> rho;
  std::optional<double> tau;
  std::optional<double> eps;
  std::optional<double> c;
  std::optional<double> tol;
  std::optional<double> defect_tol;
  std::optional<bool> centered;
  std::optional<bool> determinant;
  std::optional<bool> ground_truth;
  std::optional<std::string> point;
  std::optional<std::string> word;
  std::optional<std::string> window;
  std::optional<std::string> table_path;
  std::vector<double> rho_grid;
  std::vector<double> tau_grid;
  std::optional<Matrix> gauge;
};

struct ExperimentConfig {
  std::string command;
  nlohmann::json resolved;  // input with overrides and defaults applied
  Sft sft;
  MatrixGenerator generator;
  std::string builtin;      // generator family name, "table" for explicit tables
  std::optional<ErgodicMeasure> measure;
  Params params;
  std::string out_dir;
  bool csv = false;
};

// "--key value" pairs. Keys without a dot address the params section; dotted
// keys address any section ("output.dir"). Values are parsed as JSON when
// possible and kept as strings otherwise.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws IoError when the file cannot be read and SchemaError carrying every
// violation found otherwise.
ExperimentConfig parse_config(const std::string& path, const std::string& command,
                              const Overrides& overrides = {},
                              const std::optional<std::string>& out_dir = std::nullopt);

ExperimentConfig parse_config_json(nlohmann::json doc, const std::string& command,
                                   const Overrides& overrides = {},
                                   const std::optional<std::string>& out_dir = std::nullopt);

// Budget cap from COCYCLELAB_BUDGET, if set to a positive integer.
std::optional<std::uint64_t> budget_from_env();

}  // namespace cocyclelab::app
