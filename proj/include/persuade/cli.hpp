#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "persuade/curve.hpp"
#include "persuade/extensions.hpp"
#include "persuade/model.hpp"

namespace persuade::cli {

enum class Variant { Main, MainWithPc, Unconditional, PhysicalCost, TestDesign, CostExample };

std::string to_string(Variant v);
// Throws ConfigError for unknown names.
Variant parse_variant(const std::string& name);

struct SolverSettings {
  std::size_t grid_n = 2001;
  double root_tol = 1e-10;
  std::size_t oracle_grid = 801;
  std::size_t mc_draws = 100000;
};

struct SweepSpec {
  std::string variable;  // empty selects the variant's prior
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = 201;
};

struct RunConfig {
  Variant variant = Variant::Main;
  ModelParams model;
  AnticipationCurve phi = AnticipationCurve::power(0.5);
  double psi = 0.05;
  TestModelParams test;
  CostExampleParams cost;
  SolverSettings solver;
  SweepSpec sweep;
  std::string report_path;
  std::string table_path;
  std::uint64_t seed = 42;
  double l_offset = 0.0;  // shifts the perfect-good-news lower atom; for negative controls
};

// Parses and validates a configuration document. Missing keys take their
// defaults; unknown keys and invalid values throw ConfigError with the path
// of the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
// Checks the parameters of the selected variant.
void validate(const RunConfig& cfg);

struct CommandResult {
  int exit_code = 0;
  std::string output;
};

// Structured JSON report of the optimal policy.
CommandResult cmd_solve(const RunConfig& cfg);
// Critical beliefs only, as JSON.
CommandResult cmd_thresholds(const RunConfig& cfg);
// CSV, one row per sweep point.
CommandResult cmd_sweep(const RunConfig& cfg);
// Per-check residual lines; exit code 1 if any check fails.
CommandResult cmd_verify(const RunConfig& cfg);

}  // namespace persuade::cli
