#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "persuade/cli.hpp"
#include "persuade/errors.hpp"

namespace {

// PERSUADE_LOG=info or debug prints progress to stderr.
int log_level() {
  const char* v = std::getenv("PERSUADE_LOG");
  if (!v) return 0;
  const std::string s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

void log(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "[persuade] " << msg << '\n';
}

nlohmann::json read_doc(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw persuade::ConfigError("config: cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw persuade::ConfigError(std::string("config: ") + e.what());
  }
}

bool write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal disclosure to an information-avoidant patient"};
  app.require_subcommand(1);

  std::string config_path, out_path, variant;
  long long seed = -1;
  long long grid = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--seed", seed, "Random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--grid", grid, "Belief grid size")->check(CLI::PositiveNumber);
    sub->add_option("--variant", variant,
                    "main, main-with-pc, unconditional, physical-cost, test-design or "
                    "cost-example");
  };
  auto* solve = app.add_subcommand("solve", "Solve for the optimal policy (JSON report)");
  auto* sweep = app.add_subcommand("sweep", "Tabulate the solution over a parameter range (CSV)");
  auto* verify = app.add_subcommand("verify", "Run the oracle and property checks");
  auto* thresholds = app.add_subcommand("thresholds", "Print the critical beliefs (JSON)");
  for (auto* sub : {solve, sweep, verify, thresholds}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    auto doc = read_doc(config_path);
    if (!doc.is_object()) throw persuade::ConfigError("config: top level must be an object");
    if (!variant.empty()) doc["variant"] = variant;
    if (seed >= 0) doc["seed"] = seed;
    if (grid > 0) doc["solver"]["grid_n"] = grid;
    const auto cfg = persuade::cli::parse_config(doc);
    log(1, "variant " + persuade::cli::to_string(cfg.variant) + ", seed " +
               std::to_string(cfg.seed));

    persuade::cli::CommandResult res;
    std::string path = out_path;
    if (*solve) {
      res = persuade::cli::cmd_solve(cfg);
      if (path.empty()) path = cfg.report_path;
    } else if (*sweep) {
      res = persuade::cli::cmd_sweep(cfg);
      if (path.empty()) path = cfg.table_path;
    } else if (*verify) {
      res = persuade::cli::cmd_verify(cfg);
    } else {
      res = persuade::cli::cmd_thresholds(cfg);
    }
    if (!write_out(path, res.output)) {
      std::cerr << "error: cannot write '" << path << "'\n";
      return 3;
    }
    log(2, "exit code " + std::to_string(res.exit_code));
    return res.exit_code;
  } catch (const persuade::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
