#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "persuade/cli.hpp"
#include "persuade/errors.hpp"

namespace persuade::cli {
namespace {

using nlohmann::json;

void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "must be a number");
  out = v.get<double>();
  if (!std::isfinite(out)) fail(join(path, key), "must be finite");
}

void read(const json& obj, const std::string& path, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(join(path, key), "must be a nonnegative integer");
  }
  out = v.get<std::size_t>();
}

void read(const json& obj, const std::string& path, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "must be a string");
  out = v.get<std::string>();
}

AnticipationCurve parse_phi(const json& j) {
  if (!j.is_object()) fail("phi", "must be an object");
  std::string family = "linear";
  read(j, "phi", "family", family);
  if (family == "linear") {
    only_keys(j, "phi", {"family"});
    return AnticipationCurve::linear();
  }
  if (family == "power") {
    only_keys(j, "phi", {"family", "gamma"});
    double g = 0.5;
    read(j, "phi", "gamma", g);
    return AnticipationCurve::power(g);
  }
  if (family == "exponential") {
    only_keys(j, "phi", {"family", "rate"});
    double k = 1.5;
    read(j, "phi", "rate", k);
    return AnticipationCurve::exponential(k);
  }
  if (family == "inverse_s") {
    only_keys(j, "phi", {"family", "kink", "strength", "exponent"});
    AnticipationCurve::InverseS s{0.5};
    read(j, "phi", "kink", s.kink);
    read(j, "phi", "strength", s.strength);
    read(j, "phi", "exponent", s.exponent);
    return AnticipationCurve(s);
  }
  if (family == "tabulated") {
    only_keys(j, "phi", {"family", "knots"});
    if (!j.contains("knots") || !j.at("knots").is_array()) {
      fail("phi.knots", "must be an array of [v, phi(v)] pairs");
    }
    std::vector<std::pair<double, double>> knots;
    const auto& arr = j.at("knots");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& k = arr[i];
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
        fail("phi.knots[" + std::to_string(i) + "]", "must be a pair [v, phi(v)]");
      }
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return AnticipationCurve::tabulated(std::move(knots));
  }
  fail("phi.family", "unknown family '" + family + "'");
  return AnticipationCurve::linear();
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Main:
      return "main";
    case Variant::MainWithPc:
      return "main-with-pc";
    case Variant::Unconditional:
      return "unconditional";
    case Variant::PhysicalCost:
      return "physical-cost";
    case Variant::TestDesign:
      return "test-design";
    case Variant::CostExample:
      return "cost-example";
  }
  return "main";
}

Variant parse_variant(const std::string& name) {
  for (auto v : {Variant::Main, Variant::MainWithPc, Variant::Unconditional, Variant::PhysicalCost,
                 Variant::TestDesign, Variant::CostExample}) {
    if (to_string(v) == name) return v;
  }
  fail("variant", "unknown variant '" + name + "'");
  return Variant::Main;
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "", {"variant", "model", "phi", "physical_cost", "test_design", "cost_example",
                      "solver", "sweep", "output", "seed", "test_hooks"});
  RunConfig cfg;
  if (doc.contains("variant")) {
    std::string name;
    read(doc, "", "variant", name);
    cfg.variant = parse_variant(name);
  }
  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    only_keys(m, "model", {"alpha", "p_bar", "p_high", "p_low", "c", "mu0"});
    read(m, "model", "alpha", cfg.model.alpha);
    read(m, "model", "p_bar", cfg.model.p_bar);
    read(m, "model", "p_high", cfg.model.p_high);
    read(m, "model", "p_low", cfg.model.p_low);
    read(m, "model", "c", cfg.model.c);
    read(m, "model", "mu0", cfg.model.mu0);
  }
  if (doc.contains("phi")) {
    cfg.phi = parse_phi(doc.at("phi"));
  } else if (cfg.variant == Variant::PhysicalCost) {
    cfg.phi = AnticipationCurve::linear();
  }
  cfg.test.phi = cfg.phi;
  if (doc.contains("physical_cost")) {
    const auto& p = doc.at("physical_cost");
    only_keys(p, "physical_cost", {"psi"});
    read(p, "physical_cost", "psi", cfg.psi);
  }
  if (doc.contains("test_design")) {
    const auto& t = doc.at("test_design");
    only_keys(t, "test_design", {"alpha0", "p_bar", "p_under", "c"});
    read(t, "test_design", "alpha0", cfg.test.alpha0);
    read(t, "test_design", "p_bar", cfg.test.p_bar);
    read(t, "test_design", "p_under", cfg.test.p_under);
    read(t, "test_design", "c", cfg.test.c);
  }
  if (doc.contains("cost_example")) {
    const auto& c = doc.at("cost_example");
    only_keys(c, "cost_example", {"c_high", "c_low", "upsilon0", "psi", "P_bar", "P_under"});
    read(c, "cost_example", "c_high", cfg.cost.c_high);
    read(c, "cost_example", "c_low", cfg.cost.c_low);
    read(c, "cost_example", "upsilon0", cfg.cost.upsilon0);
    read(c, "cost_example", "psi", cfg.cost.psi);
    read(c, "cost_example", "P_bar", cfg.cost.P_bar);
    read(c, "cost_example", "P_under", cfg.cost.P_under);
  }
  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    only_keys(s, "solver", {"grid_n", "root_tol", "oracle_grid", "mc_draws"});
    read(s, "solver", "grid_n", cfg.solver.grid_n);
    read(s, "solver", "root_tol", cfg.solver.root_tol);
    read(s, "solver", "oracle_grid", cfg.solver.oracle_grid);
    read(s, "solver", "mc_draws", cfg.solver.mc_draws);
  }
  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    only_keys(s, "sweep", {"variable", "from", "to", "steps"});
    read(s, "sweep", "variable", cfg.sweep.variable);
    read(s, "sweep", "from", cfg.sweep.from);
    read(s, "sweep", "to", cfg.sweep.to);
    read(s, "sweep", "steps", cfg.sweep.steps);
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    only_keys(o, "output", {"report", "table"});
    read(o, "output", "report", cfg.report_path);
    read(o, "output", "table", cfg.table_path);
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("test_hooks")) {
    const auto& h = doc.at("test_hooks");
    only_keys(h, "test_hooks", {"l_offset"});
    read(h, "test_hooks", "l_offset", cfg.l_offset);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

void validate(const RunConfig& cfg) {
  if (cfg.solver.grid_n < 3) fail("solver.grid_n", "must be at least 3");
  if (cfg.solver.oracle_grid < 3 || cfg.solver.oracle_grid > 4001) {
    fail("solver.oracle_grid", "must lie in [3, 4001]");
  }
  if (cfg.solver.mc_draws < 1) fail("solver.mc_draws", "must be positive");
  if (!(cfg.solver.root_tol > 0.0 && cfg.solver.root_tol < 1e-3)) {
    fail("solver.root_tol", "must lie in (0, 1e-3)");
  }
  if (cfg.sweep.steps > 100000) fail("sweep.steps", "must not exceed 100000");
  switch (cfg.variant) {
    case Variant::Main:
    case Variant::MainWithPc:
    case Variant::Unconditional:
      cfg.model.validate();
      if (cfg.variant != Variant::Main && !cfg.phi.is_concave()) {
        fail("phi", "this variant needs a concave distortion");
      }
      break;
    case Variant::PhysicalCost:
      PhysicalCostParams{cfg.model, cfg.psi}.validate();
      if (!cfg.phi.is_linear()) fail("phi", "the physical-cost variant uses a linear distortion");
      break;
    case Variant::TestDesign:
      cfg.test.validate();
      break;
    case Variant::CostExample:
      cfg.cost.validate();
      break;
  }
}

}  // namespace persuade::cli
