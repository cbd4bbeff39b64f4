#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "persuade/cli.hpp"
#include "persuade/envelope.hpp"
#include "persuade/errors.hpp"
#include "persuade/exante.hpp"
#include "persuade/interim.hpp"
#include "persuade/numeric.hpp"
#include "persuade/oracle.hpp"

namespace persuade::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double prob(double x) { return std::clamp(x, 0.0, 1.0); }

double finite(double x) {
  if (!std::isfinite(x)) throw InconsistencyError("non-finite value in output");
  return x;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", finite(x) == 0.0 ? 0.0 : x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

ordered_json opt(const std::optional<double>& x) {
  return x ? ordered_json(prob(finite(*x))) : ordered_json(nullptr);
}

ordered_json lottery_json(const PosteriorLottery& l) {
  ordered_json arr = ordered_json::array();
  for (const auto& a : l.atoms()) {
    arr.push_back({{"posterior", prob(a.posterior)}, {"weight", prob(a.weight)}});
  }
  return arr;
}

std::string atoms_str(const PosteriorLottery& l) {
  std::string s;
  for (const auto& a : l.atoms()) {
    if (!s.empty()) s += '|';
    s += num(prob(a.posterior)) + ":" + num(prob(a.weight));
  }
  return s;
}

bool is_main_family(Variant v) {
  return v == Variant::Main || v == Variant::MainWithPc || v == Variant::Unconditional;
}

InterimVariant interim_variant(const RunConfig& cfg) {
  if (cfg.variant == Variant::Unconditional) return InterimVariant::Unconditional;
  return cfg.phi.is_concave() ? InterimVariant::Conditional : InterimVariant::General;
}

InterimSolver make_solver(const RunConfig& cfg, const Model& m) {
  return InterimSolver(m, interim_variant(cfg), {cfg.solver.grid_n, cfg.l_offset});
}

Thresholds all_thresholds(const Model& m, const InterimSolver& solver) {
  Thresholds th = solver.thresholds();
  if (m.phi.is_concave() && m.reacts_to_fear()) {
    auto pc = thresholds_pc(m);
    th.mu_N = pc.mu_N;
    th.mu_T = pc.mu_T;
    th.mu_V = pc.mu_V;
  }
  return th;
}

ordered_json thresholds_json(const Thresholds& t) {
  return {{"mu_e", prob(t.mu_e)},         {"mu_v", opt(t.mu_v)},
          {"mu_F", opt(t.mu_F)},          {"mu_D", opt(t.mu_D)},
          {"mu_M_low", opt(t.mu_M_low)},  {"mu_M_high", opt(t.mu_M_high)},
          {"mu_N", opt(t.mu_N)},          {"mu_T", opt(t.mu_T)},
          {"mu_V", opt(t.mu_V)},          {"reacts_to_fear", t.reacts_to_fear},
          {"mu_v_degenerate", t.mu_v_degenerate}};
}

std::string phi_name(const AnticipationCurve& phi) { return phi.family_name(); }

// Ex ante solution at prior mu for the main-model variants.
ExAnteSolution main_solution(const RunConfig& cfg, const Model& m, const InterimSolver& solver,
                             Belief mu) {
  switch (cfg.variant) {
    case Variant::MainWithPc:
      return optimal_policy_with_pc(m, mu);
    case Variant::Unconditional: {
      ExAnteSolution out;
      out.lottery = PosteriorLottery::point(mu);
      out.interim.push_back(solver.solve(mu));
      const auto& s = out.interim.front();
      out.doctor_value = s.doctor_value;
      out.patient_value = s.patient_value;
      RegimeLabel label = RegimeLabel::UnableToPersuade;
      if (s.tests) {
        label = s.region == InterimRegion::InF ? RegimeLabel::NoDisclosureNeeded
                                               : RegimeLabel::CommittedComfort;
      }
      out.regime = {label, s.region};
      return out;
    }
    default:
      return optimal_exante(m, mu, cfg.solver.grid_n);
  }
}

ordered_json solution_json(const ExAnteSolution& sol, Belief prior) {
  ordered_json interim = ordered_json::array();
  ordered_json residuals = ordered_json::array();
  auto atoms = sol.lottery.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& s = sol.interim[i];
    interim.push_back({{"belief", prob(atoms[i].posterior)},
                       {"accept_signal", lottery_json(s.accept_signal)},
                       {"reject_signal", lottery_json(s.reject_signal)},
                       {"region", to_string(s.region)},
                       {"tests", s.tests},
                       {"doctor_value", prob(s.doctor_value)},
                       {"patient_value", finite(s.patient_value)},
                       {"pc_slack", finite(s.pc_slack)}});
    if (s.tests) {
      residuals.push_back({{"id", "interim_pc[" + std::to_string(i) + "]"},
                           {"slack", finite(s.pc_slack)}});
    }
  }
  if (sol.ex_ante_pc_slack) {
    residuals.push_back({{"id", "ex_ante_pc"}, {"slack", finite(*sol.ex_ante_pc_slack)}});
  }
  return {{"prior", prob(prior)},
          {"ex_ante", lottery_json(sol.lottery)},
          {"interim", interim},
          {"regime", {{"label", to_string(sol.regime.label)},
                      {"region", to_string(sol.regime.region)}}},
          {"doctor_value", prob(sol.doctor_value)},
          {"patient_value", finite(sol.patient_value)},
          {"constraint_residuals", residuals}};
}

std::string to_string(TestRegion r) {
  switch (r) {
    case TestRegion::Pessimistic:
      return "Pessimistic";
    case TestRegion::GoodNewsSuffices:
      return "GoodNewsSuffices";
    case TestRegion::Rotated:
      return "Rotated";
    case TestRegion::NoBenefit:
      return "NoBenefit";
  }
  return "Pessimistic";
}

ordered_json test_thresholds_json(const TestThresholds& t) {
  return {{"alpha_e", prob(t.alpha_e)},
          {"alpha_g", prob(t.alpha_g)},
          {"alpha_v", prob(t.alpha_v)},
          {"degenerate", t.degenerate}};
}

ordered_json physical_thresholds_json(const PhysicalCostParams& p) {
  auto t = physical_cost_thresholds(p);
  return {{"mu_e", prob(mu_e(p.base))}, {"mu_F", prob(t.mu_F)}, {"mu_M", prob(t.mu_M)}};
}

ordered_json header(const RunConfig& cfg) {
  return {{"variant", to_string(cfg.variant)}, {"seed", cfg.seed}, {"phi", phi_name(cfg.phi)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<double> sweep_points(const SweepSpec& s) {
  if (s.steps == 0 || s.from > s.to) return {};
  if (s.steps == 1) return {s.from};
  return numeric::linspace(s.from, s.to, s.steps);
}

void require_range(const std::vector<double>& pts, double lo, double hi, bool open) {
  for (double x : pts) {
    const bool ok = open ? (x > lo && x < hi) : (x >= lo && x <= hi);
    if (!ok) {
      std::ostringstream os;
      os << "sweep: value " << x << " outside " << (open ? "(" : "[") << lo << ", " << hi
         << (open ? ")" : "]");
      throw ConfigError(os.str());
    }
  }
}

std::string default_variable(Variant v) {
  switch (v) {
    case Variant::TestDesign:
      return "alpha0";
    case Variant::CostExample:
      return "upsilon0";
    default:
      return "mu0";
  }
}

// Verification bookkeeping.
struct Checks {
  std::ostringstream out;
  bool ok = true;

  void add(const std::string& name, double residual, double tol, bool pass,
           const std::string& note = "") {
    ok = ok && pass;
    out << "check " << name << " residual=" << num(residual) << " tol=" << num(tol) << ' '
        << (pass ? "PASS" : "FAIL");
    if (!note.empty()) out << ' ' << note;
    out << '\n';
  }
  // residual <= tol passes.
  void bound(const std::string& name, double residual, double tol, const std::string& note = "") {
    add(name, residual, tol, residual <= tol, note);
  }
};

double brute_minorant(const std::function<double(double)>& f, double mu, std::size_t n) {
  const auto grid = numeric::linspace(0.0, 1.0, n);
  double best = f(mu);
  for (double y : grid) {
    if (y >= mu) break;
    for (double x : grid) {
      if (x <= mu) continue;
      const double w = (mu - y) / (x - y);
      best = std::min(best, (1.0 - w) * f(y) + w * f(x));
    }
  }
  return best;
}

void verify_main(const RunConfig& cfg, Checks& ck) {
  const Model m(cfg.model, cfg.phi);
  const auto solver = make_solver(cfg, m);
  const bool general = interim_variant(cfg) == InterimVariant::General;
  const bool unconditional = cfg.variant == Variant::Unconditional;

  // Oracle comparison at 20 interim beliefs.
  {
    double worst = 0.0;
    const std::size_t n = general ? std::min<std::size_t>(cfg.solver.oracle_grid, 201)
                                  : cfg.solver.oracle_grid;
    const double tol = general ? 1e-3 : 1e-4 + oracle::lipschitz_bound(m.params) / n;
    for (int k = 0; k < 20; ++k) {
      const double mu = (k + 0.5) / 20.0;
      oracle::SignalPayoffs pay = oracle::interim_payoffs(m, mu);
      if (unconditional) {
        pay.receiver = [&m](double x) { return m.V(x) - m.V0(x); };
        pay.rhs = 0.0;
      } else if (general) {
        pay.rhs = brute_minorant([&m](double x) { return m.V0(x); }, mu, 401);
      }
      auto res = oracle::grid_signal_oracle(mu, pay, n, general ? 3 : 2);
      double best = m.health_if_skipped(mu);
      if (res.best_value) best = std::max(best, *res.best_value);
      worst = std::max(worst, std::abs(solver.solve(mu).doctor_value - best));
    }
    ck.bound("oracle_sandwich", worst, tol, "beliefs=20 grid=" + std::to_string(n));
  }

  // Binding constraint wherever a perfect-news signal is used.
  {
    double worst = 0.0;
    int count = 0;
    for (int k = 1; k < 100; ++k) {
      const auto s = solver.solve(k / 100.0);
      if (s.region == InterimRegion::InDNotF || s.region == InterimRegion::InMNotD) {
        worst = std::max(worst, std::abs(s.pc_slack));
        ++count;
      }
    }
    ck.bound("pc_binding", worst, 1e-8, "beliefs=" + std::to_string(count));
  }

  if (!general && !unconditional && m.reacts_to_fear()) {
    auto rep = interim_monotonicity_check(solver, numeric::linspace(0.005, 0.995, 100));
    ck.add("monotonicity", static_cast<double>(rep.violations.size()), 0.0, rep.ok,
           "checked=" + std::to_string(rep.checked));
  }

  {
    envelope::EnvelopeOptions eo;
    eo.grid_n = cfg.solver.grid_n;
    eo.knots = {m.mu_e()};
    auto env = envelope::concave_envelope([&](double x) { return solver.P_star(x); }, 0.0, 1.0, eo);
    auto again = envelope::concave_envelope([&](double x) { return env(x); }, 0.0, 1.0, eo);
    double worst = 0.0;
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
      worst = std::max(worst, std::abs(env.values[i] - again.values[i]));
    }
    ck.bound("envelope_idempotence", worst, 1e-9);
  }

  if (cfg.variant == Variant::MainWithPc) {
    const auto sol = optimal_policy_with_pc(m);
    ck.bound("ex_ante_pc_feasible", std::max(0.0, -*sol.ex_ante_pc_slack), 1e-8);
  }

  if (!unconditional) {
    const auto sol = main_solution(cfg, m, solver, m.params.mu0);
    auto mc = oracle::monte_carlo_health(to_policy(sol), m, cfg.solver.mc_draws, cfg.seed);
    const double z = std::abs(mc.estimate - sol.doctor_value);
    ck.bound("monte_carlo", z, 4.0 * mc.std_error + 1e-12,
             "draws=" + std::to_string(mc.draws) + " estimate=" + num(mc.estimate));
  }
}

void verify_physical(const RunConfig& cfg, Checks& ck) {
  const PhysicalCostParams p{cfg.model, cfg.psi};
  const auto t = physical_cost_thresholds(p);
  const auto& b = p.base;
  const double sick_fee = b.p_bar - b.c - p.psi;
  // No disclosure at mu_F, and {0, 1} at mu_M, leave the patient indifferent.
  const double rF = std::abs(sick_fee - p_lower(t.mu_F, b));
  const double rM = std::abs((1.0 - t.mu_M) * (b.p_bar - b.c) + t.mu_M * b.p_high - p.psi -
                             p_lower(t.mu_M, b));
  ck.bound("indifference_F", rF, 1e-12);
  ck.bound("indifference_M", rM, 1e-12);
  double worst = 0.0;
  for (int k = 1; k < 20; ++k) {
    const double mu = t.mu_F + (t.mu_M - t.mu_F) * k / 20.0;
    worst = std::max(worst, std::abs(physical_cost_interim(mu, p).pc_slack));
  }
  ck.bound("pc_binding", worst, 1e-10);
  const Model m(b, AnticipationCurve::linear());
  const auto sol = physical_cost_policy(p);
  auto mc = oracle::monte_carlo_health(to_policy(sol), m, cfg.solver.mc_draws, cfg.seed);
  ck.bound("monte_carlo", std::abs(mc.estimate - sol.doctor_value), 4.0 * mc.std_error + 1e-12,
           "draws=" + std::to_string(mc.draws));
}

void verify_test(const RunConfig& cfg, Checks& ck) {
  const TestDesign td(cfg.test);
  const auto& th = td.thresholds();
  const auto s = td.solve(cfg.test.alpha0);
  ck.bound("pc_feasible", std::max(0.0, -s.pc_slack), 1e-8);
  if (s.region == TestRegion::Rotated) ck.bound("pc_binding", std::abs(s.pc_slack), 1e-8);
  oracle::SignalPayoffs pay{[&](double a) { return td.health(a); },
                            [&](double a) { return td.V(a); }, td.outside(cfg.test.alpha0)};
  auto res = oracle::grid_signal_oracle(cfg.test.alpha0, pay, cfg.solver.oracle_grid, 2);
  const double gap = res.best_value ? *res.best_value - s.doctor_value : 0.0;
  ck.bound("oracle_dominance", std::max(0.0, gap), 1e-3, "grid=" + std::to_string(res.grid_n));
  // Monotonicity on the rotated stretch.
  int bad = 0;
  if (th.alpha_g < th.alpha_v) {
    TestSolution prev;
    bool first = true;
    for (int k = 1; k < 100; ++k) {
      const double a = th.alpha_g + (th.alpha_v - th.alpha_g) * k / 100.0;
      auto cur = td.solve(a);
      if (!first && (cur.alpha_star > prev.alpha_star + 1e-10 || cur.lower > prev.lower + 1e-10 ||
                     cur.bad_news_prob > prev.bad_news_prob + 1e-10)) {
        ++bad;
      }
      prev = cur;
      first = false;
    }
  }
  ck.add("monotonicity", bad, 0.0, bad == 0);
}

void verify_cost(const RunConfig& cfg, Checks& ck) {
  const auto& p = cfg.cost;
  const auto sig = cost_disclosure_signal(p);
  if (sig.persuasion_possible) ck.bound("pc_binding", std::abs(sig.pc_slack), 1e-12);
  oracle::SignalPayoffs pay{[&](double u) { return cost_sender_payoff(u, p); },
                            [&](double u) { return cost_receiver_value(u, p); }, p.psi};
  auto res = oracle::grid_signal_oracle(p.upsilon0, pay, cfg.solver.oracle_grid, 2);
  const double gap = res.best_value ? *res.best_value - sig.sender_value : 0.0;
  ck.bound("oracle_dominance", std::max(0.0, gap), 1e-4 + 1.0 / cfg.solver.oracle_grid);
}

}  // namespace

CommandResult cmd_thresholds(const RunConfig& cfg) {
  ordered_json j = header(cfg);
  if (is_main_family(cfg.variant)) {
    const Model m(cfg.model, cfg.phi);
    const auto solver = make_solver(cfg, m);
    j["thresholds"] = thresholds_json(all_thresholds(m, solver));
  } else if (cfg.variant == Variant::PhysicalCost) {
    j["thresholds"] = physical_thresholds_json({cfg.model, cfg.psi});
  } else if (cfg.variant == Variant::TestDesign) {
    j["thresholds"] = test_thresholds_json(test_thresholds(cfg.test));
  } else {
    j["thresholds"] = {{"upsilon_e", prob(cfg.cost.upsilon_e())}};
  }
  return {0, dump(j)};
}

CommandResult cmd_solve(const RunConfig& cfg) {
  ordered_json j = header(cfg);
  if (is_main_family(cfg.variant)) {
    const Model m(cfg.model, cfg.phi);
    const auto solver = make_solver(cfg, m);
    j["thresholds"] = thresholds_json(all_thresholds(m, solver));
    j["policy"] = solution_json(main_solution(cfg, m, solver, cfg.model.mu0), cfg.model.mu0);
  } else if (cfg.variant == Variant::PhysicalCost) {
    const PhysicalCostParams p{cfg.model, cfg.psi};
    j["thresholds"] = physical_thresholds_json(p);
    j["policy"] = solution_json(physical_cost_policy(p), cfg.model.mu0);
  } else if (cfg.variant == Variant::TestDesign) {
    const TestDesign td(cfg.test);
    const auto s = td.solve(cfg.test.alpha0);
    j["thresholds"] = test_thresholds_json(td.thresholds());
    j["policy"] = {{"prior", prob(cfg.test.alpha0)},
                   {"signal", lottery_json(s.signal)},
                   {"region", to_string(s.region)},
                   {"alpha_star", prob(s.alpha_star)},
                   {"lower", prob(s.lower)},
                   {"bad_news_prob", prob(s.bad_news_prob)},
                   {"doctor_value", prob(s.doctor_value)},
                   {"patient_value", finite(s.patient_value)},
                   {"pc_slack", finite(s.pc_slack)},
                   {"at_alpha_v", s.at_alpha_v}};
  } else {
    const auto s = cost_disclosure_signal(cfg.cost);
    j["thresholds"] = {{"upsilon_e", prob(cfg.cost.upsilon_e())}};
    j["policy"] = {{"prior", prob(cfg.cost.upsilon0)},
                   {"persuasion_possible", s.persuasion_possible},
                   {"signal", s.signal ? lottery_json(*s.signal)
                                       : lottery_json(PosteriorLottery::point(cfg.cost.upsilon0))},
                   {"lower", prob(s.lower)},
                   {"sender_value", finite(s.sender_value)},
                   {"pc_slack", finite(s.pc_slack)}};
  }
  return {0, dump(j)};
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const std::string var = cfg.sweep.variable.empty() ? default_variable(cfg.variant)
                                                     : cfg.sweep.variable;
  const auto pts = sweep_points(cfg.sweep);
  std::ostringstream os;

  if (is_main_family(cfg.variant)) {
    if (var != "mu0") throw ConfigError("sweep.variable: this variant sweeps 'mu0'");
    require_range(pts, 0.0, 1.0, false);
    os << "mu,mu_e,mu_v,mu_F,mu_D,mu_M_low,mu_M_high,mu_N,mu_T,mu_V,P_star,doctor_value,"
          "patient_value,regime,region,atoms\n";
    if (pts.empty()) return {0, os.str()};
    const Model m(cfg.model, cfg.phi);
    const auto solver = make_solver(cfg, m);
    const auto t = all_thresholds(m, solver);
    const std::string fixed = num(t.mu_e) + "," + num(t.mu_v) + "," + num(t.mu_F) + "," +
                              num(t.mu_D) + "," + num(t.mu_M_low) + "," + num(t.mu_M_high) +
                              "," + num(t.mu_N) + "," + num(t.mu_T) + "," + num(t.mu_V);
    for (double mu : pts) {
      const auto sol = main_solution(cfg, m, solver, mu);
      os << num(mu) << ',' << fixed << ',' << num(prob(solver.P_star(mu))) << ','
         << num(prob(sol.doctor_value)) << ',' << num(sol.patient_value) << ','
         << to_string(sol.regime.label) << ',' << to_string(sol.regime.region) << ','
         << atoms_str(sol.lottery) << '\n';
    }
    return {0, os.str()};
  }

  if (cfg.variant == Variant::PhysicalCost) {
    if (var != "mu0" && var != "psi") {
      throw ConfigError("sweep.variable: this variant sweeps 'mu0' or 'psi'");
    }
    require_range(pts, 0.0, var == "mu0" ? 1.0 : INFINITY, false);
    os << "mu0,psi,mu_F,mu_M,region,interim_doctor_value,doctor_value,patient_value,regime,"
          "atoms\n";
    for (double x : pts) {
      PhysicalCostParams p{cfg.model, cfg.psi};
      double mu = cfg.model.mu0;
      if (var == "mu0") {
        mu = x;
      } else {
        p.psi = x;
      }
      const auto t = physical_cost_thresholds(p);
      const auto sol = physical_cost_policy(p, mu);
      const auto s = physical_cost_interim(mu, p);
      os << num(mu) << ',' << num(p.psi) << ',' << num(t.mu_F) << ',' << num(t.mu_M) << ','
         << to_string(s.region) << ',' << num(prob(s.doctor_value)) << ','
         << num(prob(sol.doctor_value)) << ',' << num(sol.patient_value) << ','
         << to_string(sol.regime.label) << ',' << atoms_str(sol.lottery) << '\n';
    }
    return {0, os.str()};
  }

  if (cfg.variant == Variant::TestDesign) {
    if (var != "alpha0") throw ConfigError("sweep.variable: this variant sweeps 'alpha0'");
    require_range(pts, 0.0, 1.0, true);
    os << "alpha0,alpha_e,alpha_g,alpha_v,region,alpha_star,lower,bad_news_prob,doctor_value,"
          "patient_value,pc_slack,atoms\n";
    if (pts.empty()) return {0, os.str()};
    const TestDesign td(cfg.test);
    const auto& t = td.thresholds();
    for (double a : pts) {
      const auto s = td.solve(a);
      os << num(a) << ',' << num(t.alpha_e) << ',' << num(t.alpha_g) << ',' << num(t.alpha_v)
         << ',' << to_string(s.region) << ',' << num(prob(s.alpha_star)) << ','
         << num(prob(s.lower)) << ',' << num(prob(s.bad_news_prob)) << ','
         << num(prob(s.doctor_value)) << ',' << num(s.patient_value) << ',' << num(s.pc_slack)
         << ',' << atoms_str(s.signal) << '\n';
    }
    return {0, os.str()};
  }

  if (var != "upsilon0" && var != "psi") {
    throw ConfigError("sweep.variable: this variant sweeps 'upsilon0' or 'psi'");
  }
  os << "upsilon0,psi,upsilon_e,persuasion_possible,lower,sender_value,pc_slack,atoms\n";
  for (double x : pts) {
    CostExampleParams p = cfg.cost;
    (var == "psi" ? p.psi : p.upsilon0) = x;
    const auto s = cost_disclosure_signal(p);
    os << num(p.upsilon0) << ',' << num(p.psi) << ',' << num(p.upsilon_e()) << ','
       << (s.persuasion_possible ? 1 : 0) << ',' << num(prob(s.lower)) << ','
       << num(s.sender_value) << ',' << num(s.pc_slack) << ','
       << atoms_str(s.signal ? *s.signal : PosteriorLottery::point(p.upsilon0)) << '\n';
  }
  return {0, os.str()};
}

CommandResult cmd_verify(const RunConfig& cfg) {
  Checks ck;
  ck.out << "variant=" << to_string(cfg.variant) << " seed=" << cfg.seed << '\n';
  switch (cfg.variant) {
    case Variant::Main:
    case Variant::MainWithPc:
    case Variant::Unconditional:
      verify_main(cfg, ck);
      break;
    case Variant::PhysicalCost:
      verify_physical(cfg, ck);
      break;
    case Variant::TestDesign:
      verify_test(cfg, ck);
      break;
    case Variant::CostExample:
      verify_cost(cfg, ck);
      break;
  }
  ck.out << (ck.ok ? "all checks passed" : "some checks failed") << '\n';
  return {ck.ok ? 0 : 1, ck.out.str()};
}

}  // namespace persuade::cli
