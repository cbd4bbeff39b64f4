// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "persuade/envelope.hpp"
#include "persuade/exante.hpp"
#include "persuade/extensions.hpp"
#include "persuade/interim.hpp"
#include "persuade/numeric.hpp"
#include "persuade/oracle.hpp"

using namespace persuade;
using oracle::Rng;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d %-28s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Largest chord-below value of f at mu over grid pairs: the punishment
// value the doctor can impose after a refusal, found by enumeration.
double brute_minorant(const std::function<double(double)>& f, double mu, std::size_t n) {
  const auto grid = numeric::linspace(0.0, 1.0, n);
  std::vector<double> fv(n);
  for (std::size_t i = 0; i < n; ++i) fv[i] = f(grid[i]);
  double best = f(mu);
  for (std::size_t i = 0; i < n && grid[i] < mu; ++i) {
    for (std::size_t j = n; j-- > 0 && grid[j] > mu;) {
      const double w = (mu - grid[i]) / (grid[j] - grid[i]);
      best = std::min(best, (1.0 - w) * fv[i] + w * fv[j]);
    }
  }
  return best;
}

oracle::Instance fear_instance(Rng& rng) {
  for (;;) {
    auto inst = oracle::random_instance(rng, oracle::PhiKind::Concave);
    if (Model(inst.params, inst.phi).reacts_to_fear()) return inst;
  }
}

void criterion_1_and_2() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst_excess = -INFINITY, worst_gap = 0.0;
  double worst_binding = 0.0;
  int bound_failures = 0, binding_checked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_instance(rng, oracle::PhiKind::Concave);
    const Model m(inst.params, inst.phi);
    const InterimSolver solver(m);
    const double tol = 1e-4 + oracle::lipschitz_bound(m.params) / 801.0;
    for (int k = 0; k < 20; ++k) {
      const double mu = (k + 0.5) / 20.0;
      const auto sol = solver.solve(mu);
      auto res = oracle::grid_signal_oracle(mu, oracle::interim_payoffs(m, mu), 801, 2);
      double best = m.health_if_skipped(mu);
      if (res.best_value) best = std::max(best, *res.best_value);
      const double gap = std::abs(sol.doctor_value - best);
      worst_gap = std::max(worst_gap, gap);
      worst_excess = std::max(worst_excess, gap - tol);
      if (gap > tol) ++bound_failures;
      if (sol.region == InterimRegion::InDNotF || sol.region == InterimRegion::InMNotD) {
        const double ev = sol.accept_signal.expect([&](double x) { return m.V(x); });
        worst_binding = std::max(worst_binding, std::abs(ev - m.Vbar(mu)));
        ++binding_checked;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, "oracle_sandwich", bound_failures == 0 && secs <= 60.0,
         fmt("seed=1001 instances=200 beliefs=20 max|gap|=%.3g max(gap-tol)=%.3g failures=%d "
             "time=%.1fs",
             worst_gap, worst_excess, bound_failures, secs));
  report(2, "pc_binding", worst_binding <= 1e-8 && binding_checked > 0,
         fmt("seed=1001 beliefs_checked=%d max|EV-Vbar|=%.3g", binding_checked, worst_binding));
}

void criterion_3() {
  Rng rng(1003);
  double worst = 0.0;
  bool mu_v_one = true;
  for (int i = 0; i < 50; ++i) {
    const auto inst = oracle::random_instance(rng, oracle::PhiKind::Linear);
    const Model m(inst.params, inst.phi);
    const InterimSolver solver(m);
    mu_v_one = mu_v_one && solver.thresholds().mu_v.value() == 1.0;
    for (int k = 1; k <= 50; ++k) {
      const double mu = m.mu_e() + (1.0 - m.mu_e()) * k / 51.0;
      worst = std::max(worst, std::abs(solver.kernel().lower_belief(mu) - m.mu_e()));
    }
  }
  report(3, "linear_phi_identity", worst <= 1e-10 && mu_v_one,
         fmt("seed=1003 instances=50 max|l-mu_e|=%.3g mu_v==1:%s", worst,
             mu_v_one ? "yes" : "no"));
}

void criterion_4() {
  Rng rng(1004);
  std::size_t interim_violations = 0, interim_checked = 0;
  for (int i = 0; i < 50; ++i) {
    const auto inst = fear_instance(rng);
    const InterimSolver solver(Model(inst.params, inst.phi));
    auto rep = interim_monotonicity_check(solver, numeric::linspace(0.005, 0.995, 100));
    interim_violations += rep.violations.size();
    interim_checked += rep.checked;
  }
  std::size_t test_violations = 0, test_points = 0;
  int rotated_instances = 0;
  for (int i = 0; i < 50;) {
    TestModelParams p;
    p.p_under = rng.uniform(0.0, 0.6);
    p.p_bar = rng.uniform(p.p_under + 0.15, 1.0);
    p.c = rng.uniform(0.05, 0.95) * (p.p_bar - p.p_under);
    p.alpha0 = 0.5;
    p.phi = oracle::random_phi(rng, oracle::PhiKind::Concave);
    if (p.phi.is_linear()) continue;
    ++i;
    const TestDesign td(p);
    const auto& th = td.thresholds();
    if (!(th.alpha_g < th.alpha_v)) continue;
    ++rotated_instances;
    TestSolution prev;
    for (int k = 0; k < 100; ++k) {
      const double a = th.alpha_g + (th.alpha_v - th.alpha_g) * (k + 0.5) / 100.0;
      const auto cur = td.solve(a);
      ++test_points;
      if (k > 0 && (cur.alpha_star > prev.alpha_star + 1e-10 || cur.lower > prev.lower + 1e-10 ||
                    cur.bad_news_prob > prev.bad_news_prob + 1e-10)) {
        ++test_violations;
      }
      prev = cur;
    }
  }
  report(4, "monotonicity", interim_violations == 0 && test_violations == 0,
         fmt("seed=1004 interim_checked=%zu interim_violations=%zu test_instances_with_range=%d "
             "test_points=%zu test_violations=%zu",
             interim_checked, interim_violations, rotated_instances, test_points,
             test_violations));
}

// Inverse-S instances where the constraint binds on a lifted stretch of V:
// patients who do not react to fear, a small mu_e and the inflection of phi
// inside the untreated range.
oracle::Instance lifted_instance(Rng& rng) {
  for (;;) {
    ModelParams p;
    p.alpha = rng.uniform(0.05, 0.35);
    p.p_low = rng.uniform(0.0, 0.2);
    p.p_high = rng.uniform(0.8, 0.97);
    p.p_bar = rng.uniform(p.p_high + 0.01, 1.0);
    p.c = p.p_bar - (p.p_low + rng.uniform(0.02, 0.15) * (p.p_high - p.p_low));
    p.mu0 = 0.5;
    const double v_lo = p.p_bar - p.c, v_hi = p.p_high;
    auto phi = AnticipationCurve::inverse_s(rng.uniform(v_lo + 0.3 * (v_hi - v_lo),
                                                        v_lo + 0.85 * (v_hi - v_lo)),
                                            rng.uniform(0.7, 0.99), rng.uniform(2.0, 5.0));
    if (!Model(p, phi).reacts_to_fear()) return {p, phi};
  }
}

void criterion_5() {
  const auto t0 = Clock::now();
  Rng rng(1005);
  double worst_equiv = 0.0, worst_oracle = 0.0;
  int three_atom = 0, checked = 0;
  for (int i = 0; i < 50; ++i) {
    const auto inst = lifted_instance(rng);
    const Model m(inst.params, inst.phi);
    const InterimSolver solver(m, InterimVariant::General);
    std::vector<double> knots{m.mu_e()};
    const envelope::LocalConcavification vhat([&](double x) { return m.V(x); }, m.mu_e());
    for (const auto& seg : vhat.right().segments) {
      knots.push_back(seg.left);
      knots.push_back(seg.right);
    }
    for (int k = 0; k < 12; ++k) {
      const double mu = (k + 0.5) / 12.0;
      const auto sol = solver.solve(mu);
      if (!sol.tests) continue;
      ++checked;
      if (sol.accept_signal.size() == 3) ++three_atom;
      const auto ks = solver.kernel().solve(mu);
      const double two_atom = ks.signal.expect([&](double x) { return m.health_if_tested(x); });
      worst_equiv = std::max(worst_equiv, std::abs(sol.doctor_value - two_atom));
      oracle::SignalPayoffs pay = oracle::interim_payoffs(m, mu);
      pay.rhs = brute_minorant([&](double x) { return m.V0(x); }, mu, 801);
      auto res = oracle::grid_signal_oracle(mu, pay, 201, 3, knots);
      double best = m.health_if_skipped(mu);
      if (res.best_value) best = std::max(best, *res.best_value);
      worst_oracle = std::max(worst_oracle, std::abs(sol.doctor_value - best));
    }
  }
  report(5, "general_phi_equivalence",
         worst_equiv <= 1e-10 && worst_oracle <= 1e-3 && three_atom > 0,
         fmt("seed=1005 instances=50 beliefs_tested=%d max|3atom-2atom|=%.3g "
             "max|value-oracle201|=%.3g three_atom_optima=%d time=%.1fs",
             checked, worst_equiv, worst_oracle, three_atom, seconds_since(t0)));
}

// Random two-stage policy: up to three ex ante atoms, each followed by either
// the optimal interim signals or a random binary signal with full
// disclosure after a refusal.
TwoStagePolicy random_policy(Rng& rng, const InterimSolver& solver, double mu0) {
  std::vector<Atom> atoms{{mu0, 1.0}};
  const auto kind = rng.index(3);
  const double y = rng.uniform(0.0, mu0), x = rng.uniform(mu0, 1.0);
  if (kind == 1 && x - y > 1e-9) {
    auto l = PosteriorLottery::split(mu0, y, x);
    atoms.assign(l.atoms().begin(), l.atoms().end());
  } else if (kind == 2 && x - y > 1e-9) {
    // Weight s on a middle point z, the rest split over {y, x}.
    const double z = rng.uniform(y, x), s = rng.uniform(0.05, 0.95);
    const double rest_mean = (mu0 - s * z) / (1.0 - s);
    if (rest_mean > y && rest_mean < x) {
      std::vector<Atom> mixed{{z, s}};
      const auto rest = PosteriorLottery::split(rest_mean, y, x);
      for (const auto& a : rest.atoms()) {
        mixed.push_back({a.posterior, (1.0 - s) * a.weight});
      }
      auto l = PosteriorLottery::from_atoms(mixed, mu0);
      atoms.assign(l.atoms().begin(), l.atoms().end());
    }
  }
  TwoStagePolicy pol{mu0, {}};
  for (const auto& a : atoms) {
    if (rng.bernoulli(0.5) || a.posterior <= 1e-9 || a.posterior >= 1.0 - 1e-9) {
      const auto s = solver.solve(a.posterior);
      pol.branches.push_back({a.posterior, a.weight, s.accept_signal, s.reject_signal});
    } else {
      const double b = a.posterior;
      const double y = rng.uniform(0.0, b), x = rng.uniform(b, 1.0);
      pol.branches.push_back({b, a.weight, PosteriorLottery::split(b, y, x),
                              PosteriorLottery::split(b, 0.0, 1.0)});
    }
  }
  return pol;
}

void criterion_6() {
  Rng rng(1006);
  double worst_chord = 0.0, worst_random = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = fear_instance(rng);
    const Model m(inst.params, inst.phi);
    const InterimSolver solver(m);
    for (int k = 0; k <= 100; ++k) {
      const double mu = k / 100.0;
      const double v = optimal_exante(m, mu, 2001).doctor_value;
      worst_chord = std::max(worst_chord, solver.P_star(mu) - v);
    }
    const double mu0 = m.params.mu0;
    const double best = optimal_exante(m, mu0, 2001).doctor_value;
    for (int r = 0; r < 500; ++r) {
      const double v = evaluate_policy(random_policy(rng, solver, mu0), m).doctor_value;
      worst_random = std::max(worst_random, v - best);
    }
  }
  report(6, "ex_ante_dominance", worst_chord <= 1e-8 && worst_random <= 1e-8,
         fmt("seed=1006 instances=100 max(P_star-value)=%.3g max(random-optimal)=%.3g",
             worst_chord, worst_random));
}

void criterion_7() {
  Rng rng(1007);
  double worst_pc = 0.0, worst_bind = 0.0, worst_struct = 0.0, worst_dom = 0.0;
  int binding_points = 0, accepted_random = 0;
  for (int i = 0; i < 50; ++i) {
    const auto inst = fear_instance(rng);
    const Model m(inst.params, inst.phi);
    const auto t = thresholds_pc(m);
    const PersuasionKernel kernel(pc_problem(m));
    for (int k = 0; k <= 100; ++k) {
      const double mu = k / 100.0;
      const auto sol = optimal_policy_with_pc(m, mu);
      worst_pc = std::max(worst_pc, m.V0(mu) - sol.patient_value);
      if (mu > *t.mu_N && mu < *t.mu_V) {
        worst_bind = std::max(worst_bind, std::abs(sol.patient_value - m.V0(mu)));
        ++binding_points;
      }
      // The same program through the shared kernel.
      const auto ks = kernel.solve(mu);
      if (ks.region != InterimRegion::OutsideM) {
        if (ks.signal.size() != sol.lottery.size()) {
          worst_struct = std::max(worst_struct, 1.0);
        } else {
          for (std::size_t j = 0; j < ks.signal.size(); ++j) {
            worst_struct = std::max(
                {worst_struct,
                 std::abs(ks.signal.atoms()[j].posterior - sol.lottery.atoms()[j].posterior),
                 std::abs(ks.signal.atoms()[j].weight - sol.lottery.atoms()[j].weight)});
          }
        }
      }
    }
    // Rejection-sampled policies that the patient is willing to enter.
    const double mu0 = m.params.mu0;
    const InterimSolver solver(m);
    const auto best = optimal_policy_with_pc(m, mu0);
    int accepted = 0;
    for (int tries = 0; accepted < 500 && tries < 200000; ++tries) {
      auto pol = random_policy(rng, solver, mu0);
      const auto ev = evaluate_policy(pol, m);
      if (ev.patient_value < m.V0(mu0)) continue;
      ++accepted;
      worst_dom = std::max(worst_dom, ev.doctor_value - best.doctor_value);
    }
    accepted_random += accepted;
  }
  report(7, "pc_variant",
         worst_pc <= 1e-8 && worst_bind <= 1e-8 && worst_struct <= 1e-10 && worst_dom <= 1e-6,
         fmt("seed=1007 instances=50 max(V0-value)=%.3g binding_points=%d max|bind|=%.3g "
             "kernel_vs_direct=%.3g random_accepted=%d max(random-optimal)=%.3g",
             worst_pc, binding_points, worst_bind, worst_struct, accepted_random, worst_dom));
}

void criterion_8() {
  Rng rng(1008);
  double worst_eq = 0.0, worst_limit = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto inst = oracle::random_instance(rng, oracle::PhiKind::Linear);
    const auto& b = inst.params;
    PhysicalCostParams p{b, rng.uniform(0.0, 0.9) * (b.p_bar - b.c - b.p_low)};
    const auto t = physical_cost_thresholds(p);
    const double eqF = (b.p_bar - b.c - p.psi) - p_lower(t.mu_F, b);
    const double eqM =
        (1.0 - t.mu_M) * (b.p_bar - b.c) + t.mu_M * b.p_high - p.psi - p_lower(t.mu_M, b);
    worst_eq = std::max({worst_eq, std::abs(eqF), std::abs(eqM)});

    PhysicalCostParams zero{b, 0.0};
    const auto t0 = physical_cost_thresholds(zero);
    const InterimSolver linear(Model(b, AnticipationCurve::linear()));
    const auto& main = linear.thresholds();
    // Without the fee no disclosure works exactly up to mu_e, and every
    // belief below the top can be moved to testing.
    worst_limit = std::max({worst_limit, std::abs(t0.mu_F - main.mu_e),
                            std::abs(t0.mu_M - main.mu_M_high.value()),
                            std::abs(t0.mu_M - main.mu_D.value())});
    for (int k = 1; k < 10; ++k) {
      const double mu = mu_e(b) + (1.0 - mu_e(b)) * k / 10.0;
      const double l0 = physical_cost_lower_belief(mu, zero);
      worst_limit = std::max({worst_limit, std::abs(l0 - mu_e(b)),
                              std::abs(l0 - linear.kernel().lower_belief(mu))});
    }
  }
  report(8, "physical_cost_closed_forms", worst_eq <= 1e-12 && worst_limit <= 1e-10,
         fmt("seed=1008 instances=100 max|indifference|=%.3g max|psi->0 - main|=%.3g", worst_eq,
             worst_limit));
}

void criterion_9() {
  Rng rng(1009);
  int evaluated = 0, violations = 0, xstar_checked = 0;
  double worst_xstar = 0.0;
  for (int i = 0; i < 60; ++i) {
    const auto inst = oracle::random_instance(rng, oracle::PhiKind::Concave);
    const Model m(inst.params, inst.phi);
    const InterimSolver solver(m);
    for (int k = 0; k < 10; ++k) {
      const double mu = (k + 0.5) / 10.0;
      const auto sol = solver.solve(mu);
      if (sol.region != InterimRegion::InDNotF && sol.region != InterimRegion::InMNotD) continue;
      oracle::CriterionProblem cp{[&](double x) { return m.P(x); },
                                  [&](double x) { return m.V(x); }, mu, m.Vbar(mu), m.mu_e(),
                                  {m.mu_e()}};
      const double x_lo = std::max(mu, m.mu_e());
      const double top = std::min(mu, m.mu_e());
      auto margin = [&](double x) {
        double best = -INFINITY;
        for (double y : numeric::linspace(0.0, top, 201)) {
          if (y >= x) continue;
          const double w = (mu - y) / (x - y);
          best = std::max(best, (1.0 - w) * m.V(y) + w * m.V(x) - cp.rhs);
        }
        return best;
      };
      double peak_x = 1.0, peak = -INFINITY;
      for (int j = 1; j <= 400; ++j) {
        const double x = x_lo + (1.0 - x_lo) * j / 400.0;
        const double g = margin(x);
        if (g > peak) {
          peak = g;
          peak_x = x;
        }
        if (g >= 0.0 && x > x_lo + 1e-6) {
          auto r = oracle::best_good_news_criterion(x, cp);
          if (r.defined) {
            ++evaluated;
            if (!r.holds) ++violations;
          }
        }
      }
      auto xs = oracle::x_star_search(peak_x, 1.0, [&](double x) { return margin(x) >= 0.0; });
      if (xs) {
        ++xstar_checked;
        worst_xstar = std::max(worst_xstar, std::abs(*xs - sol.accept_signal.high()));
      } else {
        worst_xstar = 1.0;
      }
    }
  }
  int cost_evaluated = 0, cost_violations = 0;
  for (int i = 0; i < 60; ++i) {
    CostExampleParams p;
    p.c_low = rng.uniform(0.0, 0.9);
    p.c_high = rng.uniform(1.05, 3.0);
    p.upsilon0 = rng.uniform(p.upsilon_e(), 1.0);
    p.psi = rng.uniform(0.0, 0.9) * (1.0 - p.upsilon0) * (1.0 - p.c_low);
    p.P_under = rng.uniform(0.0, 0.5);
    p.P_bar = rng.uniform(p.P_under + 0.1, 1.0);
    oracle::CriterionProblem cp{[&](double u) { return cost_sender_payoff(u, p); },
                                [&](double u) { return cost_receiver_value(u, p); },
                                p.upsilon0,
                                p.psi,
                                p.upsilon_e(),
                                {p.upsilon_e()}};
    const double x_lo = std::max(p.upsilon0, p.upsilon_e());
    for (int j = 1; j <= 50; ++j) {
      auto r = oracle::best_good_news_criterion(x_lo + (1.0 - x_lo) * j / 50.0, cp);
      if (!r.defined) continue;
      ++cost_evaluated;
      if (!r.holds) ++cost_violations;
    }
  }
  report(9, "best_good_news",
         violations == 0 && cost_violations == 0 && worst_xstar <= 1e-8 && evaluated > 0 &&
             cost_evaluated > 0,
         fmt("seed=1009 main_points=%d main_violations=%d cost_points=%d cost_violations=%d "
             "x_star_checked=%d max|x*-upper|=%.3g",
             evaluated, violations, cost_evaluated, cost_violations, xstar_checked,
             worst_xstar));
}

void criterion_10() {
  const auto t0 = Clock::now();
  Rng rng(1010);
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto inst = oracle::random_instance(rng, oracle::PhiKind::Concave);
    const Model m(inst.params, inst.phi);
    const auto sol = optimal_exante(m);
    const auto mc = oracle::monte_carlo_health(to_policy(sol), m, 1000000, 2000 + i);
    const double se = std::max(mc.std_error, 1e-12);
    worst_z = std::max(worst_z, std::abs(mc.estimate - sol.doctor_value) / se);
  }
  const double secs = seconds_since(t0);
  report(10, "monte_carlo", worst_z <= 4.0 && secs <= 120.0,
         fmt("seeds=1010,2000..2019 instances=20 draws=1e6 max|z|=%.3f time=%.1fs", worst_z,
             secs));
}

void criterion_11() {
  Rng rng(1011);
  double worst_idem = 0.0, worst_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto f = oracle::random_piecewise(rng, 3 + rng.index(10));
    envelope::EnvelopeOptions coarse_opt, fine_opt;
    coarse_opt.grid_n = 501;
    fine_opt.grid_n = 1001;
    const auto coarse = envelope::concave_envelope(f, 0.0, 1.0, coarse_opt);
    const auto again = envelope::concave_envelope(coarse, 0.0, 1.0, coarse_opt);
    for (std::size_t k = 0; k < coarse.values.size(); ++k) {
      worst_idem = std::max(worst_idem, std::abs(coarse.values[k] - again.values[k]));
    }
    const auto fine = envelope::concave_envelope(f, 0.0, 1.0, fine_opt);
    const double bound = 10.0 * f.lipschitz() / 500.0;
    double change = 0.0;
    for (std::size_t k = 0; k < coarse.values.size(); ++k) {
      change = std::max(change, std::abs(coarse.values[k] - fine.values[2 * k]));
    }
    worst_ratio = std::max(worst_ratio, change / bound);
  }
  report(11, "envelope_engine", worst_idem <= 1e-9 && worst_ratio <= 1.0,
         fmt("seed=1011 functions=100 max|idempotence|=%.3g max(change/bound)=%.3g", worst_idem,
             worst_ratio));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("acceptance: %d failing criteria, total %.1fs\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
