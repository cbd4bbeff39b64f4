#include "persuade/exante.hpp"

#include <algorithm>
#include <cmath>

#include "persuade/envelope.hpp"
#include "persuade/errors.hpp"
#include "persuade/numeric.hpp"

namespace persuade {
namespace {

constexpr double kTieTol = 1e-12;

// Interim stage with no further information in either branch.
InterimSolution uninformed_interim(Belief mu, const Model& m) {
  InterimSolution s;
  s.prior = mu;
  s.accept_signal = PosteriorLottery::point(mu);
  s.reject_signal = PosteriorLottery::point(mu);
  const double accept = m.V(mu);
  const double reject = m.V0(mu);
  s.tests = accept >= reject - kTieTol;
  s.region = s.tests ? InterimRegion::InF : InterimRegion::OutsideM;
  s.pc_slack = accept - reject;
  s.patient_value = std::max(accept, reject);
  s.doctor_value = s.tests ? m.health_if_tested(mu) : m.health_if_skipped(mu);
  return s;
}

void fill_values(ExAnteSolution& out) {
  out.doctor_value = 0.0;
  out.patient_value = 0.0;
  auto atoms = out.lottery.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.doctor_value += atoms[i].weight * out.interim[i].doctor_value;
    out.patient_value += atoms[i].weight * out.interim[i].patient_value;
  }
}

ExAnteSolution from_interim(const InterimSolver& solver, PosteriorLottery lottery) {
  ExAnteSolution out;
  out.lottery = std::move(lottery);
  for (const auto& a : out.lottery.atoms()) out.interim.push_back(solver.solve(a.posterior));
  fill_values(out);
  return out;
}

}  // namespace

TwoStagePolicy to_policy(const ExAnteSolution& s) {
  TwoStagePolicy p{s.lottery.prior(), {}};
  auto atoms = s.lottery.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    p.branches.push_back({atoms[i].posterior, atoms[i].weight, s.interim[i].accept_signal,
                          s.interim[i].reject_signal});
  }
  return p;
}

PolicyEvaluation evaluate_policy(const TwoStagePolicy& policy, const Model& m) {
  PolicyEvaluation ev;
  for (const auto& b : policy.branches) {
    const double accept = b.accept.expect([&](double x) { return m.V(x); });
    const double reject = b.reject.expect([&](double x) { return m.V0(x); });
    const bool tests = accept >= reject - kTieTol;
    ev.tests.push_back(tests);
    ev.patient_value += b.weight * std::max(accept, reject);
    ev.doctor_value +=
        b.weight * (tests ? b.accept.expect([&](double x) { return m.health_if_tested(x); })
                          : m.health_if_skipped(b.belief));
  }
  return ev;
}

ReductionResult simple_recommendation_reduction(const TwoStagePolicy& policy, const Model& m) {
  auto ev = evaluate_policy(policy, m);
  std::vector<PosteriorLottery> acc_in, rej_in, acc_out;
  std::vector<double> w_in, w_out;
  double mass_in = 0.0, mean_in = 0.0, mass_out = 0.0, mean_out = 0.0;
  for (std::size_t i = 0; i < policy.branches.size(); ++i) {
    const auto& b = policy.branches[i];
    if (ev.tests[i]) {
      acc_in.push_back(b.accept);
      rej_in.push_back(b.reject);
      w_in.push_back(b.weight);
      mass_in += b.weight;
      mean_in += b.weight * b.belief;
    } else {
      acc_out.push_back(b.accept);
      w_out.push_back(b.weight);
      mass_out += b.weight;
      mean_out += b.weight * b.belief;
    }
  }
  if (w_in.empty()) return {policy, false};
  TwoStagePolicy out{policy.prior, {}};
  mean_in /= mass_in;
  out.branches.push_back({mean_in, mass_in, PosteriorLottery::mixture(acc_in, w_in),
                          PosteriorLottery::mixture(rej_in, w_in)});
  if (!w_out.empty()) {
    mean_out /= mass_out;
    out.branches.push_back({mean_out, mass_out, PosteriorLottery::mixture(acc_out, w_out),
                            PosteriorLottery::point(mean_out)});
  }
  std::sort(out.branches.begin(), out.branches.end(),
            [](const PolicyBranch& a, const PolicyBranch& b) { return a.belief < b.belief; });
  return {std::move(out), true};
}

double script_V(Belief mu, const Model& m) { return std::max(m.V0(mu), m.V(0.0)); }

PcThresholds thresholds_pc(const Model& m) {
  PcThresholds t;
  if (!m.reacts_to_fear()) return t;
  const double floor = m.V(0.0);
  auto sv = [&](double mu) { return script_V(mu, m); };

  auto n = numeric::bisect([&](double mu) { return m.V0(mu) - floor; }, 0.0, 1.0);
  if (!n) throw InconsistencyError("no belief equates testing and skipping");
  // V0(mu_e) >= V(mu_e) for concave phi, so mu_N <= mu_e; the clamp keeps a
  // bisection result on the treating side when the two coincide (linear phi).
  const double mu_N = std::min(*n, m.mu_e());
  t.mu_N = mu_N;

  // Full disclosure minus no disclosure is convex above mu_N and zero at 1.
  auto fd_gap = [&](double mu) { return mu * sv(1.0) + (1.0 - mu) * sv(0.0) - sv(mu); };
  if (mu_N >= 1.0) {
    t.mu_T = 1.0;
  } else {
    auto low = numeric::golden_max([&](double mu) { return -fd_gap(mu); }, mu_N, 1.0, 1e-14);
    if (-low.value >= -1e-14) {
      t.mu_T = 1.0;
    } else {
      t.mu_T = numeric::bisect(fd_gap, mu_N, low.x);
    }
  }

  if (mu_N >= 1.0) {
    t.mu_V = 1.0;
  } else {
    auto tan = envelope::tangent_from_point(
        [&](double mu) { return m.V0(mu); }, 0.0, floor, mu_N, 1.0,
        envelope::SlopeDirection::Maximize, true, [&](double mu) { return m.dV0(mu); });
    t.mu_V = tan.touch_point;
  }
  return t;
}

PersuasionProblem pc_problem(const Model& model) {
  auto t = thresholds_pc(model);
  if (!t.mu_N) throw DomainError("participation problem undefined without fear reaction");
  auto m = std::make_shared<Model>(model);
  const double mu_N = *t.mu_N;
  PersuasionProblem p;
  p.patient = [m](double mu) { return script_V(mu, *m); };
  p.patient_derivative = [m, mu_N](double mu) { return mu < mu_N ? 0.0 : m->dV0(mu); };
  p.outside = [m](double mu) { return m->V0(mu); };
  p.kink = mu_N;
  return p;
}

ExAnteSolution optimal_exante(const Model& m, std::size_t grid_n) {
  return optimal_exante(m, m.params.mu0, grid_n);
}

ExAnteSolution optimal_exante(const Model& m, Belief mu0, std::size_t grid_n) {
  if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw DomainError("ex ante prior must lie in [0, 1]");
  const bool concave = m.phi.is_concave();
  InterimSolver solver(m, concave ? InterimVariant::Conditional : InterimVariant::General,
                       InterimOptions{.grid_n = grid_n});
  const auto& th = solver.thresholds();
  const auto region0 = solver.solve(mu0).region;

  if (concave && th.reacts_to_fear) {
    const double low = std::min(th.mu_F.value(), m.mu_e());
    const bool warn = mu0 > low;
    auto out = from_interim(solver, warn ? PosteriorLottery::split(mu0, low, 1.0)
                                         : PosteriorLottery::point(mu0));
    out.regime = {warn ? RegimeLabel::PreemptiveWarning : RegimeLabel::NoDisclosureNeeded,
                  region0};
    return out;
  }
  if (concave && !th.mu_M_low) {
    auto out = from_interim(solver, PosteriorLottery::point(mu0));
    out.regime = {RegimeLabel::UnableToPersuade, region0};
    return out;
  }

  // Concavify P* directly.
  auto pstar = [&](double mu) { return solver.P_star(mu); };
  envelope::EnvelopeOptions eo;
  eo.grid_n = grid_n;
  eo.knots = {m.mu_e()};
  if (th.mu_v) eo.knots.push_back(*th.mu_v);
  if (th.mu_M_low) {
    eo.knots.push_back(*th.mu_M_low);
    eo.usc_points.push_back(*th.mu_M_low);
  }
  if (th.mu_M_high) eo.knots.push_back(*th.mu_M_high);
  auto env = envelope::concave_envelope(pstar, 0.0, 1.0, eo);

  PosteriorLottery lottery = PosteriorLottery::point(mu0);
  if (auto seg = env.segment_containing(mu0)) {
    double l = seg->left;
    double r = seg->right;
    if (th.mu_M_low && th.mu_M_high && *th.mu_M_low < *th.mu_M_high) {
      const double a = *th.mu_M_low;
      const double b = *th.mu_M_high;
      // Sharpen the contact points on the motivated stretch.
      if (l == 0.0 && r >= a && r <= b) {
        r = envelope::tangent_from_point(pstar, 0.0, pstar(0.0), a, b,
                                         envelope::SlopeDirection::Maximize, false)
                .touch_point;
      } else if (r == 1.0 && l >= a && l <= b) {
        l = envelope::tangent_from_point(pstar, 1.0, pstar(1.0), a, b,
                                         envelope::SlopeDirection::Minimize, false)
                .touch_point;
      }
    }
    if (l < mu0 && mu0 < r) lottery = PosteriorLottery::split(mu0, l, r);
  }
  auto out = from_interim(solver, std::move(lottery));
  const bool motivated = th.mu_M_low.has_value() || th.reacts_to_fear;
  RegimeLabel label = RegimeLabel::UnableToPersuade;
  if (th.reacts_to_fear) {
    label = out.lottery.size() > 1 ? RegimeLabel::PreemptiveWarning
                                   : RegimeLabel::NoDisclosureNeeded;
  } else if (motivated) {
    label = RegimeLabel::CommittedComfort;
  }
  out.regime = {label, region0};
  return out;
}

ExAnteSolution optimal_policy_with_pc(const Model& m) {
  return optimal_policy_with_pc(m, m.params.mu0);
}

ExAnteSolution optimal_policy_with_pc(const Model& m, Belief mu0) {
  if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw DomainError("ex ante prior must lie in [0, 1]");
  const auto t = thresholds_pc(m);
  ExAnteSolution out;
  auto build = [&](PosteriorLottery lottery, RegimeLabel label) {
    out.lottery = std::move(lottery);
    out.interim.clear();
    for (const auto& a : out.lottery.atoms()) out.interim.push_back(uninformed_interim(a.posterior, m));
    fill_values(out);
    out.ex_ante_pc_slack = out.patient_value - m.V0(mu0);
    out.regime = {label, uninformed_interim(mu0, m).region};
  };

  if (!t.mu_N) {
    build(PosteriorLottery::point(mu0), RegimeLabel::UnableToPersuade);
    return out;
  }
  const double mu_N = *t.mu_N;
  const double mu_T = *t.mu_T;
  const double mu_V = *t.mu_V;
  auto sv = [&](double mu) { return script_V(mu, m); };

  if (mu0 <= mu_N) {
    build(PosteriorLottery::point(mu0), RegimeLabel::NoDisclosureNeeded);
  } else if (mu0 <= mu_T && mu0 < 1.0) {
    double lower = 1.0 - (1.0 - mu0) * (sv(1.0) - sv(0.0)) / (sv(1.0) - sv(mu0));
    lower = std::clamp(lower, 0.0, std::min(mu0, mu_N));
    build(PosteriorLottery::split(mu0, lower, 1.0), RegimeLabel::PreemptiveWarning);
  } else if (mu0 < mu_V) {
    const double target = sv(mu0);
    auto gap = [&](double h) { return (1.0 - mu0 / h) * sv(0.0) + (mu0 / h) * sv(h) - target; };
    double h = 1.0;
    if (gap(1.0) < 0.0) {
      auto root = numeric::bisect(gap, mu_V, 1.0, 1e-15);
      if (!root) throw InconsistencyError("perfect-bad-news ex ante signal not bracketed");
      h = *root;
    }
    build(PosteriorLottery::split(mu0, 0.0, h), RegimeLabel::PreemptiveComfort);
  } else {
    build(PosteriorLottery::point(mu0), RegimeLabel::UnableToPersuade);
    if (out.interim.front().tests) out.regime.label = RegimeLabel::NoDisclosureNeeded;
  }
  return out;
}

Regime classify_regime(const Model& model, bool with_pc) {
  return with_pc ? optimal_policy_with_pc(model).regime : optimal_exante(model).regime;
}

}  // namespace persuade
