#include "persuade/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persuade/envelope.hpp"
#include "persuade/errors.hpp"
#include "persuade/numeric.hpp"

namespace persuade {
namespace {

void require(bool ok, const std::string& field, const char* rule) {
  if (!ok) throw ConfigError(field + ": " + rule);
}

}  // namespace

// Physical test fee.

void PhysicalCostParams::validate() const {
  base.validate();
  require(std::isfinite(psi) && psi >= 0.0, "physical_cost.psi", "must be nonnegative");
}

PhysicalCostThresholds physical_cost_thresholds(const PhysicalCostParams& p) {
  const auto& b = p.base;
  const double margin = b.p_bar - b.c - p.psi - b.p_low;
  return {margin / (b.p_high - b.p_low), margin / (b.p_bar - b.c - b.p_low)};
}

double physical_cost_lower_belief(Belief mu1, const PhysicalCostParams& p) {
  const auto& b = p.base;
  return ((1.0 - mu1) * (b.p_bar - b.c - b.p_low) - p.psi) /
         ((1.0 - mu1) * (b.p_high - b.p_low) - p.psi);
}

InterimSolution physical_cost_interim(Belief mu1, const PhysicalCostParams& p) {
  p.validate();
  const Model m(p.base, AnticipationCurve::linear());
  const auto th = physical_cost_thresholds(p);
  InterimSolution s;
  s.prior = mu1;
  s.reject_signal = PosteriorLottery::point(mu1);
  auto sick_value = [&](double x) { return std::max(p.base.p_bar - p.base.c, m.p_lower(x)); };
  if (th.mu_F > 0.0 && mu1 <= th.mu_F) {
    s.region = InterimRegion::InF;
    s.accept_signal = PosteriorLottery::point(mu1);
  } else if (th.mu_F > 0.0 && mu1 <= th.mu_M) {
    s.region = InterimRegion::InDNotF;
    double l = std::clamp(physical_cost_lower_belief(mu1, p), 0.0, std::min(mu1, m.mu_e()));
    s.accept_signal = PosteriorLottery::split(mu1, l, 1.0);
  } else {
    s.region = InterimRegion::OutsideM;
    s.accept_signal = PosteriorLottery::point(mu1);
  }
  const double a = p.base.alpha;
  const double accept = s.accept_signal.expect(sick_value) - p.psi;
  const double reject = m.p_lower(mu1);
  s.tests = s.region != InterimRegion::OutsideM;
  s.pc_slack = accept - reject;
  s.patient_value = a + (1.0 - a) * (s.tests ? accept : std::max(accept, reject));
  s.doctor_value = s.tests ? s.accept_signal.expect([&](double x) { return m.health_if_tested(x); })
                           : m.health_if_skipped(mu1);
  return s;
}

ExAnteSolution physical_cost_policy(const PhysicalCostParams& p) {
  return physical_cost_policy(p, p.base.mu0);
}

ExAnteSolution physical_cost_policy(const PhysicalCostParams& p, Belief mu0) {
  p.validate();
  if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw DomainError("ex ante prior must lie in [0, 1]");
  const auto th = physical_cost_thresholds(p);
  ExAnteSolution out;
  RegimeLabel label;
  if (th.mu_F <= 0.0) {
    out.lottery = PosteriorLottery::point(mu0);
    label = RegimeLabel::UnableToPersuade;
  } else if (mu0 <= th.mu_F) {
    out.lottery = PosteriorLottery::point(mu0);
    label = RegimeLabel::NoDisclosureNeeded;
  } else {
    out.lottery = PosteriorLottery::split(mu0, th.mu_F, 1.0);
    label = RegimeLabel::PreemptiveWarning;
  }
  for (const auto& atom : out.lottery.atoms()) {
    out.interim.push_back(physical_cost_interim(atom.posterior, p));
    out.doctor_value += atom.weight * out.interim.back().doctor_value;
    out.patient_value += atom.weight * out.interim.back().patient_value;
  }
  out.regime = {label, physical_cost_interim(mu0, p).region};
  return out;
}

// Test design.

void TestModelParams::validate() const {
  for (double v : {alpha0, p_bar, p_under, c}) {
    require(std::isfinite(v), "test_design", "all values must be finite");
  }
  require(alpha0 > 0.0 && alpha0 < 1.0, "test_design.alpha0", "must lie in (0, 1)");
  require(p_under >= 0.0, "test_design.p_under", "must be nonnegative");
  require(p_under < p_bar && p_bar <= 1.0, "test_design.p_bar",
          "must exceed p_under and not exceed 1");
  require(c > 0.0, "test_design.c", "must be positive");
  require(p_bar - p_under > c, "test_design.c", "must be below p_bar - p_under");
  require(phi.is_concave(), "phi", "test design needs a concave distortion");
}

TestDesign::TestDesign(TestModelParams p) : p_(std::move(p)) {
  p_.validate();
  alpha_e_ = 1.0 - p_.c / (p_.p_bar - p_.p_under);
  th_.alpha_e = alpha_e_;
  th_.degenerate = p_.phi.is_linear();

  // Bitangent of the two concave pieces by alternating tangents.
  double x = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double l = l_alpha(x);
    auto t = envelope::tangent_from_point([&](double a) { return V(a); }, l, V(l), alpha_e_, 1.0,
                                          envelope::SlopeDirection::Maximize, true,
                                          [&](double a) { return dV(a); });
    const double next = t.touch_point;
    if (std::abs(next - x) < 1e-15) {
      x = next;
      break;
    }
    x = next;
  }
  th_.alpha_v = x;

  // Smallest prior above alpha_e where {l(1), 1} is worth no more than
  // no information.
  const double l1 = l_alpha(1.0);
  auto chord = [&](double a) { return V(l1) + (a - l1) / (1.0 - l1) * (V(1.0) - V(l1)); };
  auto gap = [&](double a) { return V(a) - chord(a); };
  if (gap(alpha_e_) >= 0.0) {
    th_.alpha_g = alpha_e_;
  } else {
    auto peak = numeric::golden_max(gap, alpha_e_, 1.0, 1e-14);
    th_.alpha_g = peak.value <= 1e-14 ? 1.0 : numeric::bisect(gap, alpha_e_, peak.x).value();
  }
}

double TestDesign::V(Belief a) const {
  if (a <= alpha_e_) return p_.phi(a + (1.0 - a) * p_.p_bar - p_.c);
  return p_.phi(a + (1.0 - a) * p_.p_under);
}

double TestDesign::dV(Belief a) const {
  if (a < alpha_e_) return p_.phi.derivative(a + (1.0 - a) * p_.p_bar - p_.c) * (1.0 - p_.p_bar);
  return p_.phi.derivative(a + (1.0 - a) * p_.p_under) * (1.0 - p_.p_under);
}

double TestDesign::health(Belief a) const {
  return a + (1.0 - a) * (a <= alpha_e_ ? p_.p_bar : p_.p_under);
}

double TestDesign::outside(Belief a0) const { return p_.phi(a0 + (1.0 - a0) * p_.p_under); }

double TestDesign::l_alpha(Belief a) const {
  if (alpha_e_ <= 0.0) return 0.0;
  if (!(a > alpha_e_)) throw DomainError("l(alpha) needs alpha above alpha_e");
  auto t = envelope::tangent_from_point([&](double x) { return V(x); }, a, V(a), 0.0, alpha_e_,
                                        envelope::SlopeDirection::Minimize, true,
                                        [&](double x) { return dV(x); });
  return t.touch_point;
}

TestSolution TestDesign::solve(Belief a0) const {
  if (!(a0 > 0.0 && a0 < 1.0)) throw DomainError("test prior must lie in (0, 1)");
  TestSolution s;
  const double ae = alpha_e_;
  if (a0 <= ae) {
    s.region = TestRegion::Pessimistic;
    s.signal = PosteriorLottery::point(a0);
  } else if (a0 >= th_.alpha_v) {
    s.region = TestRegion::NoBenefit;
    s.signal = PosteriorLottery::point(a0);
    s.at_alpha_v = a0 == th_.alpha_v;
  } else if (a0 <= th_.alpha_g) {
    s.region = TestRegion::GoodNewsSuffices;
    s.signal = PosteriorLottery::split(a0, l_alpha(1.0), 1.0);
  } else {
    s.region = TestRegion::Rotated;
    const double l0 = l_alpha(a0);
    const double slope = (V(a0) - V(l0)) / (a0 - l0);
    auto gap = [&](double t) { return V(a0) + slope * (t - a0) - V(t); };
    double star = 1.0;
    if (gap(1.0) > 0.0) {
      auto low = numeric::golden_max([&](double t) { return -gap(t); }, a0, 1.0, 1e-14);
      auto root = numeric::bisect(gap, low.x, 1.0, 1e-15);
      if (!root) throw InconsistencyError("rotated test signal: crossing not found");
      star = *root;
    }
    s.signal = PosteriorLottery::split(a0, l0, star);
  }
  s.lower = s.signal.low();
  s.alpha_star = s.signal.high();
  s.bad_news_prob = s.signal.size() > 1 ? s.signal.atoms().front().weight : 0.0;
  s.patient_value = s.signal.expect([&](double a) { return V(a); });
  s.pc_slack = s.patient_value - outside(a0);
  s.doctor_value = s.signal.expect([&](double a) { return health(a); });
  return s;
}

TestThresholds test_thresholds(const TestModelParams& p) { return TestDesign(p).thresholds(); }

double l_alpha(Belief a, const TestModelParams& p) { return TestDesign(p).l_alpha(a); }

TestSolution optimal_test(Belief a0, const TestModelParams& p) { return TestDesign(p).solve(a0); }

// Cost example.

void CostExampleParams::validate() const {
  for (double v : {c_high, c_low, upsilon0, psi, P_bar, P_under}) {
    require(std::isfinite(v), "cost_example", "all values must be finite");
  }
  require(c_high > 1.0, "cost_example.c_high", "must exceed 1");
  require(c_low >= 0.0 && c_low < 1.0, "cost_example.c_low", "must lie in [0, 1)");
  require(P_bar >= P_under, "cost_example.P_bar", "must be at least P_under");
  require(psi >= 0.0, "cost_example.psi", "must be nonnegative");
  require(upsilon0 >= upsilon_e() && upsilon0 < 1.0, "cost_example.upsilon0",
          "must lie in [upsilon_e, 1)");
}

double cost_receiver_value(Belief u, const CostExampleParams& p) {
  return std::max(0.0, 1.0 - u * p.c_high - (1.0 - u) * p.c_low);
}

double cost_sender_payoff(Belief u, const CostExampleParams& p) {
  return u <= p.upsilon_e() ? p.P_bar : p.P_under;
}

CostSignal cost_disclosure_signal(const CostExampleParams& p) {
  p.validate();
  CostSignal out;
  const double u0 = p.upsilon0;
  const double num = (1.0 - u0) * (1.0 - p.c_low) - p.psi;
  const double den = (1.0 - u0) * (p.c_high - p.c_low) - p.psi;
  if (!(num > 0.0) || !(den > 0.0)) {
    out.sender_value = cost_sender_payoff(u0, p);
    return out;
  }
  out.persuasion_possible = true;
  out.lower = num / den;
  out.signal = PosteriorLottery::split(u0, out.lower, 1.0);
  const double w_low = (1.0 - u0) / (1.0 - out.lower);
  out.sender_value = w_low * p.P_bar + (1.0 - w_low) * p.P_under;
  out.pc_slack = w_low * (1.0 - out.lower * p.c_high - (1.0 - out.lower) * p.c_low) - p.psi;
  return out;
}

}  // namespace persuade
