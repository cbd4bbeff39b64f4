#pragma once

#include <optional>

#include "persuade/curve.hpp"
#include "persuade/exante.hpp"
#include "persuade/model.hpp"

namespace persuade {

// ---- Physical test fee with linear distortion ----------------------------

// The fee psi is measured in the same units as the sick-state payoffs
// p_bar - c and p_lower, i.e. the patient tests iff
// E[max(p_bar - c, p_lower)] - psi >= p_lower(mu1).
struct PhysicalCostParams {
  ModelParams base;
  double psi = 0.0;
  void validate() const;
};

struct PhysicalCostThresholds {
  double mu_F;  // no disclosure motivates the test up to here
  double mu_M;  // some signal motivates the test up to here
};

PhysicalCostThresholds physical_cost_thresholds(const PhysicalCostParams& p);
// Lower atom of the binding perfect-good-news signal.
double physical_cost_lower_belief(Belief mu1, const PhysicalCostParams& p);
InterimSolution physical_cost_interim(Belief mu1, const PhysicalCostParams& p);
ExAnteSolution physical_cost_policy(const PhysicalCostParams& p);
ExAnteSolution physical_cost_policy(const PhysicalCostParams& p, Belief mu0);

// ---- Designing the test itself ---------------------------------------------

// Belief here is Pr[healthy]. The sick patient's untreated health
// probability p_under is known.
struct TestModelParams {
  double alpha0 = 0.7;
  double p_bar = 0.9;
  double p_under = 0.4;
  double c = 0.25;
  AnticipationCurve phi;
  void validate() const;
};

struct TestThresholds {
  double alpha_e;
  double alpha_g;
  double alpha_v;
  bool degenerate = false;  // V has no concave stretch to reward (linear phi)
};

enum class TestRegion { Pessimistic, GoodNewsSuffices, Rotated, NoBenefit };

struct TestSolution {
  PosteriorLottery signal = PosteriorLottery::point(0.5);
  TestRegion region = TestRegion::Pessimistic;
  double alpha_star = 0.0;      // upper posterior
  double lower = 0.0;           // lower posterior
  double bad_news_prob = 0.0;   // weight on the lower posterior
  double doctor_value = 0.0;    // health probability
  double patient_value = 0.0;
  double pc_slack = 0.0;
  bool at_alpha_v = false;      // prior sits exactly on the upper boundary
};

class TestDesign {
 public:
  explicit TestDesign(TestModelParams p);

  double alpha_e() const { return alpha_e_; }
  double V(Belief a) const;
  double dV(Belief a) const;
  // Expected health at posterior a, given the treatment choice.
  double health(Belief a) const;
  double outside(Belief a0) const;
  // Upper tangent point on [0, alpha_e] seen from (a, V(a)).
  double l_alpha(Belief a) const;
  const TestThresholds& thresholds() const { return th_; }
  TestSolution solve(Belief a0) const;
  const TestModelParams& params() const { return p_; }

 private:
  TestModelParams p_;
  double alpha_e_;
  TestThresholds th_{};
};

TestThresholds test_thresholds(const TestModelParams& p);
double l_alpha(Belief a, const TestModelParams& p);
TestSolution optimal_test(Belief a0, const TestModelParams& p);

// ---- Disclosure about the cost of acting --------------------------------------

struct CostExampleParams {
  double c_high = 1.5;
  double c_low = 0.5;
  double upsilon0 = 0.6;
  double psi = 0.1;
  double P_bar = 1.0;
  double P_under = 0.0;
  void validate() const;
  double upsilon_e() const { return (1.0 - c_low) / (c_high - c_low); }
};

// Receiver acts iff upsilon <= upsilon_e; value of acting at upsilon.
double cost_receiver_value(Belief u, const CostExampleParams& p);
double cost_sender_payoff(Belief u, const CostExampleParams& p);

struct CostSignal {
  bool persuasion_possible = false;
  double lower = 0.0;
  std::optional<PosteriorLottery> signal;
  double sender_value = 0.0;
  double pc_slack = 0.0;
};

CostSignal cost_disclosure_signal(const CostExampleParams& p);

}  // namespace persuade
