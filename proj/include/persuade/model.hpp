#pragma once

#include "persuade/curve.hpp"
#include "persuade/lottery.hpp"

namespace persuade {

// Primitive parameters of the patient-doctor model.
//   alpha   Pr[healthy] before the test
//   p_bar   health probability when sick and treated
//   p_high, p_low  the two candidate health probabilities when sick and
//           untreated; mu0 is the prior that the truth is p_high
//   c       cost of treatment in health-probability units
struct ModelParams {
  double alpha = 0.3;
  double p_bar = 0.9;
  double p_high = 0.7;
  double p_low = 0.2;
  double c = 0.35;
  double mu0 = 0.5;

  // Throws ConfigError naming the first violated field.
  void validate() const;
};

// Untreated health probability at belief mu.
double p_lower(Belief mu, const ModelParams& m);
// Belief at which the patient is indifferent about treatment.
double mu_e(const ModelParams& m);
// Doctor's payoff after a sick diagnosis: p_bar when the patient treats
// (mu <= mu_e, ties treat), p_lower(mu) otherwise.
double payoff_P(Belief mu, const ModelParams& m);
// Patient's payoff from taking the test. The continuation value
// v2 = max(p_bar - c, p_lower(mu)) is folded into the two branches.
double payoff_V(Belief mu, const ModelParams& m, const AnticipationCurve& phi);
// Patient's payoff from skipping the test.
double payoff_V0(Belief mu, const ModelParams& m, const AnticipationCurve& phi);
// Skipping payoff under full disclosure: the chord of V0 between 0 and 1.
double payoff_Vbar(Belief mu, const ModelParams& m, const AnticipationCurve& phi);
double phi_inverse(double w, const AnticipationCurve& phi);
// True iff the patient tests at the most pessimistic belief: V(0) >= V0(0).
bool reacts_to_fear(const ModelParams& m, const AnticipationCurve& phi);

// Parameters and distortion bundled, with the payoffs as members.
struct Model {
  ModelParams params;
  AnticipationCurve phi;

  Model(ModelParams p, AnticipationCurve f);

  double mu_e() const { return mu_e_; }
  double p_lower(Belief mu) const;
  double P(Belief mu) const;
  double V(Belief mu) const;
  double V0(Belief mu) const;
  double Vbar(Belief mu) const;
  double dV(Belief mu) const;   // right derivative
  double dV0(Belief mu) const;
  // Health probability when the patient tests and the posterior after a
  // sick diagnosis is mu.
  double health_if_tested(Belief mu) const;
  // Health probability when the patient skips the test at belief mu.
  double health_if_skipped(Belief mu) const;
  bool reacts_to_fear() const;

 private:
  double mu_e_;
};

}  // namespace persuade
