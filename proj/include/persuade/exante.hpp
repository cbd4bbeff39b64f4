#pragma once

#include <optional>
#include <vector>

#include "persuade/interim.hpp"
#include "persuade/model.hpp"
#include "persuade/types.hpp"

namespace persuade {

struct ExAnteSolution {
  PosteriorLottery lottery = PosteriorLottery::point(0.5);
  std::vector<InterimSolution> interim;  // one per ex ante atom, same order
  Regime regime;
  double doctor_value = 0.0;
  double patient_value = 0.0;
  std::optional<double> ex_ante_pc_slack;
};

// Two-stage policy in its raw form, independent of any solver: an ex ante
// lottery and, per atom, the signals sent after testing and after refusing.
struct PolicyBranch {
  Belief belief;
  double weight;
  PosteriorLottery accept;
  PosteriorLottery reject;
};

struct TwoStagePolicy {
  Belief prior;
  std::vector<PolicyBranch> branches;
};

TwoStagePolicy to_policy(const ExAnteSolution& s);

struct PolicyEvaluation {
  double doctor_value = 0.0;
  double patient_value = 0.0;
  std::vector<bool> tests;
};

// Values under patient best responses (ties go to testing).
PolicyEvaluation evaluate_policy(const TwoStagePolicy& policy, const Model& model);

struct ReductionResult {
  TwoStagePolicy policy;
  bool reduced = false;  // false when no branch leads to a test
};

// Pools the branches that lead to a test into one atom and the remaining
// branches into another (with no information after refusing there).
ReductionResult simple_recommendation_reduction(const TwoStagePolicy& policy,
                                                const Model& model);

// Ex ante value of a patient who may still refuse: max(V0, V(0)).
double script_V(Belief mu, const Model& model);

struct PcThresholds {
  std::optional<double> mu_N;  // indifference between testing and not, uninformed
  std::optional<double> mu_T;  // full disclosure still acceptable up to here
  std::optional<double> mu_V;  // persuasion helps below here
};
PcThresholds thresholds_pc(const Model& model);

// Mandatory listening: backward induction over the interim solution.
ExAnteSolution optimal_exante(const Model& model, std::size_t grid_n = 2001);
// Same problem at an arbitrary prior in [0, 1], ignoring model.params.mu0.
ExAnteSolution optimal_exante(const Model& model, Belief mu0, std::size_t grid_n);
// Patient may skip the consultation: ex ante participation constraint.
ExAnteSolution optimal_policy_with_pc(const Model& model);
ExAnteSolution optimal_policy_with_pc(const Model& model, Belief mu0);
Regime classify_regime(const Model& model, bool with_pc);

// The participation-constrained problem written as a persuasion kernel
// problem: script_V as the patient payoff, V0 as the outside option and
// mu_N as the kink.
PersuasionProblem pc_problem(const Model& model);

}  // namespace persuade
