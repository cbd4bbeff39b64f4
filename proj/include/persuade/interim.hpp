#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "persuade/envelope.hpp"
#include "persuade/model.hpp"
#include "persuade/types.hpp"

namespace persuade {

using Fn = std::function<double(double)>;

// One-constraint persuasion problem shared by the interim stage and the ex
// ante participation variant. The doctor's payoff jumps down above `kink`;
// the patient accepts iff E[patient] >= outside(prior).
struct PersuasionProblem {
  Fn patient;
  Fn outside;
  double kink = 0.5;
  // patient is constant on [0, kink] and concave on [kink, 1]; enables the
  // closed-form lower belief and the tangency construction.
  bool flat_below_kink = true;
  Fn patient_derivative;
  // Test hook: shifts the perfect-good-news lower atom.
  double l_offset = 0.0;
};

struct KernelSolution {
  InterimRegion region = InterimRegion::OutsideM;
  PosteriorLottery signal = PosteriorLottery::point(0.0);
  double patient_value = 0.0;
  double slack = 0.0;
};

class PersuasionKernel {
 public:
  explicit PersuasionKernel(PersuasionProblem problem);

  KernelSolution solve(Belief prior) const;

  // Touch point of the upper tangent from (0, U(0)) to U on [kink, 1].
  double tangency() const { return tangency_; }
  // Patient value of {kink, 1} (no information below the kink).
  double guiding_value(Belief mu) const;
  double full_disclosure_value(Belief mu) const;
  // Concave envelope of U, reached by {0, tangency}.
  double rewarding_value(Belief mu) const;
  // Lower atom of the binding perfect-good-news signal {l, 1}.
  double lower_belief(Belief mu) const;
  // Upper atom of the binding perfect-bad-news signal {0, h}.
  double upper_belief(Belief mu) const;
  const PersuasionProblem& problem() const { return problem_; }

 private:
  KernelSolution solve_generic(Belief prior) const;
  KernelSolution finish(InterimRegion region, PosteriorLottery signal, Belief prior) const;

  PersuasionProblem problem_;
  double tangency_ = 1.0;
};

enum class InterimVariant {
  Conditional,    // punitive revelation after refusal, concave phi
  Unconditional,  // one signal whatever the test decision
  General,        // any increasing phi, via the local concavification
};

struct InterimOptions {
  std::size_t grid_n = 2001;
  double l_offset = 0.0;
};

class InterimSolver {
 public:
  explicit InterimSolver(const Model& model, InterimVariant variant = InterimVariant::Conditional,
                         InterimOptions opt = {});

  InterimSolution solve(Belief mu1) const;
  double P_star(Belief mu1) const { return solve(mu1).doctor_value; }

  const Thresholds& thresholds() const { return state_->thresholds; }
  const PersuasionKernel& kernel() const { return *state_->kernel; }
  const Model& model() const { return state_->model; }
  InterimVariant variant() const { return state_->variant; }

  // Patient payoff used by the constraint (V, V - V0 or the local
  // concavification of V) and the value of refusing at mu1.
  double patient_payoff(Belief mu) const;
  double outside_option(Belief mu1) const;
  // Signal sent after a refusal.
  PosteriorLottery reject_signal(Belief mu1) const;

 private:
  struct State {
    Model model;
    InterimVariant variant;
    InterimOptions opt;
    std::unique_ptr<envelope::LocalConcavification> vhat;
    std::unique_ptr<envelope::EnvelopeResult> minorant;
    std::unique_ptr<PersuasionKernel> kernel;
    Thresholds thresholds;
    State(const Model& m, InterimVariant v, InterimOptions o) : model(m), variant(v), opt(o) {}
  };
  std::shared_ptr<const State> state_;
};

// Signal thresholds of a kernel: the F, D and M sets as intervals.
Thresholds region_sets(const PersuasionKernel& kernel, double kink);

double mu_v(const ModelParams& params, const AnticipationCurve& phi);
Thresholds region_sets(const ModelParams& params, const AnticipationCurve& phi);
PosteriorLottery guiding_future_signal(Belief mu1, double mu_e);
PosteriorLottery rewarding_past_signal(Belief mu1, double mu_v);
InterimSolution optimal_interim(Belief mu1, const ModelParams& params,
                                const AnticipationCurve& phi);
InterimSolution optimal_interim_unconditional(Belief mu1, const ModelParams& params,
                                              const AnticipationCurve& phi);
InterimSolution optimal_interim_general(Belief mu1, const ModelParams& params,
                                        const AnticipationCurve& phi);
double P_star(Belief mu1, const ModelParams& params, const AnticipationCurve& phi);

struct MonotonicityViolation {
  Belief a;
  Belief b;
  double value_a;
  double value_b;
  const char* what;
};

struct MonotonicityReport {
  bool ok = true;
  std::size_t checked = 0;
  std::vector<MonotonicityViolation> violations;
};

// l must not increase across InDNotF beliefs, nor h across InMNotD beliefs.
MonotonicityReport interim_monotonicity_check(const InterimSolver& solver,
                                              const std::vector<Belief>& grid,
                                              double tol = 1e-10);

}  // namespace persuade
