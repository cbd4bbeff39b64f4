#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "persuade/curve.hpp"
#include "persuade/exante.hpp"
#include "persuade/model.hpp"

// Brute-force and simulation checks that share no code path with the
// solvers beyond the payoff primitives.
namespace persuade::oracle {

using Fn = std::function<double(double)>;

// Seedable generator with a fixed uniform mapping, so draws agree across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }

 private:
  std::mt19937_64 engine_;
};

// Sender objective, receiver payoff and the receiver's reservation value.
struct SignalPayoffs {
  Fn sender;
  Fn receiver;
  double rhs = 0.0;
};

struct OracleResult {
  std::optional<double> best_value;
  std::optional<PosteriorLottery> best_signal;
  std::size_t feasible_count = 0;
  std::size_t grid_n = 0;
};

// Enumerates Bayes-plausible lotteries with atoms on a uniform grid (plus
// the no-information point) and at most max_atoms atoms, keeps those with
// E receiver >= rhs - 1e-12 and returns the sender-best one. For three
// atoms the sender and receiver values are linear along the one-dimensional
// family of lotteries on a fixed support, so only the ends of the family
// and the point where the constraint binds are examined. extra_points are
// merged into the grid (jump locations of the sender payoff, say).
OracleResult grid_signal_oracle(Belief prior, const SignalPayoffs& payoffs, std::size_t grid_n,
                                int max_atoms, const std::vector<double>& extra_points = {});

// Main-model payoffs for the oracle at interim belief mu1: health after a
// test as the sender payoff, V as receiver payoff, V-bar as reservation.
SignalPayoffs interim_payoffs(const Model& m, Belief mu1);

// Lipschitz bound on mu -> alpha + (1 - alpha) P(mu) over the feasible
// binary signals; used to size the grid tolerance of the oracle.
double lipschitz_bound(const ModelParams& p);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

// Simulates the extensive form: state, ex ante message, test decision,
// health status, interim message, treatment and the health outcome.
MonteCarloResult monte_carlo_health(const TwoStagePolicy& policy, const Model& m,
                                    std::size_t n_draws, std::uint64_t seed);

// Ingredients of the best-good-news criterion for a binary signal {y, x}
// with y below and x above min/max(prior, kink).
struct CriterionProblem {
  Fn P;
  Fn V;
  double prior = 0.5;
  double rhs = 0.0;
  double kink = 0.5;
  std::vector<double> kinks;  // points where one-sided differences are used
};

struct CriterionResult {
  bool defined = false;  // false when no lower belief makes the constraint bind
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double d = 0.0;
};

// Largest y in [0, min(prior, kink)] at which {y, x} makes the constraint
// bind exactly. Sender payoff is assumed flat on that interval, so the
// largest binding y is also the sender-best one.
std::optional<double> binding_lower_belief(double x, const CriterionProblem& cp);
CriterionResult best_good_news_criterion(double x, const CriterionProblem& cp);

// Largest x in [lo, hi] with feasible(x), assuming feasibility holds at lo
// and fails at most once on the way up. nullopt if lo is infeasible.
std::optional<double> x_star_search(double lo, double hi,
                                    const std::function<bool(double)>& feasible,
                                    double tol = 1e-12);

enum class PhiKind { Linear, Concave, InverseS };

struct Instance {
  ModelParams params;
  AnticipationCurve phi;
};

// alpha in [.05,.95], p_low in [0,.5], p_high in [p_low+.1,.9],
// p_bar in [p_high+.05,1], c set so that mu_e lands in [.1,.9] and mu0 in
// [.05,.95]. Concave draws pick linear, power or exponential uniformly.
Instance random_instance(Rng& rng, PhiKind kind);
AnticipationCurve random_phi(Rng& rng, PhiKind kind);

// Piecewise-linear function through random knots on [0,1].
struct Piecewise {
  std::vector<double> xs;
  std::vector<double> ys;
  double operator()(double x) const;
  double lipschitz() const;
};
Piecewise random_piecewise(Rng& rng, std::size_t pieces);

}  // namespace persuade::oracle
