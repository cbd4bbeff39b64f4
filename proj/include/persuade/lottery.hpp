#pragma once

#include <span>
#include <vector>

namespace persuade {

// Probability in [0,1]. In the main model it is Pr[untreated prospect is
// p_high]; in the test-design variant it is Pr[healthy].
using Belief = double;

struct Atom {
  Belief posterior;
  double weight;
};

// Bayes-plausible distribution over posteriors: positive weights summing to
// one, atoms sorted and distinct, mean equal to the prior. Solver outputs
// carry at most three atoms; mixtures built by the policy reduction may
// carry more.
class PosteriorLottery {
 public:
  // No information: a single atom at the prior.
  static PosteriorLottery point(Belief prior);
  // Two posteriors low <= prior <= high with Bayes-plausible weights.
  // Degenerate endpoints collapse to a point.
  static PosteriorLottery split(Belief prior, Belief low, Belief high);
  // General constructor; zero-weight atoms are dropped, coincident
  // posteriors merged. Throws DomainError on invalid input.
  static PosteriorLottery from_atoms(std::vector<Atom> atoms, Belief prior);
  // Mixture of lotteries with the given weights (need not be normalized).
  static PosteriorLottery mixture(std::span<const PosteriorLottery> parts,
                                  std::span<const double> weights);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  Belief prior() const { return prior_; }
  Belief low() const { return atoms_.front().posterior; }
  Belief high() const { return atoms_.back().posterior; }
  double mean() const;

  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * f(a.posterior);
    return s;
  }

 private:
  PosteriorLottery() = default;
  std::vector<Atom> atoms_;
  Belief prior_ = 0.0;
};

}  // namespace persuade
