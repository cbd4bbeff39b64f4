#include "persuade/lottery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persuade/errors.hpp"

namespace persuade {
namespace {

constexpr double kMergeTol = 1e-14;

void check_belief(double b, const char* what) {
  if (!(b >= 0.0 && b <= 1.0)) {
    std::ostringstream os;
    os << what << " " << b << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace

PosteriorLottery PosteriorLottery::point(Belief prior) {
  check_belief(prior, "prior");
  PosteriorLottery l;
  l.prior_ = prior;
  l.atoms_.push_back({prior, 1.0});
  return l;
}

PosteriorLottery PosteriorLottery::split(Belief prior, Belief low, Belief high) {
  check_belief(prior, "prior");
  check_belief(low, "posterior");
  check_belief(high, "posterior");
  if (low > prior || high < prior) {
    std::ostringstream os;
    os << "split posteriors " << low << ", " << high << " do not bracket prior " << prior;
    throw DomainError(os.str());
  }
  if (high - low <= kMergeTol) return point(prior);
  double w_high = (prior - low) / (high - low);
  return from_atoms({{low, 1.0 - w_high}, {high, w_high}}, prior);
}

PosteriorLottery PosteriorLottery::from_atoms(std::vector<Atom> atoms, Belief prior) {
  check_belief(prior, "prior");
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
  if (atoms.empty()) throw DomainError("lottery has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    check_belief(a.posterior, "posterior");
    if (!(a.weight > 0.0)) throw DomainError("lottery weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "lottery weights sum to " << total;
    throw DomainError(os.str());
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.posterior < b.posterior; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.posterior - merged.back().posterior <= kMergeTol) {
      auto& m = merged.back();
      double w = m.weight + a.weight;
      m.posterior = (m.posterior * m.weight + a.posterior * a.weight) / w;
      m.weight = w;
    } else {
      merged.push_back(a);
    }
  }
  PosteriorLottery l;
  l.prior_ = prior;
  l.atoms_ = std::move(merged);
  if (std::abs(l.mean() - prior) > 1e-10) {
    std::ostringstream os;
    os << "lottery mean " << l.mean() << " differs from prior " << prior;
    throw DomainError(os.str());
  }
  return l;
}

PosteriorLottery PosteriorLottery::mixture(std::span<const PosteriorLottery> parts,
                                           std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw DomainError("mixture needs one weight per lottery");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DomainError("mixture weights must have positive sum");
  std::vector<Atom> atoms;
  double prior = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double w = weights[i] / total;
    prior += w * parts[i].prior();
    for (const auto& a : parts[i].atoms()) atoms.push_back({a.posterior, w * a.weight});
  }
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  for (auto& a : atoms) a.weight /= s;
  return from_atoms(std::move(atoms), std::clamp(prior, 0.0, 1.0));
}

double PosteriorLottery::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.posterior;
  return m;
}

}  // namespace persuade
