#include "persuade/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "persuade/errors.hpp"
#include "persuade/numeric.hpp"

namespace persuade::oracle {
namespace {

constexpr double kFeasTol = 1e-12;

struct Best {
  double value = -INFINITY;
  std::vector<Atom> atoms;
  std::size_t count = 0;

  void offer(double v, std::vector<Atom> a) {
    ++count;
    if (v > value) {
      value = v;
      atoms = std::move(a);
    }
  }
};

double slope_at(const Fn& f, double t, const std::vector<double>& kinks) {
  constexpr double h = 1e-6;
  bool backward = t + h > 1.0;
  bool forward = t - h < 0.0;
  for (double k : kinks) {
    if (std::abs(t - k) < 1e-4) {
      if (t <= k) {
        backward = true;
      } else {
        forward = true;
      }
    }
  }
  if (backward && !forward) return (f(t) - f(t - h)) / h;
  if (forward && !backward) return (f(t + h) - f(t)) / h;
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Ex ante atom or interim posterior drawn conditionally on the state.
std::size_t draw_atom(Rng& rng, std::span<const Atom> atoms, double prior, bool high) {
  if (atoms.size() == 1) return 0;
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double q = atoms[i].posterior;
    acc += high ? atoms[i].weight * q / prior : atoms[i].weight * (1.0 - q) / (1.0 - prior);
    if (u < acc) return i;
  }
  return atoms.size() - 1;
}

}  // namespace

OracleResult grid_signal_oracle(Belief prior, const SignalPayoffs& pay, std::size_t grid_n,
                                int max_atoms, const std::vector<double>& extra_points) {
  if (grid_n < 2) throw DomainError("oracle grid needs at least two points");
  if (max_atoms < 1 || max_atoms > 3) throw DomainError("oracle supports one to three atoms");
  auto grid = numeric::linspace(0.0, 1.0, grid_n);
  for (double x : extra_points) {
    if (x > 0.0 && x < 1.0) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid_n = grid.size();
  std::vector<double> S(grid_n), R(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    S[i] = pay.sender(grid[i]);
    R[i] = pay.receiver(grid[i]);
  }
  const double floor = pay.rhs - kFeasTol;
  Best best;

  if (pay.receiver(prior) >= floor) best.offer(pay.sender(prior), {{prior, 1.0}});

  // Grid points strictly below and strictly above the prior.
  const auto split = std::lower_bound(grid.begin(), grid.end(), prior) - grid.begin();
  std::size_t above = split;
  while (above < grid_n && grid[above] <= prior) ++above;
  const std::size_t below_end = split;  // indices [0, below_end) are < prior

  if (max_atoms >= 2) {
    for (std::size_t i = 0; i < below_end; ++i) {
      for (std::size_t j = above; j < grid_n; ++j) {
        const double wx = (prior - grid[i]) / (grid[j] - grid[i]);
        const double wy = 1.0 - wx;
        if (wy * R[i] + wx * R[j] < floor) continue;
        best.offer(wy * S[i] + wx * S[j], {{grid[i], wy}, {grid[j], wx}});
      }
    }
  }

  if (max_atoms >= 3) {
    // Supports a < b < c with a < prior < c. Starting from the {a, c}
    // split, shifting mass along (b - c, c - a, a - b) keeps the mean.
    for (std::size_t ia = 0; ia < below_end; ++ia) {
      for (std::size_t ic = above; ic < grid_n; ++ic) {
        const double a = grid[ia], c = grid[ic];
        const double wa0 = (c - prior) / (c - a);
        const double wc0 = 1.0 - wa0;
        const double S0 = wa0 * S[ia] + wc0 * S[ic];
        const double R0 = wa0 * R[ia] + wc0 * R[ic];
        for (std::size_t ib = ia + 1; ib < ic; ++ib) {
          const double b = grid[ib];
          const double da = b - c, db = c - a, dc = a - b;
          const double smax = std::min(wa0 / -da, wc0 / -dc);
          const double S1 = da * S[ia] + db * S[ib] + dc * S[ic];
          const double R1 = da * R[ia] + db * R[ib] + dc * R[ic];
          auto offer = [&](double s) {
            if (!(s > 0.0) || s > smax) return;
            if (R0 + s * R1 < floor) return;
            const double wa = wa0 + s * da, wb = s * db, wc = wc0 + s * dc;
            best.offer(S0 + s * S1, {{a, std::max(wa, 0.0)}, {b, wb}, {c, std::max(wc, 0.0)}});
          };
          offer(smax);
          if (R1 != 0.0) offer((pay.rhs - R0) / R1);
        }
      }
    }
  }

  OracleResult out;
  out.grid_n = grid_n;
  out.feasible_count = best.count;
  if (best.count > 0) {
    auto lottery = PosteriorLottery::from_atoms(best.atoms, prior);
    out.best_value = lottery.expect(pay.sender);
    out.best_signal = std::move(lottery);
  }
  return out;
}

SignalPayoffs interim_payoffs(const Model& m, Belief mu1) {
  return {[&m](double x) { return m.health_if_tested(x); }, [&m](double x) { return m.V(x); },
          m.Vbar(mu1)};
}

double lipschitz_bound(const ModelParams& p) {
  const double me = mu_e(p);
  return (1.0 - p.alpha) *
         ((p.p_high - p.p_low) + (p.p_bar - p.p_low) * (1.0 / me + 1.0 / (1.0 - me)));
}

MonteCarloResult monte_carlo_health(const TwoStagePolicy& policy, const Model& m,
                                    std::size_t n_draws, std::uint64_t seed) {
  if (n_draws == 0) throw DomainError("Monte Carlo needs at least one draw");
  if (policy.branches.empty()) throw DomainError("policy has no branches");
  std::vector<Atom> ex_ante;
  double total = 0.0, mean = 0.0;
  for (const auto& b : policy.branches) {
    if (std::abs(b.accept.prior() - b.belief) > 1e-10 ||
        std::abs(b.reject.prior() - b.belief) > 1e-10) {
      throw DomainError("interim lottery prior differs from its ex ante atom");
    }
    ex_ante.push_back({b.belief, b.weight});
    total += b.weight;
    mean += b.weight * b.belief;
  }
  if (std::abs(total - 1.0) > 1e-12 || std::abs(mean - policy.prior) > 1e-10) {
    throw DomainError("ex ante branches are not Bayes plausible");
  }

  std::vector<char> tests;
  for (const auto& b : policy.branches) {
    const double acc = b.accept.expect([&](double x) { return m.V(x); });
    const double rej = b.reject.expect([&](double x) { return m.V0(x); });
    tests.push_back(acc >= rej - 1e-9);
  }

  const auto& p = m.params;
  Rng rng(seed);
  double sum = 0.0;
  for (std::size_t n = 0; n < n_draws; ++n) {
    const bool high = rng.bernoulli(policy.prior);
    const auto& br = policy.branches[draw_atom(rng, ex_ante, policy.prior, high)];
    const double untreated = high ? p.p_high : p.p_low;
    double chance;
    if (rng.bernoulli(p.alpha)) {
      chance = 1.0;
    } else if (tests[&br - policy.branches.data()]) {
      const auto atoms = br.accept.atoms();
      const double mu2 = atoms[draw_atom(rng, atoms, br.belief, high)].posterior;
      chance = mu2 <= m.mu_e() ? p.p_bar : untreated;
    } else {
      chance = untreated;
    }
    sum += rng.bernoulli(chance) ? 1.0 : 0.0;
  }
  MonteCarloResult out;
  out.draws = n_draws;
  out.estimate = sum / static_cast<double>(n_draws);
  out.std_error = std::sqrt(std::max(out.estimate * (1.0 - out.estimate), 0.0) /
                            static_cast<double>(n_draws));
  return out;
}

std::optional<double> binding_lower_belief(double x, const CriterionProblem& cp) {
  const double top = std::min(cp.prior, cp.kink);
  auto gap = [&](double y) {
    const double wx = (cp.prior - y) / (x - y);
    return (1.0 - wx) * cp.V(y) + wx * cp.V(x) - cp.rhs;
  };
  // Scan downward for the first sign change, then bisect inside that cell.
  constexpr int kCells = 2000;
  double hi = top;
  double g_hi = gap(hi);
  if (std::abs(g_hi) <= 1e-13) return hi;
  for (int k = kCells - 1; k >= 0; --k) {
    const double lo = top * k / kCells;
    const double g_lo = gap(lo);
    if (std::abs(g_lo) <= 1e-13) return lo;
    if ((g_lo < 0.0) != (g_hi < 0.0)) return numeric::bisect(gap, lo, hi, 1e-15);
    hi = lo;
    g_hi = g_lo;
  }
  return std::nullopt;
}

CriterionResult best_good_news_criterion(double x, const CriterionProblem& cp) {
  CriterionResult r;
  auto d = binding_lower_belief(x, cp);
  if (!d || !(x > *d)) return r;
  r.defined = true;
  r.d = *d;
  const double SP = (cp.P(x) - cp.P(*d)) / (x - *d);
  const double SV = (cp.V(x) - cp.V(*d)) / (x - *d);
  const double dPx = slope_at(cp.P, x, cp.kinks);
  const double dPd = slope_at(cp.P, *d, cp.kinks);
  const double dVx = slope_at(cp.V, x, cp.kinks);
  const double dVd = slope_at(cp.V, *d, cp.kinks);
  r.lhs = SP - dPx;
  r.rhs = (SV - dVx) / (SV - dVd) * (SP - dPd);
  r.holds = r.lhs <= r.rhs + 1e-9 * std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
  return r;
}

std::optional<double> x_star_search(double lo, double hi,
                                    const std::function<bool(double)>& feasible, double tol) {
  if (!feasible(lo)) return std::nullopt;
  if (feasible(hi)) return hi;
  return numeric::last_true(feasible, lo, hi, tol);
}

AnticipationCurve random_phi(Rng& rng, PhiKind kind) {
  switch (kind) {
    case PhiKind::Linear:
      return AnticipationCurve::linear();
    case PhiKind::Concave: {
      switch (rng.index(3)) {
        case 0:
          return AnticipationCurve::linear();
        case 1:
          return AnticipationCurve::power(rng.uniform(0.3, 0.95));
        default:
          return AnticipationCurve::exponential(rng.uniform(0.5, 4.0));
      }
    }
    case PhiKind::InverseS:
      return AnticipationCurve::inverse_s(rng.uniform(0.3, 0.8), rng.uniform(0.5, 0.95),
                                          rng.uniform(2.0, 3.0));
  }
  return AnticipationCurve::linear();
}

Instance random_instance(Rng& rng, PhiKind kind) {
  ModelParams p;
  p.alpha = rng.uniform(0.05, 0.95);
  p.p_low = rng.uniform(0.0, 0.5);
  p.p_high = rng.uniform(p.p_low + 0.1, 0.9);
  p.p_bar = rng.uniform(p.p_high + 0.05, 1.0);
  const double me = rng.uniform(0.1, 0.9);
  p.c = p.p_bar - (me * p.p_high + (1.0 - me) * p.p_low);
  p.mu0 = rng.uniform(0.05, 0.95);
  return {p, random_phi(rng, kind)};
}

double Piecewise::operator()(double x) const {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const std::size_t j = it - xs.begin();
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double Piecewise::lipschitz() const {
  double L = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    L = std::max(L, std::abs(ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
  }
  return L;
}

Piecewise random_piecewise(Rng& rng, std::size_t pieces) {
  Piecewise f;
  f.xs.push_back(0.0);
  for (std::size_t i = 1; i < pieces; ++i) f.xs.push_back(rng.uniform(0.02, 0.98));
  f.xs.push_back(1.0);
  std::sort(f.xs.begin(), f.xs.end());
  f.xs.erase(std::unique(f.xs.begin(), f.xs.end(),
                         [](double a, double b) { return b - a < 1e-3; }),
             f.xs.end());
  if (f.xs.back() != 1.0) f.xs.back() = 1.0;
  for (std::size_t i = 0; i < f.xs.size(); ++i) f.ys.push_back(rng.uniform(-1.0, 1.0));
  return f;
}

}  // namespace persuade::oracle
