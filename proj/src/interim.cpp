#include "persuade/interim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "persuade/errors.hpp"
#include "persuade/numeric.hpp"

namespace persuade {
namespace {

// Constraint values within this margin count as satisfied, which sends
// exact-threshold beliefs to the lower-information region.
constexpr double kFeasTol = 1e-11;

}  // namespace

PersuasionKernel::PersuasionKernel(PersuasionProblem problem) : problem_(std::move(problem)) {
  const auto& p = problem_;
  if (!(p.kink > 0.0 && p.kink < 1.0)) throw DomainError("kernel kink must lie in (0, 1)");
  if (p.flat_below_kink) {
    auto t = envelope::tangent_from_point(p.patient, 0.0, p.patient(0.0), p.kink, 1.0,
                                          envelope::SlopeDirection::Maximize, true,
                                          p.patient_derivative);
    tangency_ = t.touch_point;
  }
}

double PersuasionKernel::guiding_value(Belief mu) const {
  const auto& p = problem_;
  if (mu <= p.kink) return p.patient(mu);
  double w_high = (mu - p.kink) / (1.0 - p.kink);
  return (1.0 - w_high) * p.patient(p.kink) + w_high * p.patient(1.0);
}

double PersuasionKernel::full_disclosure_value(Belief mu) const {
  return (1.0 - mu) * problem_.patient(0.0) + mu * problem_.patient(1.0);
}

double PersuasionKernel::rewarding_value(Belief mu) const {
  const auto& U = problem_.patient;
  if (mu >= tangency_) return U(mu);
  double w = mu / tangency_;
  return (1.0 - w) * U(0.0) + w * U(tangency_);
}

double PersuasionKernel::lower_belief(Belief mu) const {
  const auto& U = problem_.patient;
  double denom = U(1.0) - problem_.outside(mu);
  if (!(denom > 0.0)) {
    throw InconsistencyError("perfect-good-news signal has no binding lower belief");
  }
  double l = 1.0 - (1.0 - mu) * (U(1.0) - U(0.0)) / denom;
  return std::clamp(l, 0.0, std::min(mu, problem_.kink));
}

double PersuasionKernel::upper_belief(Belief mu) const {
  const auto& U = problem_.patient;
  const double rhs = problem_.outside(mu);
  const double u0 = U(0.0);
  auto gap = [&](double h) { return (1.0 - mu / h) * u0 + (mu / h) * U(h) - rhs; };
  double lo = std::max(tangency_, mu);
  if (lo <= 0.0) return 0.0;
  double g_lo = gap(lo);
  if (g_lo < 0.0) {
    if (g_lo > -1e-9) return lo;
    std::ostringstream os;
    os << "perfect-bad-news signal infeasible at prior " << mu << " (gap " << g_lo << ")";
    throw InconsistencyError(os.str());
  }
  if (gap(1.0) >= 0.0) return 1.0;
  auto root = numeric::bisect(gap, lo, 1.0, 1e-15);
  if (!root) throw InconsistencyError("perfect-bad-news upper belief not bracketed");
  return *root;
}

KernelSolution PersuasionKernel::finish(InterimRegion region, PosteriorLottery signal,
                                        Belief prior) const {
  KernelSolution s;
  s.region = region;
  s.patient_value = signal.expect(problem_.patient);
  s.slack = s.patient_value - problem_.outside(prior);
  s.signal = std::move(signal);
  return s;
}

KernelSolution PersuasionKernel::solve(Belief mu) const {
  if (!problem_.flat_below_kink) return solve_generic(mu);
  const auto& p = problem_;
  const double rhs = p.outside(mu);
  if (guiding_value(mu) >= rhs - kFeasTol) {
    auto sig = mu <= p.kink ? PosteriorLottery::point(mu) : PosteriorLottery::split(mu, p.kink, 1.0);
    return finish(InterimRegion::InF, std::move(sig), mu);
  }
  if (full_disclosure_value(mu) >= rhs - kFeasTol) {
    double l = std::clamp(lower_belief(mu) + p.l_offset, 0.0, mu);
    return finish(InterimRegion::InDNotF, PosteriorLottery::split(mu, l, 1.0), mu);
  }
  if (rewarding_value(mu) >= rhs - kFeasTol) {
    double h = upper_belief(mu);
    return finish(InterimRegion::InMNotD, PosteriorLottery::split(mu, 0.0, h), mu);
  }
  return finish(InterimRegion::OutsideM, PosteriorLottery::point(mu), mu);
}

KernelSolution PersuasionKernel::solve_generic(Belief mu) const {
  const auto& p = problem_;
  const auto& U = p.patient;
  const double rhs = p.outside(mu);
  if (mu <= p.kink) {
    if (U(mu) >= rhs - kFeasTol) return finish(InterimRegion::InF, PosteriorLottery::point(mu), mu);
  } else if (guiding_value(mu) >= rhs - kFeasTol) {
    return finish(InterimRegion::InF, PosteriorLottery::split(mu, p.kink, 1.0), mu);
  }
  const double ymax = std::min(mu, p.kink);
  const double xmin = std::max(mu, p.kink);
  if (ymax <= 0.0 || xmin >= 1.0) return finish(InterimRegion::OutsideM, PosteriorLottery::point(mu), mu);

  auto chord = [&](double y, double x) {
    if (x - y <= 1e-15) return U(mu);
    return ((x - mu) * U(y) + (mu - y) * U(x)) / (x - y);
  };
  // Best patient value over lower atoms for a given upper atom.
  auto best_over_y = [&](double x) {
    auto ys = numeric::linspace(0.0, ymax, 201);
    std::size_t k = 0;
    double best = chord(ys[0], x);
    for (std::size_t i = 1; i < ys.size(); ++i) {
      double v = chord(ys[i], x);
      if (v > best) {
        best = v;
        k = i;
      }
    }
    double a = ys[k == 0 ? 0 : k - 1];
    double b = ys[std::min(k + 1, ys.size() - 1)];
    auto g = numeric::golden_max([&](double y) { return chord(y, x); }, a, b, 1e-14);
    return std::max(best, g.value);
  };
  auto feasible_x = [&](double x) { return best_over_y(x) >= rhs - kFeasTol; };

  auto xs = numeric::linspace(xmin, 1.0, 401);
  std::size_t top = xs.size();
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (feasible_x(xs[i])) {
      top = i;
      break;
    }
  }
  if (top == xs.size()) return finish(InterimRegion::OutsideM, PosteriorLottery::point(mu), mu);
  double x = top + 1 == xs.size() ? 1.0 : numeric::last_true(feasible_x, xs[top], xs[top + 1]);

  auto feasible_y = [&](double y) { return chord(y, x) >= rhs - kFeasTol; };
  auto ys = numeric::linspace(0.0, ymax, 401);
  std::size_t ytop = ys.size();
  for (std::size_t i = ys.size(); i-- > 0;) {
    if (feasible_y(ys[i])) {
      ytop = i;
      break;
    }
  }
  if (ytop == ys.size()) {
    // The best lower atom found by refinement lies between grid points.
    auto g = numeric::golden_max([&](double y) { return chord(y, x); }, 0.0, ymax, 1e-14);
    ytop = 0;
    ys[0] = g.x;
  }
  double y = ytop + 1 == ys.size() ? ymax : numeric::last_true(feasible_y, ys[ytop], ys[ytop + 1]);
  auto region = x >= 1.0 ? InterimRegion::InDNotF : InterimRegion::InMNotD;
  return finish(region, PosteriorLottery::split(mu, y, x), mu);
}

Thresholds region_sets(const PersuasionKernel& kernel, double kink) {
  const auto& p = kernel.problem();
  Thresholds t;
  t.mu_e = kink;
  t.mu_v = kernel.tangency();
  t.mu_v_degenerate = p.patient(1.0) - p.patient(0.0) < 1e-12;
  t.reacts_to_fear = p.patient(0.0) >= p.outside(0.0);

  auto crossing = [&](const Fn& value) -> double {
    auto gap = [&](double mu) { return value(mu) - p.outside(mu); };
    if (gap(1.0) >= -1e-14) return 1.0;
    auto r = numeric::bisect(gap, 0.0, 1.0);
    if (!r) throw InconsistencyError("threshold crossing not bracketed");
    return *r;
  };
  auto G = [&](double mu) { return kernel.guiding_value(mu); };
  auto D = [&](double mu) { return kernel.full_disclosure_value(mu); };
  auto R = [&](double mu) { return kernel.rewarding_value(mu); };

  if (t.reacts_to_fear) {
    t.mu_F = crossing(G);
    t.mu_D = crossing(D);
    t.mu_M_low = 0.0;
    t.mu_M_high = crossing(R);
  } else {
    auto gap = [&](double mu) { return R(mu) - p.outside(mu); };
    auto peak = numeric::golden_max(gap, 0.0, 1.0, 1e-14);
    if (gap(1.0) > peak.value) peak = {1.0, gap(1.0)};
    if (peak.value >= 0.0) {
      t.mu_M_low = numeric::bisect(gap, 0.0, peak.x);
      t.mu_M_high = gap(1.0) >= 0.0 ? 1.0 : *numeric::bisect(gap, peak.x, 1.0);
    }
  }
  return t;
}

InterimSolver::InterimSolver(const Model& model, InterimVariant variant, InterimOptions opt) {
  auto st = std::make_shared<State>(model, variant, opt);
  const State* s = st.get();
  const Model& m = st->model;
  PersuasionProblem prob;
  prob.kink = m.mu_e();
  prob.l_offset = opt.l_offset;
  switch (variant) {
    case InterimVariant::Conditional:
      if (!m.phi.is_concave()) {
        throw ConfigError("phi: the conditional interim solver needs a concave distortion");
      }
      prob.patient = [s](double mu) { return s->model.V(mu); };
      prob.patient_derivative = [s](double mu) { return s->model.dV(mu); };
      prob.outside = [s](double mu) { return s->model.Vbar(mu); };
      break;
    case InterimVariant::Unconditional:
      if (!m.phi.is_concave()) {
        throw ConfigError("phi: the unconditional interim solver needs a concave distortion");
      }
      prob.patient = [s](double mu) { return s->model.V(mu) - s->model.V0(mu); };
      prob.outside = [](double) { return 0.0; };
      prob.flat_below_kink = false;
      break;
    case InterimVariant::General: {
      st->vhat = std::make_unique<envelope::LocalConcavification>(
          [s](double mu) { return s->model.V(mu); }, m.mu_e(), opt.grid_n);
      envelope::EnvelopeOptions eo;
      eo.grid_n = opt.grid_n;
      st->minorant = std::make_unique<envelope::EnvelopeResult>(envelope::convex_minorant(
          [s](double mu) { return s->model.V0(mu); }, 0.0, 1.0, eo));
      prob.patient = [s](double mu) { return (*s->vhat)(mu); };
      prob.outside = [s](double mu) { return (*s->minorant)(mu); };
      break;
    }
  }
  st->kernel = std::make_unique<PersuasionKernel>(std::move(prob));
  if (variant == InterimVariant::Unconditional) {
    st->thresholds.mu_e = m.mu_e();
    st->thresholds.reacts_to_fear = m.reacts_to_fear();
  } else {
    st->thresholds = region_sets(*st->kernel, m.mu_e());
  }
  state_ = std::move(st);
}

double InterimSolver::patient_payoff(Belief mu) const { return kernel().problem().patient(mu); }

double InterimSolver::outside_option(Belief mu1) const {
  return reject_signal(mu1).expect([&](double x) { return model().V0(x); });
}

PosteriorLottery InterimSolver::reject_signal(Belief mu1) const {
  switch (state_->variant) {
    case InterimVariant::Conditional:
      return PosteriorLottery::split(mu1, 0.0, 1.0);
    case InterimVariant::Unconditional:
      return kernel().solve(mu1).signal;
    case InterimVariant::General: {
      auto seg = state_->minorant->segment_containing(mu1);
      if (!seg) return PosteriorLottery::point(mu1);
      return PosteriorLottery::split(mu1, seg->left, seg->right);
    }
  }
  return PosteriorLottery::point(mu1);
}

InterimSolution InterimSolver::solve(Belief mu1) const {
  if (!(mu1 >= 0.0 && mu1 <= 1.0)) {
    std::ostringstream os;
    os << "interim belief " << mu1 << " outside [0,1]";
    throw DomainError(os.str());
  }
  const Model& m = model();
  KernelSolution ks = kernel().solve(mu1);
  InterimSolution out;
  out.prior = mu1;
  out.region = ks.region;
  out.accept_signal = ks.signal;
  out.reject_signal =
      state_->variant == InterimVariant::Unconditional ? ks.signal : reject_signal(mu1);

  if (state_->variant == InterimVariant::General && ks.region != InterimRegion::OutsideM) {
    // Replace a lifted upper atom by the endpoints of its contact segment.
    const double x = ks.signal.high();
    if ((*state_->vhat)(x) > m.V(x) + 1e-8) {
      auto seg = state_->vhat->lifted_segment(x);
      if (!seg) throw InconsistencyError("lifted atom without a contact segment");
      const double rho = (x - seg->left) / (seg->right - seg->left);
      std::vector<Atom> atoms;
      for (const auto& a : ks.signal.atoms()) {
        if (a.posterior == x) {
          atoms.push_back({seg->left, a.weight * (1.0 - rho)});
          atoms.push_back({seg->right, a.weight * rho});
        } else {
          atoms.push_back(a);
        }
      }
      out.accept_signal = PosteriorLottery::from_atoms(std::move(atoms), mu1);
    }
  }

  const double accept = out.accept_signal.expect([&](double x) { return m.V(x); });
  const double reject = out.reject_signal.expect([&](double x) { return m.V0(x); });
  out.tests = ks.region != InterimRegion::OutsideM;
  out.pc_slack = accept - reject;
  out.patient_value = out.tests ? accept : std::max(accept, reject);
  out.doctor_value = out.tests
                         ? out.accept_signal.expect([&](double x) { return m.health_if_tested(x); })
                         : m.health_if_skipped(mu1);
  return out;
}

double mu_v(const ModelParams& params, const AnticipationCurve& phi) {
  return InterimSolver(Model(params, phi)).thresholds().mu_v.value();
}

Thresholds region_sets(const ModelParams& params, const AnticipationCurve& phi) {
  return InterimSolver(Model(params, phi)).thresholds();
}

PosteriorLottery guiding_future_signal(Belief mu1, double mu_e) {
  return mu1 <= mu_e ? PosteriorLottery::point(mu1) : PosteriorLottery::split(mu1, mu_e, 1.0);
}

PosteriorLottery rewarding_past_signal(Belief mu1, double mu_v) {
  return mu1 >= mu_v ? PosteriorLottery::point(mu1) : PosteriorLottery::split(mu1, 0.0, mu_v);
}

InterimSolution optimal_interim(Belief mu1, const ModelParams& params,
                                const AnticipationCurve& phi) {
  return InterimSolver(Model(params, phi)).solve(mu1);
}

InterimSolution optimal_interim_unconditional(Belief mu1, const ModelParams& params,
                                              const AnticipationCurve& phi) {
  return InterimSolver(Model(params, phi), InterimVariant::Unconditional).solve(mu1);
}

InterimSolution optimal_interim_general(Belief mu1, const ModelParams& params,
                                        const AnticipationCurve& phi) {
  return InterimSolver(Model(params, phi), InterimVariant::General).solve(mu1);
}

double P_star(Belief mu1, const ModelParams& params, const AnticipationCurve& phi) {
  return optimal_interim(mu1, params, phi).doctor_value;
}

MonotonicityReport interim_monotonicity_check(const InterimSolver& solver,
                                              const std::vector<Belief>& grid, double tol) {
  MonotonicityReport rep;
  struct Prev {
    bool set = false;
    double mu = 0.0;
    double value = 0.0;
  };
  Prev l_prev;
  Prev h_prev;
  auto sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  for (double mu : sorted) {
    auto s = solver.solve(mu);
    Prev* prev = nullptr;
    double value = 0.0;
    const char* what = "";
    if (s.region == InterimRegion::InDNotF) {
      prev = &l_prev;
      value = s.accept_signal.low();
      what = "lower belief increased";
    } else if (s.region == InterimRegion::InMNotD) {
      prev = &h_prev;
      value = s.accept_signal.high();
      what = "upper belief increased";
    } else {
      continue;
    }
    ++rep.checked;
    if (prev->set && value > prev->value + tol) {
      rep.ok = false;
      rep.violations.push_back({prev->mu, mu, prev->value, value, what});
    }
    *prev = {true, mu, value};
  }
  return rep;
}

}  // namespace persuade
