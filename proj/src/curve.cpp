#include "persuade/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "persuade/errors.hpp"

namespace persuade {
namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

void check_tabulated(const AnticipationCurve::Tabulated& t) {
  const auto& k = t.knots;
  if (k.size() < 2) throw ConfigError("phi.knots: at least two knots are required");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i].first) || !std::isfinite(k[i].second)) {
      std::ostringstream os;
      os << "phi.knots[" << i << "]: coordinates must be finite";
      throw ConfigError(os.str());
    }
    if (i > 0 && (k[i].first <= k[i - 1].first || k[i].second <= k[i - 1].second)) {
      std::ostringstream os;
      os << "phi.knots[" << i << "]: knots must be strictly increasing in both coordinates";
      throw ConfigError(os.str());
    }
  }
  if (k.front().first != 0.0 || k.front().second != 0.0) {
    throw ConfigError("phi.knots[0]: first knot must be (0, 0)");
  }
  if (k.back().first != 1.0 || k.back().second != 1.0) {
    std::ostringstream os;
    os << "phi.knots[" << k.size() - 1 << "]: last knot must be (1, 1)";
    throw ConfigError(os.str());
  }
}

bool tabulated_concave(const AnticipationCurve::Tabulated& t) {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.knots.size(); ++i) {
    double s = (t.knots[i].second - t.knots[i - 1].second) /
               (t.knots[i].first - t.knots[i - 1].first);
    if (s > prev * (1.0 + 1e-12)) return false;
    prev = s;
  }
  return true;
}

double inverse_s_core(const AnticipationCurve::InverseS& s, double v) {
  const double k = s.kink;
  if (v <= k) return k * (1.0 - std::pow(1.0 - v / k, s.exponent));
  return k + (1.0 - k) * std::pow((v - k) / (1.0 - k), s.exponent);
}

double inverse_s_core_derivative(const AnticipationCurve::InverseS& s, double v) {
  const double k = s.kink;
  if (v <= k) return s.exponent * std::pow(1.0 - v / k, s.exponent - 1.0);
  return s.exponent * std::pow((v - k) / (1.0 - k), s.exponent - 1.0);
}

}  // namespace

AnticipationCurve::AnticipationCurve(Family family) : family_(std::move(family)) {
  std::visit(Overload{
                 [&](const Linear&) { concave_ = true; },
                 [&](const Power& p) {
                   if (!(p.gamma > 0.0 && p.gamma <= 1.0)) {
                     throw ConfigError("phi.gamma: must lie in (0, 1]");
                   }
                   concave_ = true;
                 },
                 [&](const Exponential& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
                     throw ConfigError("phi.rate: must be positive and finite");
                   }
                   concave_ = true;
                 },
                 [&](const InverseS& s) {
                   if (!(s.kink > 0.0 && s.kink < 1.0)) {
                     throw ConfigError("phi.kink: must lie in (0, 1)");
                   }
                   if (!(s.strength > 0.0 && s.strength < 1.0)) {
                     throw ConfigError("phi.strength: must lie in (0, 1)");
                   }
                   if (!(s.exponent > 1.0) || !std::isfinite(s.exponent)) {
                     throw ConfigError("phi.exponent: must exceed 1");
                   }
                   concave_ = false;
                 },
                 [&](const Tabulated& t) {
                   check_tabulated(t);
                   concave_ = tabulated_concave(t);
                 },
             },
             family_);
}

double AnticipationCurve::operator()(double v) const {
  if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "phi evaluated outside [0,1] at " << v;
    throw DomainError(os.str());
  }
  v = std::clamp(v, 0.0, 1.0);
  return std::visit(Overload{
                        [&](const Linear&) { return v; },
                        [&](const Power& p) { return std::pow(v, p.gamma); },
                        [&](const Exponential& e) {
                          return std::expm1(-e.rate * v) / std::expm1(-e.rate);
                        },
                        [&](const InverseS& s) {
                          return (1.0 - s.strength) * v + s.strength * inverse_s_core(s, v);
                        },
                        [&](const Tabulated& t) {
                          const auto& k = t.knots;
                          std::size_t i = 1;
                          while (i + 1 < k.size() && v > k[i].first) ++i;
                          double w = (v - k[i - 1].first) / (k[i].first - k[i - 1].first);
                          return k[i - 1].second + w * (k[i].second - k[i - 1].second);
                        },
                    },
                    family_);
}

double AnticipationCurve::derivative(double v) const {
  v = std::clamp(v, 0.0, 1.0);
  return std::visit(Overload{
                        [&](const Linear&) { return 1.0; },
                        [&](const Power& p) {
                          if (v == 0.0 && p.gamma < 1.0) {
                            return std::numeric_limits<double>::infinity();
                          }
                          return p.gamma * std::pow(v, p.gamma - 1.0);
                        },
                        [&](const Exponential& e) {
                          return -e.rate * std::exp(-e.rate * v) / std::expm1(-e.rate);
                        },
                        [&](const InverseS& s) {
                          return (1.0 - s.strength) + s.strength * inverse_s_core_derivative(s, v);
                        },
                        [&](const Tabulated& t) {
                          const auto& k = t.knots;
                          std::size_t i = 1;
                          while (i + 1 < k.size() && v >= k[i].first) ++i;
                          return (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
                        },
                    },
                    family_);
}

double AnticipationCurve::inverse(double w) const {
  if (!(w >= 0.0 && w <= 1.0)) {
    std::ostringstream os;
    os << "phi inverse requested outside [0,1] at " << w;
    throw DomainError(os.str());
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double m = 0.5 * (lo + hi);
    if ((*this)(m) < w) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return std::abs((*this)(lo) - w) <= std::abs((*this)(hi) - w) ? lo : hi;
}

bool AnticipationCurve::is_linear() const {
  if (std::holds_alternative<Linear>(family_)) return true;
  if (const auto* p = std::get_if<Power>(&family_)) return p->gamma == 1.0;
  return false;
}

std::string AnticipationCurve::family_name() const {
  return std::visit(Overload{
                        [](const Linear&) { return std::string("linear"); },
                        [](const Power&) { return std::string("power"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const InverseS&) { return std::string("inverse_s"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    family_);
}

}  // namespace persuade
