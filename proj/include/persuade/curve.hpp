#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace persuade {

// Distortion applied to continuation utility. Every family is strictly
// increasing on [0,1] and normalized so that phi(0)=0 and phi(1)=1; only
// expectations of phi are ever compared, so the normalization loses nothing.
class AnticipationCurve {
 public:
  struct Linear {};
  struct Power {
    double gamma;  // in (0, 1]
  };
  struct Exponential {
    double rate;  // (1 - exp(-rate v)) / (1 - exp(-rate))
  };
  // Concave below `kink`, convex above it. The shape is
  // (1 - strength) v + strength S(v), with S passing through (kink, kink)
  // and flattening there with the given exponent.
  struct InverseS {
    double kink;
    double strength = 0.8;
    double exponent = 2.0;
  };
  struct Tabulated {
    std::vector<std::pair<double, double>> knots;
  };
  using Family = std::variant<Linear, Power, Exponential, InverseS, Tabulated>;

  AnticipationCurve() : AnticipationCurve(Linear{}) {}
  explicit AnticipationCurve(Family family);

  static AnticipationCurve linear() { return AnticipationCurve(Linear{}); }
  static AnticipationCurve power(double gamma) { return AnticipationCurve(Power{gamma}); }
  static AnticipationCurve exponential(double rate) {
    return AnticipationCurve(Exponential{rate});
  }
  static AnticipationCurve inverse_s(double kink, double strength = 0.8, double exponent = 2.0) {
    return AnticipationCurve(InverseS{kink, strength, exponent});
  }
  static AnticipationCurve tabulated(std::vector<std::pair<double, double>> knots) {
    return AnticipationCurve(Tabulated{std::move(knots)});
  }

  double operator()(double v) const;
  double derivative(double v) const;
  // Bisection inverse; |phi(result) - w| <= 1e-10. Throws DomainError
  // when w is outside [0,1].
  double inverse(double w) const;

  bool is_concave() const { return concave_; }
  bool is_linear() const;
  const Family& family() const { return family_; }
  std::string family_name() const;

 private:
  Family family_;
  bool concave_ = true;
};

}  // namespace persuade
