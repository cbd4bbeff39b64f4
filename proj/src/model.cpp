#include "persuade/model.hpp"

#include <cmath>
#include <sstream>

#include "persuade/errors.hpp"

namespace persuade {
namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    std::ostringstream os;
    os << "model." << field << ": " << rule;
    throw ConfigError(os.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  for (double v : {alpha, p_bar, p_high, p_low, c, mu0}) {
    require(std::isfinite(v), "params", "all values must be finite");
  }
  require(alpha > 0.0 && alpha < 1.0, "alpha", "must lie in (0, 1)");
  require(mu0 > 0.0 && mu0 < 1.0, "mu0", "must lie in (0, 1)");
  require(p_low >= 0.0, "p_low", "must be nonnegative");
  require(p_low < p_high, "p_high", "must exceed p_low");
  require(p_high < p_bar, "p_bar", "must exceed p_high");
  require(p_bar <= 1.0, "p_bar", "must not exceed 1");
  require(c > 0.0, "c", "must be positive");
  require(p_low < p_bar - c && p_bar - c < p_high, "c",
          "p_bar - c must lie strictly between p_low and p_high");
}

double p_lower(Belief mu, const ModelParams& m) { return mu * m.p_high + (1.0 - mu) * m.p_low; }

double mu_e(const ModelParams& m) {
  double e = (m.p_bar - m.c - m.p_low) / (m.p_high - m.p_low);
  if (!(e > 0.0 && e < 1.0)) {
    std::ostringstream os;
    os << "model.c: treatment threshold " << e << " falls outside (0, 1)";
    throw ConfigError(os.str());
  }
  return e;
}

double payoff_P(Belief mu, const ModelParams& m) {
  return mu <= mu_e(m) ? m.p_bar : p_lower(mu, m);
}

double payoff_V(Belief mu, const ModelParams& m, const AnticipationCurve& phi) {
  double v2 = mu <= mu_e(m) ? m.p_bar - m.c : p_lower(mu, m);
  return m.alpha + (1.0 - m.alpha) * phi(v2);
}

double payoff_V0(Belief mu, const ModelParams& m, const AnticipationCurve& phi) {
  return phi(m.alpha + (1.0 - m.alpha) * p_lower(mu, m));
}

double payoff_Vbar(Belief mu, const ModelParams& m, const AnticipationCurve& phi) {
  return mu * phi(m.alpha + (1.0 - m.alpha) * m.p_high) +
         (1.0 - mu) * phi(m.alpha + (1.0 - m.alpha) * m.p_low);
}

double phi_inverse(double w, const AnticipationCurve& phi) { return phi.inverse(w); }

bool reacts_to_fear(const ModelParams& m, const AnticipationCurve& phi) {
  return payoff_V(0.0, m, phi) >= payoff_V0(0.0, m, phi);
}

Model::Model(ModelParams p, AnticipationCurve f)
    : params(p), phi(std::move(f)), mu_e_((p.validate(), persuade::mu_e(p))) {}

double Model::p_lower(Belief mu) const { return persuade::p_lower(mu, params); }

double Model::P(Belief mu) const { return mu <= mu_e_ ? params.p_bar : p_lower(mu); }

double Model::V(Belief mu) const {
  double v2 = mu <= mu_e_ ? params.p_bar - params.c : p_lower(mu);
  return params.alpha + (1.0 - params.alpha) * phi(v2);
}

double Model::V0(Belief mu) const {
  return phi(params.alpha + (1.0 - params.alpha) * p_lower(mu));
}

double Model::Vbar(Belief mu) const { return mu * V0(1.0) + (1.0 - mu) * V0(0.0); }

double Model::dV(Belief mu) const {
  if (mu < mu_e_) return 0.0;
  return (1.0 - params.alpha) * phi.derivative(p_lower(mu)) * (params.p_high - params.p_low);
}

double Model::dV0(Belief mu) const {
  return phi.derivative(params.alpha + (1.0 - params.alpha) * p_lower(mu)) *
         (1.0 - params.alpha) * (params.p_high - params.p_low);
}

double Model::health_if_tested(Belief mu) const {
  return params.alpha + (1.0 - params.alpha) * P(mu);
}

double Model::health_if_skipped(Belief mu) const {
  return params.alpha + (1.0 - params.alpha) * p_lower(mu);
}

bool Model::reacts_to_fear() const { return V(0.0) >= V0(0.0); }

}  // namespace persuade
