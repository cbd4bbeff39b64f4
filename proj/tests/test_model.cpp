#include <doctest.h>

#include <cmath>

#include "persuade/errors.hpp"
#include "persuade/lottery.hpp"
#include "persuade/model.hpp"
#include "persuade/oracle.hpp"

using namespace persuade;
using doctest::Approx;

namespace {

const ModelParams base{};  // alpha .3, p_bar .9, p_high .7, p_low .2, c .35

}  // namespace

TEST_CASE("p_lower is the affine map between p_low and p_high") {
  CHECK(p_lower(0.0, base) == Approx(0.2));
  CHECK(p_lower(1.0, base) == Approx(0.7));
  CHECK(p_lower(0.5, base) == Approx(0.45));
}

TEST_CASE("mu_e at the baseline and the indifference identity") {
  CHECK(mu_e(base) == Approx(0.7).epsilon(1e-12));
  oracle::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto inst = oracle::random_instance(rng, oracle::PhiKind::Linear);
    const auto& p = inst.params;
    CHECK(std::abs(p_lower(mu_e(p), p) - (p.p_bar - p.c)) < 1e-12);
  }
}

TEST_CASE("mu_e approaches 1 as c approaches p_bar - p_high") {
  ModelParams p = base;
  p.c = p.p_bar - p.p_high + 1e-9;
  CHECK(mu_e(p) > 1.0 - 1e-6);
  CHECK(mu_e(p) < 1.0);
}

TEST_CASE("doctor payoff jumps at mu_e with ties treated") {
  CHECK(payoff_P(0.0, base) == Approx(0.9));
  CHECK(payoff_P(1.0, base) == Approx(0.7));
  CHECK(payoff_P(mu_e(base), base) == 0.9);
  CHECK(payoff_P(mu_e(base) + 1e-9, base) == Approx(p_lower(mu_e(base), base)));
}

TEST_CASE("patient payoffs at the endpoints") {
  const auto phi = AnticipationCurve::power(0.5);
  const double flat = 0.3 + 0.7 * phi(0.9 - 0.35);
  CHECK(payoff_V(0.0, base, phi) == Approx(flat));
  CHECK(payoff_V(0.4, base, phi) == Approx(flat));
  CHECK(payoff_V(mu_e(base), base, phi) == Approx(flat));
  CHECK(payoff_V(1.0, base, phi) == Approx(0.3 + 0.7 * phi(0.7)));
  CHECK(payoff_V0(1.0, base, phi) == Approx(phi(0.3 + 0.7 * 0.7)));
  CHECK(payoff_Vbar(0.0, base, phi) == Approx(phi(0.3 + 0.7 * 0.2)));
  CHECK(payoff_Vbar(1.0, base, phi) == Approx(phi(0.3 + 0.7 * 0.7)));
}

TEST_CASE("linear phi makes V0 affine and equal to V-bar") {
  const auto phi = AnticipationCurve::linear();
  for (double mu = 0.0; mu <= 1.0; mu += 0.05) {
    CHECK(payoff_V0(mu, base, phi) == Approx(0.3 + 0.7 * p_lower(mu, base)));
    CHECK(payoff_Vbar(mu, base, phi) == Approx(payoff_V0(mu, base, phi)));
  }
}

TEST_CASE("V-bar lies below V0 for concave phi") {
  oracle::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    auto inst = oracle::random_instance(rng, oracle::PhiKind::Concave);
    const Model m(inst.params, inst.phi);
    for (double mu = 0.0; mu <= 1.0; mu += 0.1) CHECK(m.Vbar(mu) <= m.V0(mu) + 1e-12);
  }
}

TEST_CASE("phi inverse") {
  CHECK(phi_inverse(0.0, AnticipationCurve::power(0.5)) == Approx(0.0));
  CHECK(phi_inverse(1.0, AnticipationCurve::power(0.5)) == Approx(1.0));
  CHECK(phi_inverse(0.37, AnticipationCurve::linear()) == Approx(0.37));
  CHECK(phi_inverse(0.5, AnticipationCurve::power(0.5)) == Approx(0.25));
  CHECK_THROWS_AS(phi_inverse(1.5, AnticipationCurve::linear()), DomainError);
  CHECK_THROWS_AS(phi_inverse(-0.1, AnticipationCurve::linear()), DomainError);

  oracle::Rng rng(7);
  for (auto kind : {oracle::PhiKind::Concave, oracle::PhiKind::InverseS}) {
    for (int i = 0; i < 50; ++i) {
      const auto phi = oracle::random_phi(rng, kind);
      const double w = rng.uniform();
      CHECK(std::abs(phi(phi.inverse(w)) - w) <= 1e-10);
    }
  }
}

TEST_CASE("curve families are normalized and increasing") {
  for (const auto& phi :
       {AnticipationCurve::linear(), AnticipationCurve::power(0.4),
        AnticipationCurve::exponential(1.5), AnticipationCurve::inverse_s(0.5),
        AnticipationCurve::tabulated({{0.0, 0.0}, {0.5, 0.7}, {1.0, 1.0}})}) {
    CAPTURE(phi.family_name());
    CHECK(phi(0.0) == Approx(0.0));
    CHECK(phi(1.0) == Approx(1.0));
    for (double v = 0.0; v < 1.0; v += 0.01) CHECK(phi(v + 0.01) > phi(v));
  }
  CHECK(AnticipationCurve::power(0.4).is_concave());
  CHECK_FALSE(AnticipationCurve::inverse_s(0.5).is_concave());
  CHECK(AnticipationCurve::tabulated({{0.0, 0.0}, {0.5, 0.7}, {1.0, 1.0}}).is_concave());
  CHECK_FALSE(AnticipationCurve::tabulated({{0.0, 0.0}, {0.5, 0.3}, {1.0, 1.0}}).is_concave());
}

TEST_CASE("curve parameter validation") {
  CHECK_THROWS_AS(AnticipationCurve::power(0.0), ConfigError);
  CHECK_THROWS_AS(AnticipationCurve::power(1.5), ConfigError);
  CHECK_THROWS_AS(AnticipationCurve::exponential(-1.0), ConfigError);
  CHECK_THROWS_AS(AnticipationCurve::inverse_s(1.2), ConfigError);
  CHECK_THROWS_AS(AnticipationCurve::tabulated({{0.0, 0.0}, {0.5, 0.8}, {0.4, 0.9}, {1.0, 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(AnticipationCurve::tabulated({{0.0, 0.1}, {1.0, 1.0}}), ConfigError);
}

TEST_CASE("parameter validation names the field") {
  ModelParams p = base;
  p.c = 0.1;  // mu_e above 1
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.") == 0);
  }
  p = base;
  p.alpha = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = base;
  p.p_low = 0.8;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = base;
  p.mu0 = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("fear reaction") {
  oracle::Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    auto inst = oracle::random_instance(rng, oracle::PhiKind::Linear);
    CHECK(reacts_to_fear(inst.params, inst.phi));
  }
  // p_bar - c barely above p_low and a steep phi: skipping wins at mu = 0.
  ModelParams p = base;
  p.alpha = 0.5;
  p.c = 0.69;
  CHECK_FALSE(reacts_to_fear(p, AnticipationCurve::power(0.2)));
}

TEST_CASE("lottery construction") {
  auto l = PosteriorLottery::split(0.8, 0.7, 1.0);
  REQUIRE(l.size() == 2);
  CHECK(l.atoms()[0].posterior == Approx(0.7));
  CHECK(l.atoms()[0].weight == Approx(2.0 / 3.0));
  CHECK(l.atoms()[1].weight == Approx(1.0 / 3.0));
  CHECK(l.mean() == Approx(0.8));
  CHECK(PosteriorLottery::split(0.5, 0.5, 0.5).size() == 1);
  CHECK_THROWS_AS(PosteriorLottery::split(0.5, 0.6, 1.0), DomainError);
  CHECK_THROWS_AS(PosteriorLottery::from_atoms({{0.2, 0.5}, {0.9, 0.4}}, 0.55), DomainError);
  CHECK_THROWS_AS(PosteriorLottery::from_atoms({{0.2, 0.5}, {0.9, 0.5}}, 0.3), DomainError);

  auto merged = PosteriorLottery::from_atoms({{0.2, 0.25}, {0.2, 0.25}, {0.8, 0.5}}, 0.5);
  CHECK(merged.size() == 2);

  std::vector<PosteriorLottery> parts{PosteriorLottery::split(0.4, 0.0, 1.0),
                                      PosteriorLottery::point(0.7)};
  std::vector<double> w{1.0, 1.0};
  auto mix = PosteriorLottery::mixture(parts, w);
  CHECK(mix.mean() == Approx(0.55));
  CHECK(mix.size() == 3);
}
