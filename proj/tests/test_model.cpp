#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support/oracles.hpp"
#include "trajsmooth/model.hpp"

using namespace trajsmooth;
namespace bm = boost::math;

TEST_CASE("true parameter defaults") {
  const auto p = simulation_true_params();
  CHECK(p.alpha_ff == 0.95);
  CHECK(p.alpha_pp == 0.995);
  CHECK(p.rho == 0.999);
  CHECK(p.sigma2_p == 0.05);
  CHECK(p.pi_big == 0.002);
  CHECK(p.k == 10.0);
  CHECK(p.tau2_s == 0.025);
  CHECK(p.c == 100.0);
  CHECK(p.sigma2_f() == doctest::Approx(5.0));
  CHECK(p.tau2_b() == doctest::Approx(2.5));
  CHECK(p.in_support());
}

TEST_CASE("regime transition probabilities") {
  ModelParams p;
  CHECK(regime_transition_prob(Regime::flight, Regime::flight, p) == 0.95);
  CHECK(regime_transition_prob(Regime::pause, Regime::pause, p) == 0.995);
  CHECK(regime_transition_prob(Regime::flight, Regime::flight, p) +
            regime_transition_prob(Regime::flight, Regime::pause, p) ==
        doctest::Approx(1.0));
  CHECK(regime_transition_prob(Regime::pause, Regime::flight, p) +
            regime_transition_prob(Regime::pause, Regime::pause, p) ==
        doctest::Approx(1.0));
  CHECK(stationary_flight_prob(p) == doctest::Approx(0.005 / (0.005 + 0.05)));
}

TEST_CASE("latent step log-density") {
  ModelParams p;
  const Point2 prev{1.0, 2.0};
  CHECK(latent_step_logdensity(prev, prev, {0, 0}, Regime::pause, p) ==
        doctest::Approx(-std::log(2 * std::numbers::pi * p.sigma2_p)));
  p.rho = 0.0;
  CHECK(flight_mean(prev, {0, 0}, p.rho) == prev);
  CHECK(latent_step_logdensity(prev, prev, {-3, 4}, Regime::flight, p) ==
        doctest::Approx(-std::log(2 * std::numbers::pi * p.sigma2_f())));
  CHECK(flight_mean({1, 0}, {0, 0}, 1.0) == Point2{2, 0});
}

TEST_CASE("latent step density integrates to one") {
  ModelParams p;
  p.sigma2_p = 0.3;
  p.k = 1.5;
  p.rho = 0.6;
  const Point2 prev{0.2, -0.1}, prev2{-0.3, 0.1};
  for (Regime s : {Regime::pause, Regime::flight}) {
    const double integral = oracle::integrate_2d(
        [&](double x, double y) { return std::exp(latent_step_logdensity({x, y}, prev, prev2, s, p)); }, 6.0, 600);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("observation mixture density") {
  ModelParams p;
  p.pi_big = 0.0;
  const Point2 x{0.5, 0.5}, y{0.6, 0.3};
  const double d2 = squared_norm(y - x);
  CHECK(observation_logdensity(y, x, p) == doctest::Approx(log_normal2(d2, p.tau2_s)));
  p = ModelParams{};
  CHECK(observation_logdensity(x, x, p) ==
        doctest::Approx(std::log((1 - p.pi_big) / (2 * std::numbers::pi * p.tau2_s) +
                                 p.pi_big / (2 * std::numbers::pi * p.tau2_b()))));
  auto rng = make_rng(11, {});
  for (int i = 0; i < 500; ++i) {
    ModelParams q;
    q.pi_big = sample_uniform(rng);
    q.tau2_s = 0.01 + sample_uniform(rng);
    q.c = 1.0 + 50.0 * sample_uniform(rng);
    const Point2 a{sample_normal(rng), sample_normal(rng)};
    const Point2 b{sample_normal(rng), sample_normal(rng)};
    const double expect = oracle::naive_mixture_logdensity(squared_norm(a - b), q.pi_big, q.tau2_s, q.tau2_b());
    CHECK(observation_logdensity(a, b, q) == doctest::Approx(expect).epsilon(1e-10));
    const ObservationModel om(q);
    CHECK(om.logdensity(a, b) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("far observations stay finite through log-sum-exp") {
  ModelParams p;
  const double v = observation_logdensity({1000, 0}, {0, 0}, p);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(std::log(p.pi_big) + log_normal2(1e6, p.tau2_b())).epsilon(1e-9));
  const ObservationModel om(p);
  CHECK(om.big_responsibility(1e6) == doctest::Approx(1.0));
  CHECK(om.big_responsibility(0.0) < 0.5);
}

TEST_CASE("observation density integrates to one") {
  ModelParams p;
  p.tau2_s = 0.2;
  p.c = 4.0;
  p.pi_big = 0.3;
  const double integral =
      oracle::integrate_2d([&](double x, double y) { return std::exp(observation_logdensity({x, y}, {0, 0}, p)); },
                           8.0, 800);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("prior draws") {
  PriorSpec pr;
  auto rng = make_rng(13, {});
  const int n = 100000;
  double aff = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto th = sample_params_from_prior(pr, rng);
    REQUIRE(th.in_support());
    aff += th.alpha_ff;
    s2 += th.sigma2_p;
  }
  CHECK(std::abs(aff / n - 0.9495) < 0.005);
  CHECK(std::abs(s2 / n - 0.05) < 0.05 * 0.05);
}

TEST_CASE("log prior against closed-form densities") {
  PriorSpec pr;
  ModelParams p;
  const bm::chi_squared_distribution<> chi(100.0);
  const double tail = bm::cdf(bm::complement(chi, 1.0));
  auto trunc = [&](double v) { return std::log(bm::pdf(chi, v) / tail); };
  const double expect = std::log(bm::pdf(bm::beta_distribution<>(18.99, 1.01), p.alpha_ff)) +
                        std::log(bm::pdf(bm::beta_distribution<>(7.53, 0.154), p.alpha_pp)) + 0.0 +
                        trunc(p.k * p.k) + std::log(2.0 * p.k) +
                        std::log(bm::pdf(bm::inverse_gamma_distribution<>(2.0, 0.05), p.sigma2_p)) +
                        std::log(bm::pdf(bm::beta_distribution<>(1.0, 99.0), p.pi_big)) +
                        std::log(bm::pdf(bm::inverse_gamma_distribution<>(2.0, 0.025), p.tau2_s)) + trunc(p.c);
  CHECK(log_prior(p, pr) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(log_density(pr.rho, 0.3) == 0.0);
  ModelParams bad = p;
  bad.rho = 1.2;
  CHECK(std::isinf(log_prior(bad, pr)));
  bad.rho = -0.1;
  CHECK(log_prior(bad, pr) < 0);
  CHECK(std::isinf(log_prior(bad, pr)));
}

TEST_CASE("prior means") {
  PriorSpec pr;
  const auto m = prior_mean_params(pr);
  CHECK(m.alpha_ff == doctest::Approx(18.99 / 20.0));
  CHECK(m.sigma2_p == doctest::Approx(0.05));
  CHECK(m.tau2_s == doctest::Approx(0.025));
  CHECK(m.pi_big == doctest::Approx(0.01));
  CHECK(m.rho == doctest::Approx(0.5));
  CHECK(m.in_support());
}
