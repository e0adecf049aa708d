#include <cmath>

#include "doctest.h"
#include "support/oracles.hpp"
#include "trajsmooth/simulator.hpp"

using namespace trajsmooth;

TEST_CASE("absorbing pause gives a random walk") {
  ModelParams p;
  p.alpha_pp = 1.0;
  auto rng = make_rng(3, {});
  const auto tr = simulate_trajectory(p, 20000, Regime::pause, rng);
  double ss = 0.0;
  for (std::size_t t = 0; t < tr.size(); ++t) {
    REQUIRE(tr.S[t] == Regime::pause);
    if (t) ss += squared_norm(tr.X[t] - tr.X[t - 1]);
  }
  const double per_coord = ss / (2.0 * (tr.size() - 1));
  // variance of a squared N(0, s2) draw is 2 s2^2
  const double se = p.sigma2_p * std::sqrt(2.0 / (2.0 * (tr.size() - 1)));
  CHECK(std::abs(per_coord - p.sigma2_p) < 3 * se);
  CHECK(tr.X[0] == Point2{0, 0});
}

TEST_CASE("zero pause variance freezes position after a pause entry") {
  ModelParams p;
  p.sigma2_p = 0.0;
  p.alpha_ff = 0.0;
  auto rng = make_rng(4, {});
  const auto tr = simulate_trajectory(p, 200, rng);
  for (std::size_t t = 1; t < tr.size(); ++t) {
    if (tr.S[t] == Regime::pause) CHECK(tr.X[t] == tr.X[t - 1]);
  }
}

TEST_CASE("noise-free observations equal the truth") {
  ModelParams p;
  p.tau2_s = 0.0;
  p.c = 1.0;
  auto rng = make_rng(5, {});
  const auto tr = simulate_trajectory(p, 100, rng);
  const auto y = simulate_observations(tr, p, rng);
  for (std::size_t t = 0; t < 100; ++t) CHECK(y[t] == tr.X[t]);
}

TEST_CASE("small-error second moment") {
  ModelParams p;
  p.pi_big = 0.0;
  auto rng = make_rng(6, {});
  LatentTrajectory tr;
  tr.X.assign(100000, Point2{});
  tr.S.assign(100000, Regime::pause);
  const auto y = simulate_observations(tr, p, rng);
  double sx = 0.0, sx4 = 0.0;
  for (const auto& v : y) {
    sx += v.x * v.x;
    sx4 += v.x * v.x * v.x * v.x;
  }
  const double n = static_cast<double>(y.size());
  const double m = sx / n;
  const double se = std::sqrt((sx4 / n - m * m) / n);
  CHECK(std::abs(m - p.tau2_s) < 3 * se);
}

TEST_CASE("mixture error norms match the two-component law") {
  ModelParams p;
  p.pi_big = 0.5;
  p.c = 100.0;
  auto rng = make_rng(8, {});
  LatentTrajectory tr;
  tr.X.assign(20000, Point2{});
  tr.S.assign(20000, Regime::pause);
  const auto y = simulate_observations(tr, p, rng);
  std::vector<double> norms;
  for (const auto& v : y) norms.push_back(std::sqrt(squared_norm(v)));
  // |e| for e ~ N(0, s2 I2) is Rayleigh: P(|e| <= r) = 1 - exp(-r^2 / (2 s2))
  auto cdf = [&](double r) {
    return 0.5 * (1 - std::exp(-r * r / (2 * p.tau2_s))) + 0.5 * (1 - std::exp(-r * r / (2 * p.tau2_b())));
  };
  CHECK(oracle::ks_pvalue(oracle::ks_statistic(norms, cdf), norms.size()) > 0.01);
}

TEST_CASE("missingness chain") {
  MissingnessParams mp;
  CHECK(mp.stationary_missing_fraction() == doctest::Approx(1.0 / 6.0));
  auto rng = make_rng(10, {});
  const auto z = simulate_missingness(mp, 1000000, rng);
  std::size_t missing = 0;
  for (auto v : z) missing += v == 0;
  const double frac = static_cast<double>(missing) / z.size();
  // a two-state chain has variance inflation (1 + lambda) / (1 - lambda), lambda = 1 - 0.01 - 0.05
  const double lambda = 0.94;
  const double se = std::sqrt((1.0 / 6) * (5.0 / 6) / z.size() * (1 + lambda) / (1 - lambda));
  CHECK(std::abs(frac - 1.0 / 6.0) < 3 * se);

  MissingnessParams always{0.5, 1.0};
  for (int rep = 0; rep < 20; ++rep) {
    const auto zz = simulate_missingness(always, 500, rng);
    if (zz[0] == 1) {
      for (auto v : zz) CHECK(v == 1);
    }
  }
}

TEST_CASE("datasets are reproducible and seed-specific") {
  const auto a = simulate_dataset(simulation_true_params(), {}, 300, 99);
  const auto b = simulate_dataset(simulation_true_params(), {}, 300, 99);
  const auto c = simulate_dataset(simulation_true_params(), {}, 300, 100);
  CHECK(a.truth.X == b.truth.X);
  CHECK(a.truth.S == b.truth.S);
  CHECK(a.obs.Y == b.obs.Y);
  CHECK(a.truth.X != c.truth.X);
  CHECK(a.seed == 99);
  CHECK(a.obs.size() == 300);
  const double f = missing_fraction(a.obs);
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
}

TEST_CASE("missingness does not depend on the trajectory") {
  // Z_t against ||X_t|| across replicates: correlation indistinguishable from zero
  double sz = 0, sx = 0, szz = 0, sxx = 0, szx = 0;
  std::size_t n = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto ds = simulate_dataset(simulation_true_params(), {}, 200, 1000 + r);
    for (std::size_t t = 0; t < 200; t += 50) {
      const double z = ds.obs.observed(t) ? 1.0 : 0.0;
      const double x = std::sqrt(squared_norm(ds.truth.X[t]));
      sz += z; sx += x; szz += z * z; sxx += x * x; szx += z * x;
      ++n;
    }
  }
  const double dn = static_cast<double>(n);
  const double cov = szx / dn - sz / dn * sx / dn;
  const double corr = cov / std::sqrt((szz / dn - sz * sz / dn / dn) * (sxx / dn - sx * sx / dn / dn));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(dn));
}
