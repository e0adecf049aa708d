#include "trajsmooth/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace trajsmooth {

namespace {

Regime step_regime(Regime prev, const ModelParams& params, Rng& rng) {
  const double p_flight = regime_transition_prob(prev, Regime::flight, params);
  return sample_uniform(rng) < p_flight ? Regime::flight : Regime::pause;
}

Point2 gaussian2(Rng& rng, double var) {
  const double sd = std::sqrt(std::max(var, 0.0));
  return {sample_normal(rng, 0.0, 1.0) * sd, sample_normal(rng, 0.0, 1.0) * sd};
}

}  // namespace

LatentTrajectory simulate_trajectory(const ModelParams& params, std::size_t T, Regime first, Rng& rng) {
  if (T < 2) throw std::domain_error("simulate_trajectory: T must be at least 2");
  LatentTrajectory traj;
  traj.X.resize(T);
  traj.S.resize(T);
  traj.S[0] = first;
  traj.X[0] = {0.0, 0.0};
  for (std::size_t t = 1; t < T; ++t) {
    traj.S[t] = step_regime(traj.S[t - 1], params, rng);
    const Point2& prev = traj.X[t - 1];
    const Point2& prev2 = t >= 2 ? traj.X[t - 2] : traj.X[0];
    if (traj.S[t] == Regime::pause) {
      traj.X[t] = prev + gaussian2(rng, params.sigma2_p);
    } else {
      traj.X[t] = flight_mean(prev, prev2, params.rho) + gaussian2(rng, params.sigma2_f());
    }
  }
  return traj;
}

LatentTrajectory simulate_trajectory(const ModelParams& params, std::size_t T, Rng& rng) {
  const double pf = stationary_flight_prob(params);
  const Regime first = sample_uniform(rng) < pf ? Regime::flight : Regime::pause;
  return simulate_trajectory(params, T, first, rng);
}

std::vector<Point2> simulate_observations(const LatentTrajectory& truth, const ModelParams& params, Rng& rng) {
  std::vector<Point2> y(truth.size());
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const bool big = sample_uniform(rng) < params.pi_big;
    y[t] = truth.X[t] + gaussian2(rng, big ? params.tau2_b() : params.tau2_s);
  }
  return y;
}

std::vector<std::uint8_t> simulate_missingness(const MissingnessParams& mp, std::size_t T, Rng& rng) {
  if (T < 1) throw std::domain_error("simulate_missingness: T must be at least 1");
  std::vector<std::uint8_t> z(T);
  z[0] = sample_uniform(rng) >= mp.stationary_missing_fraction();
  for (std::size_t t = 1; t < T; ++t) {
    const double stay = z[t - 1] ? mp.stay_observed : mp.stay_missing;
    z[t] = sample_uniform(rng) < stay ? z[t - 1] : !z[t - 1];
  }
  return z;
}

SimulatedDataset simulate_dataset(const ModelParams& params, const MissingnessParams& mp, std::size_t T,
                                  std::uint64_t seed) {
  SimulatedDataset ds;
  ds.seed = seed;
  ds.params_used = params;
  auto traj_rng = make_rng(seed, {1});
  auto obs_rng = make_rng(seed, {2});
  auto miss_rng = make_rng(seed, {3});
  ds.truth = simulate_trajectory(params, T, traj_rng);
  const auto y = simulate_observations(ds.truth, params, obs_rng);
  const auto z = simulate_missingness(mp, T, miss_rng);
  ds.obs.Y.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (z[t]) ds.obs.Y[t] = y[t];
  }
  return ds;
}

double missing_fraction(const ObservationSeries& obs) {
  if (obs.size() == 0) return 0.0;
  return 1.0 - static_cast<double>(obs.observed_count()) / static_cast<double>(obs.size());
}

}  // namespace trajsmooth
