#pragma once

#include <cstdint>
#include <vector>

#include "trajsmooth/model.hpp"

namespace trajsmooth {

/// Two-state observed/missing Markov chain.
struct MissingnessParams {
  double stay_missing = 0.95;
  double stay_observed = 0.99;

  double stationary_missing_fraction() const {
    const double to_missing = 1.0 - stay_observed;
    const double to_observed = 1.0 - stay_missing;
    return to_missing / (to_missing + to_observed);
  }
};

struct SimulatedDataset {
  LatentTrajectory truth;
  ObservationSeries obs;
  ModelParams params_used;
  std::uint64_t seed = 0;
};

/// Regime chain started from its stationary law, X_1 at the origin and zero initial
/// velocity. Boundary parameter values (alpha = 0 or 1, zero variance) are accepted.
LatentTrajectory simulate_trajectory(const ModelParams& params, std::size_t T, Rng& rng);

/// Same as above but with the first regime fixed.
LatentTrajectory simulate_trajectory(const ModelParams& params, std::size_t T, Regime first, Rng& rng);

/// Noisy positions for every time step (the missingness mask is applied separately).
std::vector<Point2> simulate_observations(const LatentTrajectory& truth, const ModelParams& params, Rng& rng);

/// 1 = observed. Z_1 is drawn from the chain's stationary distribution.
std::vector<std::uint8_t> simulate_missingness(const MissingnessParams& mp, std::size_t T, Rng& rng);

SimulatedDataset simulate_dataset(const ModelParams& params, const MissingnessParams& mp, std::size_t T,
                                  std::uint64_t seed);

/// Fraction of time steps without an observation.
double missing_fraction(const ObservationSeries& obs);

}  // namespace trajsmooth
