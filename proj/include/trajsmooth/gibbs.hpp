#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajsmooth/model.hpp"
#include "trajsmooth/smc.hpp"

namespace trajsmooth {

// ---- conjugate updates -------------------------------------------------------------

struct TransitionCounts {
  std::size_t pp = 0;  // pause -> pause
  std::size_t pf = 0;
  std::size_t fp = 0;
  std::size_t ff = 0;
};

TransitionCounts count_transitions(const std::vector<Regime>& S);

struct RegimePosterior {
  BetaPrior alpha_ff;
  BetaPrior alpha_pp;
};
RegimePosterior regime_posterior(const std::vector<Regime>& S, const PriorSpec& priors);

struct RegimeProbs {
  double alpha_ff;
  double alpha_pp;
};
RegimeProbs update_regime_probs(const std::vector<Regime>& S, const PriorSpec& priors, Rng& rng);

/// Inverse-gamma posterior of sigma2_p: pause increments enter at unit scale, flight
/// residuals against the AR mean at scale 1/k^2.
InverseGammaPrior variance_posterior(const LatentTrajectory& traj, const ModelParams& params,
                                     const PriorSpec& priors);
double update_variance(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors,
                       Rng& rng);

enum class ErrorComponent : std::uint8_t { unobserved = 0, small = 1, big = 2 };

std::vector<ErrorComponent> sample_mixture_indicators(const ObservationSeries& obs, const std::vector<Point2>& X,
                                                      const ModelParams& params, Rng& rng);

struct MeasurementPosterior {
  BetaPrior pi_big;
  InverseGammaPrior tau2_s;
};
MeasurementPosterior measurement_posterior(const ObservationSeries& obs, const std::vector<Point2>& X,
                                           const std::vector<ErrorComponent>& labels, const ModelParams& params,
                                           const PriorSpec& priors);

struct MeasurementParams {
  double pi_big;
  double tau2_s;
};
MeasurementParams update_measurement_params(const ObservationSeries& obs, const std::vector<Point2>& X,
                                            const std::vector<ErrorComponent>& labels, const ModelParams& params,
                                            const PriorSpec& priors, Rng& rng);

// ---- Metropolis-Hastings for rho, k, c ---------------------------------------------

enum class ScalarParam { rho, k, c };
const char* to_string(ScalarParam p);

/// Unconstrained coordinate used by the random-walk proposal: logit for rho, log(v - 1)
/// for k and c.
double to_unconstrained(ScalarParam p, double v);
double from_unconstrained(ScalarParam p, double u);
/// log |dv/du| at v.
double log_jacobian(ScalarParam p, double v);

struct MhStep {
  double value;
  bool accepted;
};

using LogTarget = std::function<double(double)>;

/// One random-walk Metropolis step of size `step` on the unconstrained scale.
MhStep mh_update_scalar(ScalarParam which, double current, const LogTarget& log_target, double step, Rng& rng);

/// Log acceptance ratio of moving `from` -> `to` (before truncation at zero).
double mh_log_ratio(ScalarParam which, double from, double to, const LogTarget& log_target);

/// Random-walk sampler whose step is tuned toward 20-50% acceptance while adapting.
class AdaptiveScalarMh {
 public:
  AdaptiveScalarMh(ScalarParam which, double initial_step = 0.5) : which_(which), step_(initial_step) {}

  double update(double current, const LogTarget& log_target, Rng& rng);
  /// Adjusts the step from the acceptance rate since the last call.
  void adapt();

  double step() const { return step_; }
  double acceptance_rate() const;
  std::size_t proposals() const { return proposed_; }

 private:
  ScalarParam which_;
  double step_;
  std::size_t accepted_ = 0;
  std::size_t proposed_ = 0;
  std::size_t window_accepted_ = 0;
  std::size_t window_proposed_ = 0;
};

/// Conditional log targets (up to constants) of rho, k and c given the latent state.
LogTarget rho_log_target(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors);
LogTarget k_log_target(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors);
LogTarget c_log_target(const ObservationSeries& obs, const std::vector<Point2>& X,
                       const std::vector<ErrorComponent>& labels, const ModelParams& params,
                       const PriorSpec& priors);

// ---- top-level sampler ----------------------------------------------------------------

struct MgsConfig {
  std::size_t n_samples = 2000;
  std::size_t burn_in = 1000;
  std::size_t n_particles = 500;
  std::uint64_t seed = 1;
  double credible_level = 0.9;
  /// When false the parameters stay at `initial` and only trajectories are drawn.
  bool update_params = true;
  /// Starting parameters; prior means when unset.
  std::optional<ModelParams> initial;
  std::size_t adapt_interval = 50;
  Execution execution = Execution::parallel;
};

struct McmcDraw {
  LatentTrajectory trajectory;
  ModelParams params;
  std::size_t iteration = 0;
};

struct PosteriorSummary {
  std::vector<Point2> mean;
  std::vector<double> motion_prob;
  std::vector<Point2> lo;
  std::vector<Point2> hi;
  std::vector<Point2> sd;  // pointwise posterior standard deviation per coordinate
  double level = 0.9;
  std::size_t retained = 0;
};

struct MgsReport {
  double acceptance_rho = 0.0;
  double acceptance_k = 0.0;
  double acceptance_c = 0.0;
  double step_rho = 0.0;
  double step_k = 0.0;
  double step_c = 0.0;
  std::vector<double> mean_ess;  // per iteration
  std::vector<double> min_ess;
  std::size_t collapse_retries = 0;
  double wall_seconds = 0.0;
};

struct MgsResult {
  std::vector<McmcDraw> draws;  // post burn-in
  PosteriorSummary summary;
  MgsReport report;
};

/// A trajectory draw failed even after retrying with twice the particles.
class SamplerAborted : public std::runtime_error {
 public:
  SamplerAborted(std::size_t iteration, const std::string& detail);
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

MgsResult run_mgs(const ObservationSeries& obs, const PriorSpec& priors, const MgsConfig& cfg);

PosteriorSummary summarize_draws(const std::vector<McmcDraw>& draws, double level);

/// Flight wherever the posterior motion probability reaches `threshold`.
std::vector<Regime> classify_regimes(const PosteriorSummary& summary, double threshold = 0.5);

}  // namespace trajsmooth
