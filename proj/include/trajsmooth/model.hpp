#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trajsmooth/geometry.hpp"
#include "trajsmooth/random.hpp"

namespace trajsmooth {

enum class Regime : std::uint8_t { pause = 0, flight = 1 };

inline int to_int(Regime s) { return static_cast<int>(s); }

/// Model parameters. The flight innovation variance is k^2 * sigma2_p and the big
/// measurement-error variance is c * tau2_s. pi_big is the probability that an
/// observation carries the big error.
struct ModelParams {
  double alpha_ff = 0.95;  // P(flight -> flight)
  double alpha_pp = 0.995; // P(pause -> pause)
  double rho = 0.999;      // autocorrelation of flight increments
  double sigma2_p = 0.05;  // km^2, pause step variance
  double pi_big = 0.002;
  double k = 10.0;         // sigma_f / sigma_p
  double tau2_s = 0.025;   // km^2, small-error variance
  double c = 100.0;        // tau2_b / tau2_s

  double sigma2_f() const { return k * k * sigma2_p; }
  double tau2_b() const { return c * tau2_s; }

  /// Strict parameter-space membership used by the prior and the sampler.
  bool in_support() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Ground-truth values used by the simulation study.
ModelParams simulation_true_params();

struct BetaPrior {
  double a = 1.0;
  double b = 1.0;
};
struct InverseGammaPrior {
  double shape = 1.0;
  double scale = 1.0;
};
/// Chi-squared(df) restricted to (lower, inf) and renormalised.
struct TruncatedChiSquaredPrior {
  double df = 100.0;
  double lower = 1.0;
};
struct UniformPrior {
  double lo = 0.0;
  double hi = 1.0;
};

struct PriorSpec {
  BetaPrior alpha_ff{18.99, 1.01};
  BetaPrior alpha_pp{7.53, 0.154};
  UniformPrior rho{0.0, 1.0};
  TruncatedChiSquaredPrior flight_variance_ratio{100.0, 1.0};  // on k^2
  InverseGammaPrior sigma2_p{2.0, 0.05};
  BetaPrior pi_big{1.0, 99.0};
  InverseGammaPrior tau2_s{2.0, 0.025};
  TruncatedChiSquaredPrior c{100.0, 1.0};

  /// All hyperparameters strictly positive (and the uniform interval nonempty).
  bool valid() const;
};

double log_density(const BetaPrior& p, double x);
double log_density(const InverseGammaPrior& p, double x);
double log_density(const TruncatedChiSquaredPrior& p, double x);
double log_density(const UniformPrior& p, double x);

/// Log prior density of k induced by the truncated chi-squared prior on k^2.
double log_prior_k(double k, const TruncatedChiSquaredPrior& ratio_prior);

struct LatentTrajectory {
  std::vector<Point2> X;
  std::vector<Regime> S;

  std::size_t size() const { return X.size(); }
};

struct ObservationSeries {
  std::vector<std::optional<Point2>> Y;

  std::size_t size() const { return Y.size(); }
  bool observed(std::size_t t) const { return Y[t].has_value(); }
  std::size_t observed_count() const;
  /// Missingness indicators, 1 = observed.
  std::vector<std::uint8_t> indicators() const;
};

double regime_transition_prob(Regime prev, Regime next, const ModelParams& params);

/// Stationary probability of the flight regime.
double stationary_flight_prob(const ModelParams& params);

/// Mean of the next position under the flight dynamics: the increment follows an AR(1).
inline Point2 flight_mean(const Point2& prev, const Point2& prev2, double rho) {
  return prev + rho * (prev - prev2);
}

/// log p(x_t | x_{t-1}, x_{t-2}, s_t). Pause is a Gaussian random walk, flight an
/// ARIMA(1,1,0) step.
double latent_step_logdensity(const Point2& x, const Point2& prev, const Point2& prev2, Regime s,
                              const ModelParams& params);

/// log of the isotropic two-component Gaussian mixture density of y around x.
double observation_logdensity(const Point2& y, const Point2& x, const ModelParams& params);

/// log N2(d; 0, var * I) expressed through the squared distance d2.
double log_normal2(double d2, double var);

/// Precomputed observation log-density for the inner particle loop.
class ObservationModel {
 public:
  explicit ObservationModel(const ModelParams& params);
  double logdensity(const Point2& y, const Point2& x) const;
  /// Probability that an observation at squared distance d2 came from the big component.
  double big_responsibility(double d2) const;

 private:
  double log_w_small_;
  double log_w_big_;
  double inv2_small_;
  double inv2_big_;
};

ModelParams sample_params_from_prior(const PriorSpec& priors, Rng& rng);

/// Sum of the component log priors; -inf outside the support.
double log_prior(const ModelParams& params, const PriorSpec& priors);

/// Parameter values at the prior means (k and c via the means of their ratio priors).
ModelParams prior_mean_params(const PriorSpec& priors);

}  // namespace trajsmooth
