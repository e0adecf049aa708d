#include "trajsmooth/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace trajsmooth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool open_unit(double v) { return v > 0.0 && v < 1.0; }

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log P(chi2_df > lower)
double log_chi2_tail(double df, double lower) {
  return std::log(boost::math::gamma_q(0.5 * df, 0.5 * lower));
}

}  // namespace

bool ModelParams::in_support() const {
  return open_unit(alpha_ff) && open_unit(alpha_pp) && open_unit(rho) && sigma2_p > 0.0 &&
         open_unit(pi_big) && k > 1.0 && tau2_s > 0.0 && c > 1.0 && std::isfinite(sigma2_p) &&
         std::isfinite(k) && std::isfinite(tau2_s) && std::isfinite(c);
}

ModelParams simulation_true_params() { return ModelParams{}; }

bool PriorSpec::valid() const {
  auto beta_ok = [](const BetaPrior& p) { return p.a > 0.0 && p.b > 0.0; };
  auto ig_ok = [](const InverseGammaPrior& p) { return p.shape > 0.0 && p.scale > 0.0; };
  auto chi_ok = [](const TruncatedChiSquaredPrior& p) { return p.df > 0.0 && p.lower > 0.0; };
  return beta_ok(alpha_ff) && beta_ok(alpha_pp) && rho.hi > rho.lo && chi_ok(flight_variance_ratio) &&
         ig_ok(sigma2_p) && beta_ok(pi_big) && ig_ok(tau2_s) && chi_ok(c);
}

double log_density(const BetaPrior& p, double x) {
  if (!open_unit(x)) return kNegInf;
  return std::lgamma(p.a + p.b) - std::lgamma(p.a) - std::lgamma(p.b) + (p.a - 1.0) * std::log(x) +
         (p.b - 1.0) * std::log1p(-x);
}

double log_density(const InverseGammaPrior& p, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return p.shape * std::log(p.scale) - std::lgamma(p.shape) - (p.shape + 1.0) * std::log(x) -
         p.scale / x;
}

double log_density(const TruncatedChiSquaredPrior& p, double x) {
  if (!(x > p.lower) || !std::isfinite(x)) return kNegInf;
  const double h = 0.5 * p.df;
  const double untruncated = (h - 1.0) * std::log(x) - 0.5 * x - h * std::numbers::ln2 - std::lgamma(h);
  return untruncated - log_chi2_tail(p.df, p.lower);
}

double log_density(const UniformPrior& p, double x) {
  if (!(x > p.lo && x < p.hi)) return kNegInf;
  return -std::log(p.hi - p.lo);
}

double log_prior_k(double k, const TruncatedChiSquaredPrior& ratio_prior) {
  if (!(k > 0.0)) return kNegInf;
  const double lr = log_density(ratio_prior, k * k);
  if (lr == kNegInf) return kNegInf;
  return lr + std::log(2.0 * k);
}

std::size_t ObservationSeries::observed_count() const {
  std::size_t n = 0;
  for (const auto& y : Y) n += y.has_value();
  return n;
}

std::vector<std::uint8_t> ObservationSeries::indicators() const {
  std::vector<std::uint8_t> z(Y.size());
  for (std::size_t t = 0; t < Y.size(); ++t) z[t] = Y[t].has_value();
  return z;
}

double regime_transition_prob(Regime prev, Regime next, const ModelParams& params) {
  if (prev == Regime::flight) return next == Regime::flight ? params.alpha_ff : 1.0 - params.alpha_ff;
  return next == Regime::pause ? params.alpha_pp : 1.0 - params.alpha_pp;
}

double stationary_flight_prob(const ModelParams& params) {
  const double enter = 1.0 - params.alpha_pp;
  const double leave = 1.0 - params.alpha_ff;
  return enter / (enter + leave);
}

double log_normal2(double d2, double var) {
  return -std::log(2.0 * std::numbers::pi * var) - 0.5 * d2 / var;
}

double latent_step_logdensity(const Point2& x, const Point2& prev, const Point2& prev2, Regime s,
                              const ModelParams& params) {
  if (s == Regime::pause) return log_normal2(squared_norm(x - prev), params.sigma2_p);
  return log_normal2(squared_norm(x - flight_mean(prev, prev2, params.rho)), params.sigma2_f());
}

ObservationModel::ObservationModel(const ModelParams& params) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double tau2_b = params.tau2_b();
  log_w_small_ = params.pi_big < 1.0 ? std::log1p(-params.pi_big) - std::log(two_pi * params.tau2_s)
                                     : kNegInf;
  log_w_big_ = params.pi_big > 0.0 ? std::log(params.pi_big) - std::log(two_pi * tau2_b) : kNegInf;
  inv2_small_ = 0.5 / params.tau2_s;
  inv2_big_ = 0.5 / tau2_b;
}

double ObservationModel::logdensity(const Point2& y, const Point2& x) const {
  const double d2 = squared_norm(y - x);
  return log_add_exp(log_w_small_ - d2 * inv2_small_, log_w_big_ - d2 * inv2_big_);
}

double ObservationModel::big_responsibility(double d2) const {
  const double ls = log_w_small_ - d2 * inv2_small_;
  const double lb = log_w_big_ - d2 * inv2_big_;
  if (lb == kNegInf) return 0.0;
  if (ls == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(ls - lb));
}

double observation_logdensity(const Point2& y, const Point2& x, const ModelParams& params) {
  return ObservationModel(params).logdensity(y, x);
}

ModelParams sample_params_from_prior(const PriorSpec& priors, Rng& rng) {
  ModelParams p;
  p.alpha_ff = sample_beta(rng, priors.alpha_ff.a, priors.alpha_ff.b);
  p.alpha_pp = sample_beta(rng, priors.alpha_pp.a, priors.alpha_pp.b);
  p.rho = priors.rho.lo + (priors.rho.hi - priors.rho.lo) * sample_uniform(rng);
  p.k = std::sqrt(sample_truncated_chi_squared(rng, priors.flight_variance_ratio.df,
                                               priors.flight_variance_ratio.lower));
  p.sigma2_p = sample_inverse_gamma(rng, priors.sigma2_p.shape, priors.sigma2_p.scale);
  p.pi_big = sample_beta(rng, priors.pi_big.a, priors.pi_big.b);
  p.tau2_s = sample_inverse_gamma(rng, priors.tau2_s.shape, priors.tau2_s.scale);
  p.c = sample_truncated_chi_squared(rng, priors.c.df, priors.c.lower);
  return p;
}

double log_prior(const ModelParams& params, const PriorSpec& priors) {
  if (!params.in_support()) return kNegInf;
  return log_density(priors.alpha_ff, params.alpha_ff) + log_density(priors.alpha_pp, params.alpha_pp) +
         log_density(priors.rho, params.rho) + log_prior_k(params.k, priors.flight_variance_ratio) +
         log_density(priors.sigma2_p, params.sigma2_p) + log_density(priors.pi_big, params.pi_big) +
         log_density(priors.tau2_s, params.tau2_s) + log_density(priors.c, params.c);
}

ModelParams prior_mean_params(const PriorSpec& priors) {
  auto beta_mean = [](const BetaPrior& p) { return p.a / (p.a + p.b); };
  auto ig_mean = [](const InverseGammaPrior& p) {
    return p.shape > 1.0 ? p.scale / (p.shape - 1.0) : p.scale;
  };
  // E[X | X > l] for X ~ chi2_df equals df * P(chi2_{df+2} > l) / P(chi2_df > l).
  auto chi_mean = [](const TruncatedChiSquaredPrior& p) {
    return p.df * std::exp(log_chi2_tail(p.df + 2.0, p.lower) - log_chi2_tail(p.df, p.lower));
  };
  ModelParams m;
  m.alpha_ff = beta_mean(priors.alpha_ff);
  m.alpha_pp = beta_mean(priors.alpha_pp);
  m.rho = 0.5 * (priors.rho.lo + priors.rho.hi);
  m.k = std::sqrt(chi_mean(priors.flight_variance_ratio));
  m.sigma2_p = ig_mean(priors.sigma2_p);
  m.pi_big = beta_mean(priors.pi_big);
  m.tau2_s = ig_mean(priors.tau2_s);
  m.c = chi_mean(priors.c);
  return m;
}

}  // namespace trajsmooth
