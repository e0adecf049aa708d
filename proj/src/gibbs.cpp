#include "trajsmooth/gibbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace trajsmooth {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Point2 previous2(const std::vector<Point2>& X, std::size_t t) { return t >= 2 ? X[t - 2] : X[0]; }

// Sufficient statistics of the flight increments d_t = X_t - X_{t-1} against the
// previous increment p_t = X_{t-1} - X_{t-2}: residual^2 = dd - 2 rho dp + rho^2 pp.
struct FlightStats {
  std::size_t n = 0;
  double dd = 0.0;
  double dp = 0.0;
  double pp = 0.0;

  double residual_ss(double rho) const { return dd - 2.0 * rho * dp + rho * rho * pp; }
};

FlightStats flight_stats(const LatentTrajectory& traj) {
  FlightStats st;
  for (std::size_t t = 1; t < traj.size(); ++t) {
    if (traj.S[t] != Regime::flight) continue;
    const Point2 d = traj.X[t] - traj.X[t - 1];
    const Point2 p = traj.X[t - 1] - previous2(traj.X, t);
    ++st.n;
    st.dd += dot(d, d);
    st.dp += dot(d, p);
    st.pp += dot(p, p);
  }
  return st;
}

double loglik_gaussian2(std::size_t n, double ss, double var) {
  return -static_cast<double>(n) * std::log(2.0 * std::numbers::pi * var) - 0.5 * ss / var;
}

}  // namespace

TransitionCounts count_transitions(const std::vector<Regime>& S) {
  TransitionCounts c;
  for (std::size_t t = 1; t < S.size(); ++t) {
    const bool from_f = S[t - 1] == Regime::flight;
    const bool to_f = S[t] == Regime::flight;
    if (from_f) {
      (to_f ? c.ff : c.fp)++;
    } else {
      (to_f ? c.pf : c.pp)++;
    }
  }
  return c;
}

RegimePosterior regime_posterior(const std::vector<Regime>& S, const PriorSpec& priors) {
  const auto c = count_transitions(S);
  return {{priors.alpha_ff.a + static_cast<double>(c.ff), priors.alpha_ff.b + static_cast<double>(c.fp)},
          {priors.alpha_pp.a + static_cast<double>(c.pp), priors.alpha_pp.b + static_cast<double>(c.pf)}};
}

RegimeProbs update_regime_probs(const std::vector<Regime>& S, const PriorSpec& priors, Rng& rng) {
  const auto post = regime_posterior(S, priors);
  RegimeProbs out;
  out.alpha_ff = sample_beta(rng, post.alpha_ff.a, post.alpha_ff.b);
  out.alpha_pp = sample_beta(rng, post.alpha_pp.a, post.alpha_pp.b);
  return out;
}

InverseGammaPrior variance_posterior(const LatentTrajectory& traj, const ModelParams& params,
                                     const PriorSpec& priors) {
  const double inv_k2 = 1.0 / (params.k * params.k);
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 1; t < traj.size(); ++t) {
    if (traj.S[t] == Regime::pause) {
      ss += squared_norm(traj.X[t] - traj.X[t - 1]);
    } else {
      ss += squared_norm(traj.X[t] - flight_mean(traj.X[t - 1], previous2(traj.X, t), params.rho)) * inv_k2;
    }
    ++n;
  }
  return {priors.sigma2_p.shape + static_cast<double>(n), priors.sigma2_p.scale + 0.5 * ss};
}

double update_variance(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors,
                       Rng& rng) {
  const auto post = variance_posterior(traj, params, priors);
  return sample_inverse_gamma(rng, post.shape, post.scale);
}

std::vector<ErrorComponent> sample_mixture_indicators(const ObservationSeries& obs, const std::vector<Point2>& X,
                                                      const ModelParams& params, Rng& rng) {
  const ObservationModel om(params);
  std::vector<ErrorComponent> labels(obs.size(), ErrorComponent::unobserved);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (!obs.observed(t)) continue;
    const double p_big = om.big_responsibility(squared_norm(*obs.Y[t] - X[t]));
    labels[t] = sample_uniform(rng) < p_big ? ErrorComponent::big : ErrorComponent::small;
  }
  return labels;
}

MeasurementPosterior measurement_posterior(const ObservationSeries& obs, const std::vector<Point2>& X,
                                           const std::vector<ErrorComponent>& labels, const ModelParams& params,
                                           const PriorSpec& priors) {
  std::size_t n_small = 0;
  std::size_t n_big = 0;
  double ss = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (!obs.observed(t) || labels[t] == ErrorComponent::unobserved) continue;
    const double r2 = squared_norm(*obs.Y[t] - X[t]);
    if (labels[t] == ErrorComponent::big) {
      ++n_big;
      ss += r2 / params.c;
    } else {
      ++n_small;
      ss += r2;
    }
  }
  MeasurementPosterior post;
  post.pi_big = {priors.pi_big.a + static_cast<double>(n_big), priors.pi_big.b + static_cast<double>(n_small)};
  post.tau2_s = {priors.tau2_s.shape + static_cast<double>(n_small + n_big), priors.tau2_s.scale + 0.5 * ss};
  return post;
}

MeasurementParams update_measurement_params(const ObservationSeries& obs, const std::vector<Point2>& X,
                                            const std::vector<ErrorComponent>& labels, const ModelParams& params,
                                            const PriorSpec& priors, Rng& rng) {
  const auto post = measurement_posterior(obs, X, labels, params, priors);
  MeasurementParams out;
  out.pi_big = sample_beta(rng, post.pi_big.a, post.pi_big.b);
  out.tau2_s = sample_inverse_gamma(rng, post.tau2_s.shape, post.tau2_s.scale);
  return out;
}

const char* to_string(ScalarParam p) {
  switch (p) {
    case ScalarParam::rho: return "rho";
    case ScalarParam::k: return "k";
    case ScalarParam::c: return "c";
  }
  return "?";
}

double to_unconstrained(ScalarParam p, double v) {
  if (p == ScalarParam::rho) return std::log(v) - std::log1p(-v);
  return std::log(v - 1.0);
}

double from_unconstrained(ScalarParam p, double u) {
  if (p == ScalarParam::rho) return 1.0 / (1.0 + std::exp(-u));
  return 1.0 + std::exp(u);
}

double log_jacobian(ScalarParam p, double v) {
  if (p == ScalarParam::rho) return std::log(v) + std::log1p(-v);
  return std::log(v - 1.0);
}

double mh_log_ratio(ScalarParam which, double from, double to, const LogTarget& log_target) {
  const double lt_to = log_target(to);
  if (lt_to == kNegInf) return kNegInf;
  return lt_to + log_jacobian(which, to) - log_target(from) - log_jacobian(which, from);
}

MhStep mh_update_scalar(ScalarParam which, double current, const LogTarget& log_target, double step, Rng& rng) {
  if (step <= 0.0) return {current, false};
  const double u = to_unconstrained(which, current) + sample_normal(rng, 0.0, step);
  const double proposal = from_unconstrained(which, u);
  const double log_u = std::log(sample_uniform(rng));
  // saturated proposals (logit(rho) far out, exp overflow) stay where they are
  const bool interior = which == ScalarParam::rho ? (proposal > 0.0 && proposal < 1.0)
                                                  : (proposal > 1.0 && std::isfinite(proposal));
  if (!interior) return {current, false};
  if (log_u < mh_log_ratio(which, current, proposal, log_target)) return {proposal, true};
  return {current, false};
}

double AdaptiveScalarMh::update(double current, const LogTarget& log_target, Rng& rng) {
  const auto r = mh_update_scalar(which_, current, log_target, step_, rng);
  ++proposed_;
  ++window_proposed_;
  if (r.accepted) {
    ++accepted_;
    ++window_accepted_;
  }
  return r.value;
}

void AdaptiveScalarMh::adapt() {
  if (window_proposed_ == 0) return;
  const double rate = static_cast<double>(window_accepted_) / static_cast<double>(window_proposed_);
  if (rate < 0.2) step_ *= 0.6;
  else if (rate > 0.5) step_ = std::min(step_ * 1.5, 10.0);
  window_accepted_ = 0;
  window_proposed_ = 0;
}

double AdaptiveScalarMh::acceptance_rate() const {
  return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0;
}

LogTarget rho_log_target(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors) {
  const FlightStats st = flight_stats(traj);
  const double var = params.sigma2_f();
  const UniformPrior prior = priors.rho;
  return [st, var, prior](double rho) {
    const double lp = log_density(prior, rho);
    if (lp == kNegInf) return kNegInf;
    return lp + loglik_gaussian2(st.n, st.residual_ss(rho), var);
  };
}

LogTarget k_log_target(const LatentTrajectory& traj, const ModelParams& params, const PriorSpec& priors) {
  const FlightStats st = flight_stats(traj);
  const double ss = st.residual_ss(params.rho);
  const double s2p = params.sigma2_p;
  const TruncatedChiSquaredPrior prior = priors.flight_variance_ratio;
  return [st, ss, s2p, prior](double k) {
    const double lp = log_prior_k(k, prior);
    if (lp == kNegInf) return kNegInf;
    return lp + loglik_gaussian2(st.n, ss, k * k * s2p);
  };
}

LogTarget c_log_target(const ObservationSeries& obs, const std::vector<Point2>& X,
                       const std::vector<ErrorComponent>& labels, const ModelParams& params,
                       const PriorSpec& priors) {
  std::size_t n = 0;
  double ss = 0.0;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (labels[t] != ErrorComponent::big) continue;
    ++n;
    ss += squared_norm(*obs.Y[t] - X[t]);
  }
  const double tau2 = params.tau2_s;
  const TruncatedChiSquaredPrior prior = priors.c;
  return [n, ss, tau2, prior](double c) {
    const double lp = log_density(prior, c);
    if (lp == kNegInf) return kNegInf;
    return lp + loglik_gaussian2(n, ss, c * tau2);
  };
}

SamplerAborted::SamplerAborted(std::size_t iteration, const std::string& detail)
    : std::runtime_error("sampler aborted at iteration " + std::to_string(iteration + 1) + ": " + detail),
      iteration_(iteration) {}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.size() == 1) return v[0];
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

PosteriorSummary summarize_draws(const std::vector<McmcDraw>& draws, double level) {
  PosteriorSummary out;
  out.level = level;
  out.retained = draws.size();
  if (draws.empty()) return out;
  const std::size_t T = draws.front().trajectory.size();
  const double n = static_cast<double>(draws.size());
  out.mean.assign(T, {});
  out.motion_prob.assign(T, 0.0);
  out.lo.resize(T);
  out.hi.resize(T);
  out.sd.resize(T);
  std::vector<double> xs(draws.size());
  std::vector<double> ys(draws.size());
  const double q_lo = 0.5 * (1.0 - level);
  const double q_hi = 0.5 * (1.0 + level);
  for (std::size_t t = 0; t < T; ++t) {
    double flights = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      xs[i] = draws[i].trajectory.X[t].x;
      ys[i] = draws[i].trajectory.X[t].y;
      flights += draws[i].trajectory.S[t] == Regime::flight;
    }
    Point2 m;
    for (std::size_t i = 0; i < draws.size(); ++i) m += Point2{xs[i], ys[i]};
    m *= 1.0 / n;
    Point2 var;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      var.x += (xs[i] - m.x) * (xs[i] - m.x);
      var.y += (ys[i] - m.y) * (ys[i] - m.y);
    }
    out.mean[t] = m;
    out.sd[t] = {std::sqrt(var.x / n), std::sqrt(var.y / n)};
    out.motion_prob[t] = flights / n;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    out.lo[t] = {quantile_sorted(xs, q_lo), quantile_sorted(ys, q_lo)};
    out.hi[t] = {quantile_sorted(xs, q_hi), quantile_sorted(ys, q_hi)};
  }
  return out;
}

std::vector<Regime> classify_regimes(const PosteriorSummary& summary, double threshold) {
  std::vector<Regime> out(summary.motion_prob.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = summary.motion_prob[t] >= threshold ? Regime::flight : Regime::pause;
  }
  return out;
}

MgsResult run_mgs(const ObservationSeries& obs, const PriorSpec& priors, const MgsConfig& cfg) {
  if (cfg.n_samples <= cfg.burn_in) throw std::invalid_argument("run_mgs: n_samples must exceed burn_in");
  if (!priors.valid()) throw std::invalid_argument("run_mgs: invalid prior hyperparameters");
  const auto start = std::chrono::steady_clock::now();

  Rng rng = make_rng(cfg.seed, {0x6d6773ULL});
  PgasSampler sampler(cfg.n_particles, derive_seed(cfg.seed, 0x70676173ULL), cfg.execution);
  std::unique_ptr<PgasSampler> fallback;

  ModelParams theta = cfg.initial.value_or(prior_mean_params(priors));
  AdaptiveScalarMh mh_rho(ScalarParam::rho);
  AdaptiveScalarMh mh_k(ScalarParam::k);
  AdaptiveScalarMh mh_c(ScalarParam::c);

  MgsResult result;
  result.draws.reserve(cfg.n_samples - cfg.burn_in);
  result.report.mean_ess.reserve(cfg.n_samples);
  result.report.min_ess.reserve(cfg.n_samples);

  for (std::size_t it = 0; it < cfg.n_samples; ++it) {
    PgasResult draw;
    try {
      draw = sampler.sample(obs, theta, rng);
    } catch (const ParticleCollapse& first) {
      ++result.report.collapse_retries;
      if (!fallback) {
        fallback = std::make_unique<PgasSampler>(2 * cfg.n_particles, derive_seed(cfg.seed, 0x72657472ULL),
                                                 cfg.execution);
      }
      try {
        draw = fallback->sample(obs, theta, rng);
      } catch (const ParticleCollapse& second) {
        throw SamplerAborted(it, std::string(first.what()) + "; retry: " + second.what());
      }
    }
    result.report.mean_ess.push_back(draw.diagnostics.mean_ess);
    result.report.min_ess.push_back(draw.diagnostics.min_ess);
    const LatentTrajectory& traj = draw.path;

    if (cfg.update_params) {
      const auto regimes = update_regime_probs(traj.S, priors, rng);
      theta.alpha_ff = regimes.alpha_ff;
      theta.alpha_pp = regimes.alpha_pp;
      theta.sigma2_p = update_variance(traj, theta, priors, rng);
      theta.rho = mh_rho.update(theta.rho, rho_log_target(traj, theta, priors), rng);
      theta.k = mh_k.update(theta.k, k_log_target(traj, theta, priors), rng);
      const auto labels = sample_mixture_indicators(obs, traj.X, theta, rng);
      const auto meas = update_measurement_params(obs, traj.X, labels, theta, priors, rng);
      theta.pi_big = meas.pi_big;
      theta.tau2_s = meas.tau2_s;
      theta.c = mh_c.update(theta.c, c_log_target(obs, traj.X, labels, theta, priors), rng);
      if (it < cfg.burn_in && cfg.adapt_interval > 0 && (it + 1) % cfg.adapt_interval == 0) {
        mh_rho.adapt();
        mh_k.adapt();
        mh_c.adapt();
      }
    }

    if (it >= cfg.burn_in) result.draws.push_back({traj, theta, it});
  }

  result.summary = summarize_draws(result.draws, cfg.credible_level);
  result.report.acceptance_rho = mh_rho.acceptance_rate();
  result.report.acceptance_k = mh_k.acceptance_rate();
  result.report.acceptance_c = mh_c.acceptance_rate();
  result.report.step_rho = mh_rho.step();
  result.report.step_k = mh_k.step();
  result.report.step_c = mh_c.step();
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace trajsmooth
