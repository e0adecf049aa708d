#include "trajsmooth/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trajsmooth {

ParticleCollapse::ParticleCollapse(std::size_t t, std::size_t n_particles, const std::string& detail)
    : std::runtime_error("particle collapse at t=" + std::to_string(t + 1) + " with " +
                         std::to_string(n_particles) + " particles: " + detail),
      t_(t),
      n_(n_particles) {}

NormalizedWeights normalize_log_weights(std::span<const double> logw) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : logw) {
    if (!std::isnan(v)) max = std::max(max, v);
  }
  if (logw.empty() || !std::isfinite(max)) {
    throw ParticleCollapse(0, logw.size(), "no finite log weight");
  }
  NormalizedWeights out;
  out.weights.resize(logw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double w = std::isnan(logw[i]) ? 0.0 : std::exp(logw[i] - max);
    out.weights[i] = w;
    sum += w;
  }
  for (double& w : out.weights) w /= sum;
  out.log_normalizer = max + std::log(sum / static_cast<double>(logw.size()));
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

namespace {

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw_index(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  const auto idx = static_cast<std::size_t>(it - cdf.begin());
  return std::min(idx, cdf.size() - 1);
}

}  // namespace

std::vector<std::size_t> multinomial_resample(std::span<const double> weights, std::size_t n, Rng& rng) {
  const auto cdf = cumulative(weights);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> out(n);
  for (auto& a : out) a = draw_index(cdf, unif(rng));
  return out;
}

void ParticleStreams::ensure(std::size_t n) {
  slots_.reserve(n);
  while (slots_.size() < n) {
    slots_.push_back(Slot{make_rng(key_, {0x736c6f74ULL, slots_.size()})});
  }
}

LatentTrajectory ParticleSystem::path(std::size_t t, std::size_t l) const {
  LatentTrajectory out;
  out.X.resize(t + 1);
  out.S.resize(t + 1);
  std::size_t slot = l;
  for (std::size_t u = t + 1; u-- > 0;) {
    out.X[u] = x(u, slot);
    out.S[u] = s(u, slot);
    if (u > 0) slot = ancestor(u, slot);
  }
  return out;
}

PgasSampler::PgasSampler(std::size_t n_particles, std::uint64_t stream_key, Execution exec)
    : n_(n_particles), exec_(exec), streams_(stream_key) {
  if (n_particles < 2) throw std::invalid_argument("PgasSampler: need at least 2 particles");
  streams_.ensure(n_particles);
}

void PgasSampler::initialize(const ObservationSeries& obs, const ModelParams& params) {
  const std::size_t T = obs.size();
  sys_.T = T;
  sys_.N = n_;
  sys_.X.resize(T * n_);
  sys_.S.resize(T * n_);
  sys_.ancestors.assign(T * n_, 0);
  sys_.ess.assign(T, static_cast<double>(n_));
  logw_.assign(n_, 0.0);
  cdf_.resize(n_);

  // Start near Y_1 with the pause spread; when Y_1 is missing, near the first
  // observation with a flight spread that grows with the gap length.
  Point2 center{0.0, 0.0};
  double var = params.sigma2_p;
  if (obs.observed(0)) {
    center = *obs.Y[0];
  } else {
    for (std::size_t t = 1; t < T; ++t) {
      if (obs.observed(t)) {
        center = *obs.Y[t];
        var = params.sigma2_f() * static_cast<double>(t);
        break;
      }
    }
  }
  const double sd = std::sqrt(var);
  for (std::size_t l = 0; l < n_; ++l) {
    auto& slot = streams_[l];
    sys_.X[l] = {center.x + sd * slot.normal(slot.engine), center.y + sd * slot.normal(slot.engine)};
    sys_.S[l] = slot.uniform(slot.engine) < 0.5 ? Regime::flight : Regime::pause;
  }
  for (std::size_t l = 0; l < n_; ++l) cdf_[l] = static_cast<double>(l + 1) / static_cast<double>(n_);
}

namespace {

struct StepContext {
  std::size_t t;
  std::size_t N;
  const std::vector<double>* cdf;
  ParticleSystem* sys;
  double* logw;
  const std::optional<Point2>* y;
  const ObservationModel* om;
  double p_ff;
  double p_pf;
  double rho;
  double sd_p;
  double sd_f;
};

// Resample, move and weigh slot l at time ctx.t; touches only slot l's outputs.
inline void step_slot(const StepContext& ctx, std::size_t l, ParticleStreams::Slot& slot) {
  ParticleSystem& sys = *ctx.sys;
  const std::size_t t = ctx.t;
  const std::size_t N = ctx.N;
  const auto a = static_cast<std::uint32_t>(draw_index(*ctx.cdf, slot.uniform(slot.engine)));
  const Regime s_prev = sys.S[(t - 1) * N + a];
  const double p_flight = s_prev == Regime::flight ? ctx.p_ff : ctx.p_pf;
  const Regime s = slot.uniform(slot.engine) < p_flight ? Regime::flight : Regime::pause;
  const Point2& prev = sys.X[(t - 1) * N + a];
  Point2 mean = prev;
  double sd = ctx.sd_p;
  if (s == Regime::flight) {
    const Point2& prev2 = t >= 2 ? sys.X[(t - 2) * N + sys.ancestors[(t - 1) * N + a]] : prev;
    mean = flight_mean(prev, prev2, ctx.rho);
    sd = ctx.sd_f;
  }
  const Point2 x{mean.x + sd * slot.normal(slot.engine), mean.y + sd * slot.normal(slot.engine)};
  sys.ancestors[t * N + l] = a;
  sys.S[t * N + l] = s;
  sys.X[t * N + l] = x;
  ctx.logw[l] = ctx.y->has_value() ? ctx.om->logdensity(**ctx.y, x) : 0.0;
}

}  // namespace

void PgasSampler::propagate(std::size_t t, const ObservationSeries& obs, const ModelParams& params,
                            const ObservationModel& om) {
  const StepContext ctx{t,
                        n_,
                        &cdf_,
                        &sys_,
                        logw_.data(),
                        &obs.Y[t],
                        &om,
                        params.alpha_ff,
                        1.0 - params.alpha_pp,
                        params.rho,
                        std::sqrt(params.sigma2_p),
                        std::sqrt(params.sigma2_f())};
  const auto n = static_cast<std::ptrdiff_t>(n_);
  if (exec_ == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < n; ++l) step_slot(ctx, static_cast<std::size_t>(l), streams_[l]);
  } else {
    for (std::ptrdiff_t l = 0; l < n; ++l) step_slot(ctx, static_cast<std::size_t>(l), streams_[l]);
  }
}

void PgasSampler::reweight(std::size_t t) {
  NormalizedWeights nw;
  try {
    nw = normalize_log_weights(logw_);
  } catch (const ParticleCollapse&) {
    throw ParticleCollapse(t, n_, "all observation log-densities are -inf");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < n_; ++l) {
    acc += nw.weights[l];
    cdf_[l] = acc;
  }
  sys_.ess[t] = effective_sample_size(nw.weights);
  sys_.final_weights = std::move(nw.weights);
}

PgasResult PgasSampler::sample(const ObservationSeries& obs, const ModelParams& params, Rng& rng) {
  const std::size_t T = obs.size();
  if (T < 2) throw std::domain_error("pgas_sample: need at least 2 time steps");
  initialize(obs, params);
  sys_.final_weights.assign(n_, 1.0 / static_cast<double>(n_));
  const ObservationModel om(params);
  for (std::size_t t = 1; t < T; ++t) {
    propagate(t, obs, params, om);
    reweight(t);
  }

  PgasResult result;
  const std::size_t pick = draw_index(cdf_, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  result.path = sys_.path(T - 1, pick);

  double sum = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t < T; ++t) {
    sum += sys_.ess[t];
    mn = std::min(mn, sys_.ess[t]);
  }
  result.diagnostics.mean_ess = sum / static_cast<double>(T - 1);
  result.diagnostics.min_ess = mn;
  return result;
}

LatentTrajectory pgas_sample(const ObservationSeries& obs, const ModelParams& params, std::size_t n_particles,
                             Rng& rng, Execution exec) {
  PgasSampler sampler(n_particles, rng(), exec);
  return sampler.sample(obs, params, rng).path;
}

}  // namespace trajsmooth
