#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajsmooth/model.hpp"

namespace trajsmooth {

/// Every log weight was -inf (or NaN): no particle is compatible with the data.
class ParticleCollapse : public std::runtime_error {
 public:
  ParticleCollapse(std::size_t t, std::size_t n_particles, const std::string& detail);
  std::size_t time_index() const { return t_; }
  std::size_t n_particles() const { return n_; }

 private:
  std::size_t t_;
  std::size_t n_;
};

struct NormalizedWeights {
  std::vector<double> weights;
  double log_normalizer = 0.0;  // log of the mean of exp(logw)
};

/// Throws ParticleCollapse (with time index 0) when no entry is finite.
NormalizedWeights normalize_log_weights(std::span<const double> logw);

double effective_sample_size(std::span<const double> weights);

/// n i.i.d. categorical draws from `weights` (which must sum to one).
std::vector<std::size_t> multinomial_resample(std::span<const double> weights, std::size_t n, Rng& rng);

enum class Execution { serial, parallel };

/// One random engine per particle slot. Slot l always consumes its own engine, so the
/// particle system is identical for any thread count or schedule.
class ParticleStreams {
 public:
  explicit ParticleStreams(std::uint64_t key) : key_(key) {}
  void ensure(std::size_t n);
  std::size_t size() const { return slots_.size(); }

  struct Slot {
    Rng engine;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> uniform{0.0, 1.0};
  };
  Slot& operator[](std::size_t l) { return slots_[l]; }

 private:
  std::uint64_t key_;
  std::vector<Slot> slots_;
};

/// Full genealogy of one filter run. Index (t, l) is slot l at time t; ancestor(t, l)
/// names the slot at t-1 it descends from.
struct ParticleSystem {
  std::size_t T = 0;
  std::size_t N = 0;
  std::vector<Point2> X;
  std::vector<Regime> S;
  std::vector<std::uint32_t> ancestors;  // entries for t = 0 are unused
  std::vector<double> final_weights;
  std::vector<double> ess;  // after each step's reweighting

  const Point2& x(std::size_t t, std::size_t l) const { return X[t * N + l]; }
  Regime s(std::size_t t, std::size_t l) const { return S[t * N + l]; }
  std::uint32_t ancestor(std::size_t t, std::size_t l) const { return ancestors[t * N + l]; }

  /// Path x_{1:t+1}, s_{1:t+1} ending at slot l of time t.
  LatentTrajectory path(std::size_t t, std::size_t l) const;
};

struct PgasDiagnostics {
  double min_ess = 0.0;
  double mean_ess = 0.0;
};

struct PgasResult {
  LatentTrajectory path;
  PgasDiagnostics diagnostics;
};

/// Bootstrap particle filter with multinomial resampling at every step and no
/// reference trajectory; returns one path drawn by the final weights. The chain built
/// on it targets the smoothing distribution only approximately.
class PgasSampler {
 public:
  PgasSampler(std::size_t n_particles, std::uint64_t stream_key, Execution exec = Execution::parallel);

  PgasResult sample(const ObservationSeries& obs, const ModelParams& params, Rng& rng);

  const ParticleSystem& system() const { return sys_; }
  std::size_t n_particles() const { return n_; }

 private:
  void initialize(const ObservationSeries& obs, const ModelParams& params);
  void propagate(std::size_t t, const ObservationSeries& obs, const ModelParams& params,
                 const ObservationModel& om);
  void reweight(std::size_t t);

  std::size_t n_;
  Execution exec_;
  ParticleStreams streams_;
  ParticleSystem sys_;
  std::vector<double> logw_;
  std::vector<double> cdf_;
};

/// Convenience wrapper: fresh streams keyed from `rng`.
LatentTrajectory pgas_sample(const ObservationSeries& obs, const ModelParams& params, std::size_t n_particles,
                             Rng& rng, Execution exec = Execution::parallel);

}  // namespace trajsmooth
