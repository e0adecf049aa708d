#include "trajsmooth/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trajsmooth {

namespace {

bool selected(const TimeMask& mask, std::size_t t) { return mask.empty() || mask[t] != 0; }

void check_lengths(std::size_t a, std::size_t b, const TimeMask& mask, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": length mismatch");
  if (!mask.empty() && mask.size() != a) throw std::invalid_argument(std::string(who) + ": mask length mismatch");
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double rmsd(const std::vector<Point2>& est, const std::vector<Point2>& truth, const TimeMask& mask) {
  check_lengths(est.size(), truth.size(), mask, "rmsd");
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < est.size(); ++t) {
    if (!selected(mask, t)) continue;
    ss += squared_norm(est[t] - truth[t]);
    ++n;
  }
  if (n == 0) throw std::domain_error("rmsd: empty time selection");
  return std::sqrt(ss / static_cast<double>(n));
}

double misclassification(const std::vector<Regime>& est, const std::vector<Regime>& truth, const TimeMask& mask) {
  check_lengths(est.size(), truth.size(), mask, "misclassification");
  std::size_t wrong = 0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < est.size(); ++t) {
    if (!selected(mask, t)) continue;
    wrong += est[t] != truth[t];
    ++n;
  }
  if (n == 0) throw std::domain_error("misclassification: empty time selection");
  return static_cast<double>(wrong) / static_cast<double>(n);
}

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) throw std::domain_error("geometric_mean: no values");
  double acc = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::domain_error("geometric_mean: values must be positive");
    acc += std::log(v);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

const char* to_string(Split s) {
  switch (s) {
    case Split::total: return "total";
    case Split::missing: return "missing";
    case Split::observed: return "observed";
  }
  return "?";
}

const char* to_string(Method m) { return m == Method::binning ? "binning" : "smoother"; }

Method method_from_string(const std::string& s) {
  if (s == "binning") return Method::binning;
  if (s == "smoother") return Method::smoother;
  throw std::invalid_argument("unknown method '" + s + "' (expected binning or smoother)");
}

RunMetrics score_run(const std::vector<Point2>& X_est, const std::vector<Regime>& S_est,
                     const LatentTrajectory& truth, const ObservationSeries& obs) {
  RunMetrics m;
  const auto z = obs.indicators();
  TimeMask missing(z.size());
  for (std::size_t t = 0; t < z.size(); ++t) missing[t] = !z[t];
  const std::array<TimeMask, 3> masks{TimeMask{}, missing, z};
  for (Split s : kSplits) {
    const auto i = static_cast<std::size_t>(s);
    try {
      m.rmsd[i] = rmsd(X_est, truth.X, masks[i]);
      m.misclassification[i] = misclassification(S_est, truth.S, masks[i]);
    } catch (const std::domain_error&) {
      m.rmsd[i] = kNaN;
      m.misclassification[i] = kNaN;
    }
  }
  m.realized_missing_fraction = missing_fraction(obs);
  return m;
}

BenchmarkSummary summarize_benchmark(const std::vector<std::pair<RunMetrics, RunMetrics>>& pairs) {
  BenchmarkSummary out;
  for (Split s : kSplits) {
    const auto i = static_cast<std::size_t>(s);
    std::vector<double> ratios;
    double diff = 0.0;
    std::size_t n_diff = 0;
    for (const auto& [a, b] : pairs) {
      if (a.aborted || b.aborted) continue;
      if (std::isnan(a.rmsd[i]) || std::isnan(b.rmsd[i])) continue;
      if (a.rmsd[i] == b.rmsd[i]) {
        ratios.push_back(1.0);
      } else {
        ratios.push_back(a.rmsd[i] / b.rmsd[i]);
      }
      diff += a.misclassification[i] - b.misclassification[i];
      ++n_diff;
    }
    out.geo_mean_rmsd_ratio[i] = ratios.empty() ? kNaN : geometric_mean(ratios);
    out.mean_misclass_diff[i] = n_diff ? diff / static_cast<double>(n_diff) : kNaN;
  }
  for (const auto& [a, b] : pairs) {
    if (a.aborted || b.aborted) ++out.n_excluded;
    else ++out.n_datasets;
  }
  return out;
}

MethodOutput run_method(Method m, const SimulatedDataset& ds, const EvaluationConfig& cfg) {
  MethodOutput out;
  if (m == Method::binning) {
    const auto seg = run_binning(interpolate_gaps(ds.obs), cfg.binning);
    out.X_est = seg.X_est;
    out.S_est = binning_to_labels(seg);
    return out;
  }
  MgsConfig mc = cfg.sampler;
  mc.seed = derive_seed(ds.seed, 0x736d6f6f7468ULL);
  auto res = run_mgs(ds.obs, cfg.priors, mc);
  out.X_est = res.summary.mean;
  out.S_est = classify_regimes(res.summary, cfg.threshold);
  out.posterior = std::move(res.summary);
  out.report = std::move(res.report);
  return out;
}

std::vector<DatasetEvaluation> evaluate_datasets(const std::vector<SimulatedDataset>& datasets,
                                                 const EvaluationConfig& cfg) {
  std::vector<DatasetEvaluation> out(datasets.size());
  const auto n = static_cast<std::ptrdiff_t>(datasets.size());
  const int workers = static_cast<int>(std::max<std::size_t>(cfg.workers, 1));
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& ds = datasets[idx];
    RunMetrics results[2];
    for (int j = 0; j < 2; ++j) {
      const Method m = cfg.methods[static_cast<std::size_t>(j)];
      try {
        auto mo = run_method(m, ds, cfg);
        results[j] = score_run(mo.X_est, mo.S_est, ds.truth, ds.obs);
        if (mo.posterior && !out[idx].posterior) out[idx].posterior = std::move(mo.posterior);
      } catch (const std::exception& e) {
        results[j].aborted = true;
        results[j].error = e.what();
        results[j].realized_missing_fraction = missing_fraction(ds.obs);
      }
      results[j].method = to_string(m);
      results[j].seed = ds.seed;
      results[j].dataset = idx;
    }
    out[idx].metrics = {results[0], results[1]};
  }
  return out;
}

BenchmarkResult run_benchmark(std::size_t n, const SimulationConfig& sim, const EvaluationConfig& cfg,
                              std::uint64_t base_seed) {
  if (n < 1) throw std::invalid_argument("run_benchmark: need at least one dataset");
  BenchmarkResult out;
  out.datasets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.datasets[i] = simulate_dataset(sim.truth, sim.missingness, sim.T, derive_seed(base_seed, i));
  }
  out.runs = evaluate_datasets(out.datasets, cfg);
  std::vector<std::pair<RunMetrics, RunMetrics>> pairs;
  pairs.reserve(n);
  for (const auto& r : out.runs) pairs.push_back(r.metrics);
  out.summary = summarize_benchmark(pairs);
  return out;
}

}  // namespace trajsmooth
