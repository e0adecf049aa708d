#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajsmooth/binning.hpp"
#include "trajsmooth/gibbs.hpp"
#include "trajsmooth/simulator.hpp"

namespace trajsmooth {

/// Time subset: 1 = selected. An empty mask selects every time step.
using TimeMask = std::vector<std::uint8_t>;

/// Root mean squared Euclidean distance. Throws std::domain_error on an empty selection.
double rmsd(const std::vector<Point2>& est, const std::vector<Point2>& truth, const TimeMask& mask = {});

/// Fraction of selected time steps with mismatched regimes.
double misclassification(const std::vector<Regime>& est, const std::vector<Regime>& truth,
                         const TimeMask& mask = {});

/// exp(mean(log v)); every value must be positive.
double geometric_mean(const std::vector<double>& values);

enum class Split { total = 0, missing = 1, observed = 2 };
inline constexpr std::array<Split, 3> kSplits{Split::total, Split::missing, Split::observed};
const char* to_string(Split s);

enum class Method { binning, smoother };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct RunMetrics {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t dataset = 0;
  std::array<double, 3> rmsd{};            // indexed by Split
  std::array<double, 3> misclassification{};
  double realized_missing_fraction = 0.0;
  bool aborted = false;
  std::string error;
};

/// Scores an estimate against ground truth; splits with no time steps yield NaN.
RunMetrics score_run(const std::vector<Point2>& X_est, const std::vector<Regime>& S_est,
                     const LatentTrajectory& truth, const ObservationSeries& obs);

struct BenchmarkSummary {
  std::array<double, 3> geo_mean_rmsd_ratio{};  // first method over second
  std::array<double, 3> mean_misclass_diff{};   // first minus second
  std::size_t n_datasets = 0;
  std::size_t n_excluded = 0;
};

/// Geometric mean of RMSD ratios and arithmetic mean of misclassification differences over
/// pairs where neither run aborted. Splits with an undefined value in some pair skip that pair.
BenchmarkSummary summarize_benchmark(const std::vector<std::pair<RunMetrics, RunMetrics>>& pairs);

/// Output of one processing method on one dataset.
struct MethodOutput {
  std::vector<Point2> X_est;
  std::vector<Regime> S_est;
  std::optional<PosteriorSummary> posterior;  // smoother only
  std::optional<MgsReport> report;
};

struct EvaluationConfig {
  BinningConfig binning;
  MgsConfig sampler;
  PriorSpec priors;
  double threshold = 0.5;
  std::array<Method, 2> methods{Method::binning, Method::smoother};
  std::size_t workers = 1;
};

MethodOutput run_method(Method m, const SimulatedDataset& ds, const EvaluationConfig& cfg);

struct DatasetEvaluation {
  std::pair<RunMetrics, RunMetrics> metrics;
  std::optional<PosteriorSummary> posterior;  // of the smoother, when it ran
};

/// Runs both methods on every dataset (dataset-level parallelism over `workers`).
std::vector<DatasetEvaluation> evaluate_datasets(const std::vector<SimulatedDataset>& datasets,
                                                 const EvaluationConfig& cfg);

struct SimulationConfig {
  ModelParams truth = simulation_true_params();
  MissingnessParams missingness;
  std::size_t T = 1440;
};

struct BenchmarkResult {
  std::vector<SimulatedDataset> datasets;
  std::vector<DatasetEvaluation> runs;
  BenchmarkSummary summary;
};

/// Simulates n datasets with seeds derived from base_seed and evaluates both methods.
BenchmarkResult run_benchmark(std::size_t n, const SimulationConfig& sim, const EvaluationConfig& cfg,
                              std::uint64_t base_seed);

}  // namespace trajsmooth
