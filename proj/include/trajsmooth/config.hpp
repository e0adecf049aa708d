#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "trajsmooth/binning.hpp"
#include "trajsmooth/gibbs.hpp"
#include "trajsmooth/metrics.hpp"
#include "trajsmooth/simulator.hpp"

namespace trajsmooth {

struct PlotOptions {
  double width = 900.0;
  double height = 560.0;
  std::size_t max_draws = 40;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t T = 1440;
  std::size_t n_datasets = 50;
  double threshold = 0.5;
  std::int64_t timezone_offset_minutes = 0;
  std::string output_dir = "out";
  PriorSpec priors;
  ModelParams truth = simulation_true_params();
  MissingnessParams missingness;
  BinningConfig binning;
  std::size_t n_particles = 500;
  std::size_t n_samples = 2000;
  std::size_t burn_in = 1000;
  double credible_level = 0.9;
  bool update_params = true;
  std::size_t adapt_interval = 50;
  PlotOptions plot;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  MgsConfig sampler_config() const;
  EvaluationConfig evaluation_config() const;
  SimulationConfig simulation_config() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Values missing from `j` keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PriorSpec& p);
nlohmann::json to_json(const MissingnessParams& m);
nlohmann::json to_json(const MgsReport& r);
nlohmann::json to_json(const RunMetrics& m);
nlohmann::json to_json(const BenchmarkSummary& s);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace trajsmooth
