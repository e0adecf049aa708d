#include "trajsmooth/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trajsmooth/io.hpp"

namespace trajsmooth {

using nlohmann::json;

namespace {

json beta(const BetaPrior& p) { return {{"a", p.a}, {"b", p.b}}; }
json inv_gamma(const InverseGammaPrior& p) { return {{"shape", p.shape}, {"scale", p.scale}}; }
json trunc_chi2(const TruncatedChiSquaredPrior& p) { return {{"df", p.df}, {"lower", p.lower}}; }

BetaPrior beta_from(const json& j) { return {j.at("a").get<double>(), j.at("b").get<double>()}; }
InverseGammaPrior inv_gamma_from(const json& j) {
  return {j.at("shape").get<double>(), j.at("scale").get<double>()};
}
TruncatedChiSquaredPrior trunc_chi2_from(const json& j) {
  return {j.at("df").get<double>(), j.at("lower").get<double>()};
}

void reject_unknown(const json& given, const json& reference, const std::string& path) {
  if (!given.is_object()) {
    if (reference.is_object()) throw std::invalid_argument("config: '" + path + "' must be an object");
    return;
  }
  if (!reference.is_object()) throw std::invalid_argument("config: '" + path + "' must not be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string sub = path.empty() ? key : path + "." + key;
    const auto it = reference.find(key);
    if (it == reference.end()) throw std::invalid_argument("config: unknown key '" + sub + "'");
    reject_unknown(value, *it, sub);
  }
}

std::size_t count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(std::string("config: '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

json to_json(const ModelParams& p) {
  return {{"alpha_ff", p.alpha_ff}, {"alpha_pp", p.alpha_pp}, {"rho", p.rho},   {"sigma2_p", p.sigma2_p},
          {"pi_big", p.pi_big},     {"k", p.k},               {"tau2_s", p.tau2_s}, {"c", p.c}};
}

ModelParams model_params_from_json(const json& j) {
  ModelParams p;
  p.alpha_ff = j.at("alpha_ff").get<double>();
  p.alpha_pp = j.at("alpha_pp").get<double>();
  p.rho = j.at("rho").get<double>();
  p.sigma2_p = j.at("sigma2_p").get<double>();
  p.pi_big = j.at("pi_big").get<double>();
  p.k = j.at("k").get<double>();
  p.tau2_s = j.at("tau2_s").get<double>();
  p.c = j.at("c").get<double>();
  return p;
}

json to_json(const PriorSpec& p) {
  return {{"alpha_ff", beta(p.alpha_ff)},
          {"alpha_pp", beta(p.alpha_pp)},
          {"rho", {{"lo", p.rho.lo}, {"hi", p.rho.hi}}},
          {"flight_variance_ratio", trunc_chi2(p.flight_variance_ratio)},
          {"sigma2_p", inv_gamma(p.sigma2_p)},
          {"pi_big", beta(p.pi_big)},
          {"tau2_s", inv_gamma(p.tau2_s)},
          {"c", trunc_chi2(p.c)}};
}

json to_json(const MissingnessParams& m) {
  return {{"stay_missing", m.stay_missing}, {"stay_observed", m.stay_observed}};
}

json to_json(const MgsReport& r) {
  auto ess_summary = [](const std::vector<double>& v) {
    if (v.empty()) return json{{"min", nullptr}, {"mean", nullptr}, {"max", nullptr}};
    double sum = 0.0;
    for (double x : v) sum += x;
    return json{{"min", *std::min_element(v.begin(), v.end())},
                {"mean", sum / static_cast<double>(v.size())},
                {"max", *std::max_element(v.begin(), v.end())}};
  };
  return {{"acceptance", {{"rho", r.acceptance_rho}, {"k", r.acceptance_k}, {"c", r.acceptance_c}}},
          {"step_size", {{"rho", r.step_rho}, {"k", r.step_k}, {"c", r.step_c}}},
          {"ess", {{"per_iteration_mean", ess_summary(r.mean_ess)}, {"per_iteration_min", ess_summary(r.min_ess)}}},
          {"collapse_retries", r.collapse_retries},
          {"wall_seconds", r.wall_seconds}};
}

json to_json(const RunMetrics& m) {
  json j{{"method", m.method}, {"seed", m.seed}, {"dataset", m.dataset},
         {"realized_missing_fraction", m.realized_missing_fraction}, {"aborted", m.aborted}};
  for (Split s : kSplits) {
    const auto i = static_cast<std::size_t>(s);
    j[std::string("rmsd_") + to_string(s)] = m.rmsd[i];
    j[std::string("misclass_") + to_string(s)] = m.misclassification[i];
  }
  if (m.aborted) j["error"] = m.error;
  return j;
}

json to_json(const BenchmarkSummary& s) {
  json j{{"n_datasets", s.n_datasets}, {"n_excluded", s.n_excluded}};
  for (Split sp : kSplits) {
    const auto i = static_cast<std::size_t>(sp);
    j["rmsd_ratio"][to_string(sp)] = s.geo_mean_rmsd_ratio[i];
    j["misclass_diff"][to_string(sp)] = s.mean_misclass_diff[i];
  }
  return j;
}

json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"workers", c.workers},
          {"T", c.T},
          {"n_datasets", c.n_datasets},
          {"threshold", c.threshold},
          {"timezone_offset_minutes", c.timezone_offset_minutes},
          {"output_dir", c.output_dir},
          {"priors", to_json(c.priors)},
          {"truth", to_json(c.truth)},
          {"missingness", to_json(c.missingness)},
          {"binning", {{"Omega", c.binning.Omega}, {"omega", c.binning.omega}}},
          {"sampler",
           {{"n_particles", c.n_particles},
            {"n_samples", c.n_samples},
            {"burn_in", c.burn_in},
            {"credible_level", c.credible_level},
            {"update_params", c.update_params},
            {"adapt_interval", c.adapt_interval}}},
          {"plot", {{"width", c.plot.width}, {"height", c.plot.height}, {"max_draws", c.plot.max_draws}}}};
}

RunConfig run_config_from_json(const json& given) {
  const json defaults = to_json(RunConfig{});
  reject_unknown(given, defaults, "");
  json j = defaults;
  j.merge_patch(given);

  RunConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.workers = count(j, "workers");
    c.T = count(j, "T");
    c.n_datasets = count(j, "n_datasets");
    c.threshold = j.at("threshold").get<double>();
    c.timezone_offset_minutes = j.at("timezone_offset_minutes").get<std::int64_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    const auto& p = j.at("priors");
    c.priors.alpha_ff = beta_from(p.at("alpha_ff"));
    c.priors.alpha_pp = beta_from(p.at("alpha_pp"));
    c.priors.rho = {p.at("rho").at("lo").get<double>(), p.at("rho").at("hi").get<double>()};
    c.priors.flight_variance_ratio = trunc_chi2_from(p.at("flight_variance_ratio"));
    c.priors.sigma2_p = inv_gamma_from(p.at("sigma2_p"));
    c.priors.pi_big = beta_from(p.at("pi_big"));
    c.priors.tau2_s = inv_gamma_from(p.at("tau2_s"));
    c.priors.c = trunc_chi2_from(p.at("c"));
    c.truth = model_params_from_json(j.at("truth"));
    c.missingness.stay_missing = j.at("missingness").at("stay_missing").get<double>();
    c.missingness.stay_observed = j.at("missingness").at("stay_observed").get<double>();
    c.binning.Omega = j.at("binning").at("Omega").get<double>();
    c.binning.omega = j.at("binning").at("omega").get<double>();
    const auto& s = j.at("sampler");
    c.n_particles = count(s, "n_particles");
    c.n_samples = count(s, "n_samples");
    c.burn_in = count(s, "burn_in");
    c.credible_level = s.at("credible_level").get<double>();
    c.update_params = s.at("update_params").get<bool>();
    c.adapt_interval = count(s, "adapt_interval");
    c.plot.width = j.at("plot").at("width").get<double>();
    c.plot.height = j.at("plot").at("height").get<double>();
    c.plot.max_draws = count(j.at("plot"), "max_draws");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(priors.valid(), "prior hyperparameters must be positive");
  require(truth.in_support(), "true parameters outside the parameter space");
  require(missingness.stay_missing > 0.0 && missingness.stay_missing < 1.0 && missingness.stay_observed > 0.0 &&
              missingness.stay_observed < 1.0,
          "missingness probabilities must lie in (0, 1)");
  require(binning.valid(), "binning needs Omega > 1 and omega > 0");
  require(T >= 4, "T must be at least 4");
  require(n_particles >= 2, "sampler.n_particles must be at least 2");
  require(n_samples > burn_in, "sampler.n_samples must exceed sampler.burn_in");
  require(credible_level > 0.0 && credible_level < 1.0, "sampler.credible_level must lie in (0, 1)");
  require(threshold >= 0.0 && threshold <= 1.0, "threshold must lie in [0, 1]");
  require(workers >= 1, "workers must be at least 1");
  require(adapt_interval >= 1, "sampler.adapt_interval must be at least 1");
  require(plot.width > 0.0 && plot.height > 0.0, "plot dimensions must be positive");
}

MgsConfig RunConfig::sampler_config() const {
  MgsConfig m;
  m.n_samples = n_samples;
  m.burn_in = burn_in;
  m.n_particles = n_particles;
  m.seed = seed;
  m.credible_level = credible_level;
  m.update_params = update_params;
  m.adapt_interval = adapt_interval;
  return m;
}

EvaluationConfig RunConfig::evaluation_config() const {
  EvaluationConfig e;
  e.binning = binning;
  e.sampler = sampler_config();
  e.priors = priors;
  e.threshold = threshold;
  e.workers = workers;
  return e;
}

SimulationConfig RunConfig::simulation_config() const {
  SimulationConfig s;
  s.truth = truth;
  s.missingness = missingness;
  s.T = T;
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace trajsmooth
