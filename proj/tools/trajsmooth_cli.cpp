#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "trajsmooth/config.hpp"
#include "trajsmooth/io.hpp"
#include "trajsmooth/metrics.hpp"
#include "trajsmooth/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trajsmooth;

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c, bool with_workers) {
  cmd->add_option("--config", c.config_path, "JSON run-config file (defaults apply to missing keys)")
      ->check(CLI::ExistingFile);
  c.seed_opt = cmd->add_option("--seed", c.seed, "Random seed");
  if (with_workers) {
    c.workers_opt = cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  }
}

RunConfig base_config(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
  if (c.seed_opt && c.seed_opt->count()) cfg.seed = c.seed;
  if (c.workers_opt && c.workers_opt->count()) cfg.workers = c.workers;
  return cfg;
}

template <class T>
void override_if(CLI::Option* opt, T& field, const T& value) {
  if (opt && opt->count()) field = value;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream out;
  writer(out);
  write_text_file(path.string(), out.str());
}

template <class Reader>
auto read_file(const std::string& path, Reader&& reader) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return reader(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    out.push_back(ok ? ch : '_');
  }
  return out.empty() ? "_" : out;
}

std::string dataset_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dataset_%03zu", i);
  return buf;
}

// ---- preprocess ---------------------------------------------------------------------------

struct PreprocessArgs {
  Common common;
  std::string input;
  std::string out_dir;
  std::int64_t tz_minutes = 0;
  CLI::Option* tz_opt = nullptr;
};

void cmd_preprocess(const PreprocessArgs& a) {
  RunConfig cfg = base_config(a.common);
  override_if(a.tz_opt, cfg.timezone_offset_minutes, a.tz_minutes);
  const auto raw = read_file(a.input, [](std::istream& in) { return read_raw_fixes(in); });
  for (const auto& w : raw.warnings) std::cerr << "warning: line " << w.line << ": " << w.message << "\n";
  if (raw.fixes.empty()) throw std::runtime_error("no valid fixes in '" + a.input + "'");
  const auto days = preprocess_fixes(raw.fixes, cfg.timezone_offset_minutes * 60, cfg.seed);

  fs::create_directories(a.out_dir);
  json outputs = json::array();
  for (const auto& pd : days) {
    const std::string name = safe_name(pd.person_id) + "_" + pd.date + ".csv";
    write_file(fs::path(a.out_dir) / name, [&](std::ostream& o) { write_observations(o, pd.obs); });
    outputs.push_back({{"person_id", pd.person_id},
                       {"date", pd.date},
                       {"file", name},
                       {"n_fixes", pd.n_fixes},
                       {"observed_minutes", pd.obs.observed_count()}});
  }
  json warnings = json::array();
  for (const auto& w : raw.warnings) warnings.push_back({{"line", w.line}, {"message", w.message}});
  const json manifest{{"input", a.input},
                      {"seed", cfg.seed},
                      {"timezone_offset_minutes", cfg.timezone_offset_minutes},
                      {"n_warnings", raw.warnings.size()},
                      {"warnings", warnings},
                      {"outputs", outputs}};
  write_text_file((fs::path(a.out_dir) / "preprocess_manifest.json").string(), dump(manifest));
  std::cout << json{{"status", "ok"}, {"person_days", days.size()}, {"n_warnings", raw.warnings.size()}}.dump()
            << "\n";
}

// ---- simulate -------------------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string out_dir;
  std::size_t n = 0;
  std::size_t T = 0;
  CLI::Option* n_opt = nullptr;
  CLI::Option* T_opt = nullptr;
};

void cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg = base_config(a.common);
  override_if(a.n_opt, cfg.n_datasets, a.n);
  override_if(a.T_opt, cfg.T, a.T);
  cfg.validate();
  if (cfg.n_datasets == 0) throw std::invalid_argument("simulate: need at least one dataset");
  fs::create_directories(a.out_dir);
  const auto sim = cfg.simulation_config();
  json datasets = json::array();
  for (std::size_t i = 0; i < cfg.n_datasets; ++i) {
    const std::uint64_t seed = derive_seed(cfg.seed, i);
    const auto ds = simulate_dataset(sim.truth, sim.missingness, sim.T, seed);
    const std::string stem = dataset_stem(i);
    write_file(fs::path(a.out_dir) / (stem + "_obs.csv"), [&](std::ostream& o) { write_observations(o, ds.obs); });
    write_file(fs::path(a.out_dir) / (stem + "_truth.csv"), [&](std::ostream& o) { write_truth(o, ds.truth); });
    datasets.push_back({{"index", i},
                        {"seed", seed},
                        {"observations", stem + "_obs.csv"},
                        {"truth", stem + "_truth.csv"},
                        {"realized_missing_fraction", missing_fraction(ds.obs)}});
  }
  const json manifest{{"base_seed", cfg.seed},
                      {"T", cfg.T},
                      {"n_datasets", cfg.n_datasets},
                      {"truth", to_json(cfg.truth)},
                      {"missingness", to_json(cfg.missingness)},
                      {"datasets", datasets}};
  write_text_file((fs::path(a.out_dir) / "manifest.json").string(), dump(manifest));
  std::cout << json{{"status", "ok"}, {"datasets", cfg.n_datasets}}.dump() << "\n";
}

// ---- bin ------------------------------------------------------------------------------------

struct BinArgs {
  Common common;
  std::string input;
  std::string output;
  std::string report;
  double Omega = 0.0;
  double omega = 0.0;
  CLI::Option* Omega_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
};

void cmd_bin(const BinArgs& a) {
  RunConfig cfg = base_config(a.common);
  override_if(a.Omega_opt, cfg.binning.Omega, a.Omega);
  override_if(a.omega_opt, cfg.binning.omega, a.omega);
  cfg.validate();
  const auto obs = read_file(a.input, [](std::istream& in) { return read_observations(in); });
  const auto seg = run_binning(interpolate_gaps(obs), cfg.binning);
  write_file(a.output, [&](std::ostream& o) { write_segmentation(o, seg); });
  json starts = json::array();
  for (auto s : seg.start_times) starts.push_back(s + 1);
  const json summary{{"status", "ok"},
                     {"T", obs.size()},
                     {"bins", seg.bins.size()},
                     {"stable_bins", seg.stable_count()},
                     {"momentary_bins", seg.momentary_count()},
                     {"Omega", cfg.binning.Omega},
                     {"omega", cfg.binning.omega},
                     {"start_times", starts}};
  if (!a.report.empty()) write_file(a.report, [&](std::ostream& o) { o << dump(summary); });
  json brief = summary;
  brief.erase("start_times");
  std::cout << brief.dump() << "\n";
}

// ---- smooth ---------------------------------------------------------------------------------

struct SmoothArgs {
  Common common;
  std::string input;
  std::string summary;
  std::string report;
  std::string draws;
  std::size_t particles = 0, samples = 0, burn_in = 0;
  double threshold = 0.5;
  CLI::Option *particles_opt = nullptr, *samples_opt = nullptr, *burn_opt = nullptr, *threshold_opt = nullptr;
};

void cmd_smooth(const SmoothArgs& a) {
  RunConfig cfg = base_config(a.common);
  override_if(a.particles_opt, cfg.n_particles, a.particles);
  override_if(a.samples_opt, cfg.n_samples, a.samples);
  override_if(a.burn_opt, cfg.burn_in, a.burn_in);
  override_if(a.threshold_opt, cfg.threshold, a.threshold);
  cfg.validate();
  const auto obs = read_file(a.input, [](std::istream& in) { return read_observations(in); });
  omp_set_num_threads(static_cast<int>(cfg.workers));
  const MgsConfig mc = cfg.sampler_config();
  const auto res = run_mgs(obs, cfg.priors, mc);
  write_file(a.summary, [&](std::ostream& o) { write_summary(o, res.summary); });
  if (!a.draws.empty()) write_file(a.draws, [&](std::ostream& o) { write_draws(o, res.draws); });

  ModelParams mean{0, 0, 0, 0, 0, 0, 0, 0};
  for (const auto& d : res.draws) {
    mean.alpha_ff += d.params.alpha_ff;
    mean.alpha_pp += d.params.alpha_pp;
    mean.rho += d.params.rho;
    mean.sigma2_p += d.params.sigma2_p;
    mean.pi_big += d.params.pi_big;
    mean.k += d.params.k;
    mean.tau2_s += d.params.tau2_s;
    mean.c += d.params.c;
  }
  const double n = static_cast<double>(res.draws.size());
  for (double* v : {&mean.alpha_ff, &mean.alpha_pp, &mean.rho, &mean.sigma2_p, &mean.pi_big, &mean.k, &mean.tau2_s,
                    &mean.c}) {
    *v /= n;
  }
  const auto labels = classify_regimes(res.summary, cfg.threshold);
  std::size_t flights = 0;
  for (auto s : labels) flights += s == Regime::flight;
  const json report{{"input", a.input},
                    {"T", obs.size()},
                    {"observed", obs.observed_count()},
                    {"seed", cfg.seed},
                    {"n_particles", cfg.n_particles},
                    {"n_samples", cfg.n_samples},
                    {"burn_in", cfg.burn_in},
                    {"retained_draws", res.draws.size()},
                    {"threshold", cfg.threshold},
                    {"flight_minutes", flights},
                    {"posterior_mean_params", to_json(mean)},
                    {"sampler", to_json(res.report)},
                    {"config", to_json(cfg)}};
  if (!a.report.empty()) write_file(a.report, [&](std::ostream& o) { o << dump(report); });
  std::cout << json{{"status", "ok"},
                    {"retained_draws", res.draws.size()},
                    {"collapse_retries", res.report.collapse_retries}}
                   .dump()
            << "\n";
}

// ---- evaluate -------------------------------------------------------------------------------

struct EvaluateArgs {
  Common common;
  std::string manifest;
  std::string out_dir;
  std::vector<std::string> methods;
  std::size_t particles = 0, samples = 0, burn_in = 0;
  CLI::Option *particles_opt = nullptr, *samples_opt = nullptr, *burn_opt = nullptr;
};

void cmd_evaluate(const EvaluateArgs& a) {
  RunConfig cfg = base_config(a.common);
  override_if(a.particles_opt, cfg.n_particles, a.particles);
  override_if(a.samples_opt, cfg.n_samples, a.samples);
  override_if(a.burn_opt, cfg.burn_in, a.burn_in);
  cfg.validate();
  EvaluationConfig ec = cfg.evaluation_config();
  if (!a.methods.empty()) {
    if (a.methods.size() != 2) throw std::invalid_argument("--methods takes exactly two names");
    ec.methods = {method_from_string(a.methods[0]), method_from_string(a.methods[1])};
  }
  const json manifest = json::parse(read_text_file(a.manifest));
  const fs::path dir = fs::path(a.manifest).parent_path();
  std::vector<SimulatedDataset> datasets;
  for (const auto& entry : manifest.at("datasets")) {
    SimulatedDataset ds;
    ds.seed = entry.at("seed").get<std::uint64_t>();
    ds.obs = read_file((dir / entry.at("observations").get<std::string>()).string(),
                       [](std::istream& in) { return read_observations(in); });
    ds.truth = read_file((dir / entry.at("truth").get<std::string>()).string(),
                         [](std::istream& in) { return read_truth(in); });
    if (ds.truth.size() != ds.obs.size()) throw std::runtime_error("truth and observations differ in length");
    if (manifest.contains("truth")) ds.params_used = model_params_from_json(manifest.at("truth"));
    datasets.push_back(std::move(ds));
  }
  if (datasets.empty()) throw std::runtime_error("manifest lists no datasets");

  const auto runs = evaluate_datasets(datasets, ec);
  std::vector<std::pair<RunMetrics, RunMetrics>> pairs;
  for (const auto& r : runs) pairs.push_back(r.metrics);
  const auto summary = summarize_benchmark(pairs);

  fs::create_directories(a.out_dir);
  write_file(fs::path(a.out_dir) / "per_run.csv", [&](std::ostream& o) { write_per_run(o, pairs); });
  write_file(fs::path(a.out_dir) / "summary.csv",
             [&](std::ostream& o) { write_benchmark_summary(o, summary, ec.methods); });
  json seeds = json::array();
  for (const auto& ds : datasets) seeds.push_back(ds.seed);
  const json out{{"manifest", a.manifest},
                 {"methods", {to_string(ec.methods[0]), to_string(ec.methods[1])}},
                 {"dataset_seeds", seeds},
                 {"summary", to_json(summary)},
                 {"config", to_json(cfg)}};
  write_text_file((fs::path(a.out_dir) / "evaluation_manifest.json").string(), dump(out));
  std::cout << json{{"status", "ok"}, {"summary", to_json(summary)}}.dump() << "\n";
}

// ---- plot -----------------------------------------------------------------------------------

struct PlotArgs {
  Common common;
  std::string summary, segmentation, observations, draws, output;
};

void cmd_plot(const PlotArgs& a) {
  const RunConfig cfg = base_config(a.common);
  ObservationSeries obs;
  if (!a.observations.empty()) {
    obs = read_file(a.observations, [](std::istream& in) { return read_observations(in); });
  }
  std::vector<LatentTrajectory> draws;
  if (!a.draws.empty()) draws = read_file(a.draws, [](std::istream& in) { return read_draws(in); }).draws;
  std::string svg;
  if (!a.summary.empty()) {
    const auto s = read_file(a.summary, [](std::istream& in) { return read_summary(in); });
    if (!a.segmentation.empty()) {
      const auto seg = read_file(a.segmentation, [](std::istream& in) { return read_segmentation(in); });
      svg = plot_comparison_svg(obs, seg, s, draws, cfg.plot);
    } else {
      svg = plot_smoother_svg(obs, s, draws, cfg.plot);
    }
  } else if (!a.segmentation.empty()) {
    const auto seg = read_file(a.segmentation, [](std::istream& in) { return read_segmentation(in); });
    svg = plot_segmentation_svg(obs, seg, cfg.plot);
  } else {
    throw std::invalid_argument("plot: give --summary and/or --segmentation");
  }
  write_file(a.output, [&](std::ostream& o) { o << svg; });
  std::cout << json{{"status", "ok"}, {"output", a.output}}.dump() << "\n";
}

void print_error(const std::string& command, const std::string& message) {
  std::cerr << json{{"status", "error"}, {"command", command}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory smoothing and segmentation of intermittent position series"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-default-config", print_config, "Print the full default run config as JSON");

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Raw fixes to per-person-day observation CSVs");
  add_common(c_pre, pre.common, false);
  c_pre->add_option("--input", pre.input, "Raw-fix CSV (person_id,timestamp,lat,lon)")->required();
  c_pre->add_option("--out-dir", pre.out_dir, "Output directory")->required();
  pre.tz_opt = c_pre->add_option("--tz-offset-minutes", pre.tz_minutes, "Local time offset from UTC");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate datasets from the model");
  add_common(c_sim, sim.common, false);
  c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  sim.n_opt = c_sim->add_option("--n", sim.n, "Number of datasets");
  sim.T_opt = c_sim->add_option("--T", sim.T, "Time steps per dataset");

  BinArgs bin;
  auto* c_bin = app.add_subcommand("bin", "Convex-hull binning segmentation");
  add_common(c_bin, bin.common, false);
  c_bin->add_option("--input", bin.input, "Observation CSV")->required();
  c_bin->add_option("--output", bin.output, "Segmentation CSV")->required();
  c_bin->add_option("--report", bin.report, "Optional JSON summary file");
  bin.Omega_opt = c_bin->add_option("--Omega", bin.Omega, "Area growth ratio closing a stable bin");
  bin.omega_opt = c_bin->add_option("--omega", bin.omega, "Travel threshold in km^2");

  SmoothArgs sm;
  auto* c_sm = app.add_subcommand("smooth", "Particle-Gibbs smoothing");
  add_common(c_sm, sm.common, true);
  c_sm->add_option("--input", sm.input, "Observation CSV")->required();
  c_sm->add_option("--summary", sm.summary, "Posterior summary CSV")->required();
  c_sm->add_option("--report", sm.report, "JSON run report");
  c_sm->add_option("--draws", sm.draws, "Retained-draw CSV (large)");
  sm.particles_opt = c_sm->add_option("--particles", sm.particles, "Particles per trajectory draw");
  sm.samples_opt = c_sm->add_option("--samples", sm.samples, "Gibbs iterations");
  sm.burn_opt = c_sm->add_option("--burn-in", sm.burn_in, "Discarded iterations");
  sm.threshold_opt = c_sm->add_option("--threshold", sm.threshold, "Motion-probability threshold for labels");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score both methods on simulated datasets");
  add_common(c_ev, ev.common, true);
  c_ev->add_option("--manifest", ev.manifest, "manifest.json written by simulate")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--out-dir", ev.out_dir, "Output directory")->required();
  c_ev->add_option("--methods", ev.methods, "Two methods compared as first/second")->delimiter(',');
  ev.particles_opt = c_ev->add_option("--particles", ev.particles, "Particles per trajectory draw");
  ev.samples_opt = c_ev->add_option("--samples", ev.samples, "Gibbs iterations");
  ev.burn_opt = c_ev->add_option("--burn-in", ev.burn_in, "Discarded iterations");

  PlotArgs pl;
  auto* c_pl = app.add_subcommand("plot", "SVG figures");
  add_common(c_pl, pl.common, false);
  c_pl->add_option("--summary", pl.summary, "Posterior summary CSV");
  c_pl->add_option("--segmentation", pl.segmentation, "Segmentation CSV");
  c_pl->add_option("--observations", pl.observations, "Observation CSV");
  c_pl->add_option("--draws", pl.draws, "Retained-draw CSV");
  c_pl->add_option("--output", pl.output, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("parse", e.what());
    return 2;
  }

  std::string command = "none";
  try {
    if (print_config) {
      std::cout << dump(to_json(RunConfig{}));
      return 0;
    }
    const std::pair<CLI::App*, std::function<void()>> commands[] = {
        {c_pre, [&] { cmd_preprocess(pre); }}, {c_sim, [&] { cmd_simulate(sim); }},
        {c_bin, [&] { cmd_bin(bin); }},        {c_sm, [&] { cmd_smooth(sm); }},
        {c_ev, [&] { cmd_evaluate(ev); }},     {c_pl, [&] { cmd_plot(pl); }}};
    for (const auto& [sub, run] : commands) {
      if (!sub->parsed()) continue;
      command = sub->get_name();
      run();
      return 0;
    }
    std::cerr << app.help();
    print_error(command, "no subcommand given");
    return 2;
  } catch (const std::exception& e) {
    print_error(command, e.what());
    return 1;
  }
  return 0;
}
