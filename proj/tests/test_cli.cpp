#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "trajsmooth/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using trajsmooth::read_text_file;

namespace {

const std::string kData = TEST_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("trajsmooth_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args) {
  static int counter = 0;
  const auto base = fs::temp_directory_path() / ("trajsmooth_cli_io_" + std::to_string(counter++));
  const std::string out = base.string() + ".out", err = base.string() + ".err";
  const std::string cmd = std::string(CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Result r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(out), read_text_file(err)};
  fs::remove(out);
  fs::remove(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

json last_json_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return json::parse(last);
}

}  // namespace

TEST_CASE("help and unknown flags") {
  const auto help = run("--help");
  CHECK(help.code == 0);
  for (const char* sub : {"preprocess", "simulate", "bin", "smooth", "evaluate", "plot"}) {
    CHECK(help.out.find(sub) != std::string::npos);
  }
  const auto sh = run("smooth --help");
  CHECK(sh.code == 0);
  for (const char* flag : {"--input", "--summary", "--report", "--draws", "--particles", "--samples", "--burn-in",
                           "--threshold", "--seed", "--config", "--workers"}) {
    CHECK(sh.out.find(flag) != std::string::npos);
  }
  const auto bad = run("bin --input x.csv --output y.csv --bogus 3");
  CHECK(bad.code != 0);
  CHECK(run("").code != 0);
}

TEST_CASE("default config template") {
  const auto r = run("--print-default-config");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["n_datasets"] == 50);
  CHECK(j["sampler"]["n_samples"] == 2000);
  CHECK(j["binning"]["Omega"] == 1.2);
}

TEST_CASE("bin reproduces the golden segmentations") {
  const auto dir = scratch("bin");
  for (const char* name : {"constant", "collinear", "two_cluster"}) {
    const auto out = dir / (std::string(name) + ".csv");
    const auto r = run("bin --input " + q(kData + "/fixtures/binning_" + name + "_obs.csv") + " --output " + q(out));
    REQUIRE(r.code == 0);
    CHECK(read_text_file(out.string()) == read_text_file(kData + "/golden/binning_" + name + "_seg.csv"));
  }
  const auto j = last_json_line(run("bin --input " + q(kData + "/fixtures/binning_constant_obs.csv") +
                                    " --output " + q(dir / "c.csv"))
                                    .out);
  CHECK(j["bins"] == 1);
  CHECK(j["stable_bins"] == 1);
}

TEST_CASE("preprocess") {
  const auto dir = scratch("pre");
  const auto r = run("preprocess --input " + q(kData + "/fixtures/raw_five_rows.csv") + " --out-dir " + q(dir));
  REQUIRE(r.code == 0);
  CHECK(read_text_file((dir / "p1_2024-03-05.csv").string()) ==
        read_text_file(kData + "/golden/preprocess_p1_2024-03-05.csv"));
  const auto first = read_text_file((dir / "p1_2024-03-05.csv").string());
  REQUIRE(run("preprocess --input " + q(kData + "/fixtures/raw_five_rows.csv") + " --out-dir " + q(dir)).code == 0);
  CHECK(read_text_file((dir / "p1_2024-03-05.csv").string()) == first);
  CHECK(fs::exists(dir / "preprocess_manifest.json"));

  const auto empty_dir = scratch("pre_empty");
  trajsmooth::write_text_file((empty_dir / "raw.csv").string(), "person_id,timestamp,lat,lon\n");
  const auto e = run("preprocess --input " + q(empty_dir / "raw.csv") + " --out-dir " + q(empty_dir / "out"));
  CHECK(e.code != 0);
  CHECK_FALSE(fs::exists(empty_dir / "out" / "preprocess_manifest.json"));
  const auto err = last_json_line(e.err);
  CHECK(err["status"] == "error");
  CHECK(err["command"] == "preprocess");

  trajsmooth::write_text_file((empty_dir / "bad.csv").string(),
                              "person_id,timestamp,lat,lon\np1,1709596800,40,-83\np1,x,40,-83\n");
  const auto w = run("preprocess --input " + q(empty_dir / "bad.csv") + " --out-dir " + q(empty_dir / "w"));
  CHECK(w.code == 0);
  CHECK(w.err.find("line 3") != std::string::npos);
  CHECK(last_json_line(w.out)["n_warnings"] == 1);
}

TEST_CASE("simulate, smooth, plot and evaluate smoke run") {
  const auto dir = scratch("smoke");
  REQUIRE(run("simulate --out-dir " + q(dir / "sim") + " --n 2 --T 100 --seed 11").code == 0);
  const auto manifest = json::parse(read_text_file((dir / "sim" / "manifest.json").string()));
  REQUIRE(manifest["datasets"].size() == 2);
  CHECK(manifest["datasets"][0].contains("seed"));
  CHECK(manifest["datasets"][1].contains("realized_missing_fraction"));
  const auto obs = dir / "sim" / "dataset_000_obs.csv";
  REQUIRE(fs::exists(obs));

  const std::string smooth = "smooth --input " + q(obs) + " --particles 50 --samples 20 --burn-in 5 --seed 3";
  const auto start = std::chrono::steady_clock::now();
  const auto s1 = run(smooth + " --summary " + q(dir / "s1.csv") + " --report " + q(dir / "r1.json") + " --draws " +
                      q(dir / "d1.csv"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(s1.code == 0);
  CHECK(secs < 60.0);
  const auto report = json::parse(read_text_file((dir / "r1.json").string()));
  CHECK(report["sampler"].contains("acceptance"));
  CHECK(report["sampler"].contains("ess"));
  CHECK(report["sampler"].contains("wall_seconds"));
  CHECK(report["sampler"].contains("collapse_retries"));

  REQUIRE(run(smooth + " --summary " + q(dir / "s2.csv") + " --draws " + q(dir / "d2.csv") + " --workers 2").code == 0);
  CHECK(read_text_file((dir / "s1.csv").string()) == read_text_file((dir / "s2.csv").string()));
  CHECK(read_text_file((dir / "d1.csv").string()) == read_text_file((dir / "d2.csv").string()));

  REQUIRE(run("bin --input " + q(obs) + " --output " + q(dir / "seg.csv")).code == 0);
  REQUIRE(run("plot --summary " + q(dir / "s1.csv") + " --observations " + q(obs) + " --draws " + q(dir / "d1.csv") +
              " --output " + q(dir / "sm.svg"))
              .code == 0);
  REQUIRE(run("plot --segmentation " + q(dir / "seg.csv") + " --output " + q(dir / "seg.svg")).code == 0);
  REQUIRE(run("plot --summary " + q(dir / "s1.csv") + " --segmentation " + q(dir / "seg.csv") + " --observations " +
              q(obs) + " --output " + q(dir / "both.svg"))
              .code == 0);
  CHECK(read_text_file((dir / "sm.svg").string()).find("<svg") != std::string::npos);
  CHECK(read_text_file((dir / "both.svg").string()).find("smoother: y") != std::string::npos);

  trajsmooth::write_text_file((dir / "broken.csv").string(), "t,mean_x\n1,0\n");
  const auto broken = run("plot --summary " + q(dir / "broken.csv") + " --output " + q(dir / "x.svg"));
  CHECK(broken.code != 0);
  CHECK(last_json_line(broken.err)["message"].get<std::string>().find("mean_y") != std::string::npos);

  const std::string eval = "evaluate --manifest " + q(dir / "sim" / "manifest.json") +
                           " --particles 30 --samples 12 --burn-in 4";
  REQUIRE(run(eval + " --out-dir " + q(dir / "ev1")).code == 0);
  REQUIRE(run(eval + " --out-dir " + q(dir / "ev2") + " --workers 2").code == 0);
  const auto per_run = read_text_file((dir / "ev1" / "per_run.csv").string());
  CHECK(per_run == read_text_file((dir / "ev2" / "per_run.csv").string()));
  CHECK(per_run.rfind("dataset,seed,method,rmsd_total,rmsd_missing,rmsd_observed,misclass_total,misclass_missing,"
                      "misclass_observed,realized_missing_fraction,aborted,error\n",
                      0) == 0);
  CHECK(fs::exists(dir / "ev1" / "evaluation_manifest.json"));

  REQUIRE(run(eval + " --out-dir " + q(dir / "ev3") + " --methods binning,binning").code == 0);
  std::ifstream sin(dir / "ev3" / "summary.csv");
  const auto table = trajsmooth::read_csv(sin);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    CHECK(trajsmooth::parse_double(row[table.column("rmsd_ratio")]) == 1.0);
    CHECK(trajsmooth::parse_double(row[table.column("misclass_diff")]) == 0.0);
  }
}

TEST_CASE("config files and failures") {
  const auto dir = scratch("cfg");
  trajsmooth::write_text_file((dir / "c.json").string(), R"({"T": 60, "n_datasets": 1, "seed": 4})");
  REQUIRE(run("simulate --config " + q(dir / "c.json") + " --out-dir " + q(dir / "a")).code == 0);
  const auto m = json::parse(read_text_file((dir / "a" / "manifest.json").string()));
  CHECK(m["T"] == 60);
  CHECK(m["base_seed"] == 4);
  REQUIRE(run("simulate --config " + q(dir / "c.json") + " --out-dir " + q(dir / "b") + " --seed 5").code == 0);
  CHECK(json::parse(read_text_file((dir / "b" / "manifest.json").string()))["base_seed"] == 5);

  trajsmooth::write_text_file((dir / "bad.json").string(), R"({"T": 60, "nope": 1})");
  const auto bad = run("simulate --config " + q(dir / "bad.json") + " --out-dir " + q(dir / "c"));
  CHECK(bad.code != 0);
  CHECK(last_json_line(bad.err)["message"].get<std::string>().find("nope") != std::string::npos);

  const auto missing = run("smooth --input " + q(dir / "absent.csv") + " --summary " + q(dir / "s.csv"));
  CHECK(missing.code != 0);
  CHECK(last_json_line(missing.err)["status"] == "error");
}
