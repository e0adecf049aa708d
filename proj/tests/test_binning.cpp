#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "trajsmooth/binning.hpp"
#include "trajsmooth/io.hpp"
#include "trajsmooth/simulator.hpp"

using namespace trajsmooth;

namespace {

ObservationSeries fixture(const std::string& name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/fixtures/" + name);
  REQUIRE(in.good());
  return read_observations(in);
}

std::string segmentation_text(const BinSegmentation& seg) {
  std::ostringstream out;
  write_segmentation(out, seg);
  return out.str();
}

std::string golden(const std::string& name) { return read_text_file(std::string(TEST_DATA_DIR) + "/golden/" + name); }

}  // namespace

TEST_CASE("gap interpolation") {
  ObservationSeries obs;
  obs.Y = {Point2{0, 0}, std::nullopt, Point2{2, 2}};
  auto f = interpolate_gaps(obs);
  CHECK(f[1] == Point2{1, 1});

  obs.Y = {std::nullopt, std::nullopt, Point2{4, 4}, Point2{5, 1}, std::nullopt};
  f = interpolate_gaps(obs);
  CHECK(f[0] == Point2{4, 4});
  CHECK(f[1] == Point2{4, 4});
  CHECK(f[4] == Point2{5, 1});

  obs.Y = {Point2{1, 2}, Point2{3, 4}, Point2{5, 6}};
  f = interpolate_gaps(obs);
  CHECK(f == std::vector<Point2>{{1, 2}, {3, 4}, {5, 6}});

  obs.Y = {std::nullopt, std::nullopt};
  CHECK_THROWS_AS(interpolate_gaps(obs), std::domain_error);
}

TEST_CASE("constant input is one stable bin") {
  const auto obs = fixture("binning_constant_obs.csv");
  const auto seg = run_binning(interpolate_gaps(obs), BinningConfig{});
  REQUIRE(seg.bins.size() == 1);
  CHECK(seg.bins[0].kind == BinKind::stable);
  CHECK(seg.bins[0].first == 0);
  CHECK(seg.bins[0].last == obs.size() - 1);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    CHECK(seg.X_est[t] == Point2{1.5, -2.0});
    CHECK(seg.S_est[t] == Regime::pause);
  }
  CHECK(segmentation_text(seg) == golden("binning_constant_seg.csv"));
}

TEST_CASE("collinear steps are all momentary") {
  const auto obs = fixture("binning_collinear_obs.csv");
  const auto y = interpolate_gaps(obs);
  const auto seg = run_binning(y, BinningConfig{});
  CHECK(seg.bins.size() == obs.size());
  CHECK(seg.momentary_count() == obs.size());
  CHECK(seg.X_est == y);
  for (auto s : seg.S_est) CHECK(s == Regime::flight);
  CHECK(segmentation_text(seg) == golden("binning_collinear_seg.csv"));
}

TEST_CASE("two clusters joined by transit") {
  const auto obs = fixture("binning_two_cluster_obs.csv");
  const auto y = interpolate_gaps(obs);
  const auto seg = run_binning(y, BinningConfig{});
  // 50 cluster points, 10 transit points, 50 cluster points
  REQUIRE(seg.bins.size() == 12);
  CHECK(seg.bins.front().kind == BinKind::stable);
  CHECK(seg.bins.front().first == 0);
  CHECK(seg.bins.front().last == 49);
  CHECK(seg.bins.back().kind == BinKind::stable);
  CHECK(seg.bins.back().first == 60);
  CHECK(seg.bins.back().last == 109);
  for (std::size_t i = 1; i <= 10; ++i) {
    CHECK(seg.bins[i].kind == BinKind::momentary);
    CHECK(seg.bins[i].first == 49 + i);
  }
  Point2 c1{0, 0}, c2{0, 0};
  for (std::size_t t = 0; t < 50; ++t) c1 += y[t];
  for (std::size_t t = 60; t < 110; ++t) c2 += y[t];
  c1 = c1 / 50.0;
  c2 = c2 / 50.0;
  CHECK(seg.X_est[10].x == doctest::Approx(c1.x).epsilon(1e-12));
  CHECK(seg.X_est[10].y == doctest::Approx(c1.y).epsilon(1e-12));
  CHECK(seg.X_est[100].x == doctest::Approx(c2.x).epsilon(1e-12));
  CHECK(seg.start_times == std::vector<std::size_t>{0, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60});
  const auto labels = binning_to_labels(seg);
  CHECK(labels.size() == y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    CHECK(labels[t] == (t >= 50 && t < 60 ? Regime::flight : Regime::pause));
  }
  CHECK(segmentation_text(seg) == golden("binning_two_cluster_seg.csv"));
}

TEST_CASE("binning is deterministic and partitions time") {
  const auto ds = simulate_dataset(simulation_true_params(), {}, 1440, 21);
  const auto y = interpolate_gaps(ds.obs);
  const auto a = run_binning(y, BinningConfig{});
  const auto b = run_binning(y, BinningConfig{});
  CHECK(segmentation_text(a) == segmentation_text(b));
  std::size_t next = 0;
  for (const auto& bin : a.bins) {
    CHECK(bin.first == next);
    CHECK(bin.last >= bin.first);
    if (bin.kind == BinKind::momentary) {
      CHECK(bin.size() == 1);
      CHECK(a.X_est[bin.first] == y[bin.first]);
    } else {
      // stable bins need at least four members; X_est is their centroid
      CHECK(bin.size() >= 4);
      Point2 c{0, 0};
      for (std::size_t t = bin.first; t <= bin.last; ++t) c += y[t];
      c = c / static_cast<double>(bin.size());
      for (std::size_t t = bin.first; t <= bin.last; ++t) CHECK(a.X_est[t] == bin.center);
      CHECK(bin.center.x == doctest::Approx(c.x).epsilon(1e-9));
    }
    next = bin.last + 1;
  }
  CHECK(next == y.size());
}

TEST_CASE("all-stable segmentation gives pause labels") {
  std::vector<Point2> y(30, Point2{0.3, 0.3});
  const auto seg = run_binning(y, BinningConfig{});
  for (auto s : binning_to_labels(seg)) CHECK(s == Regime::pause);
}

TEST_CASE("binning rejects short input and bad thresholds") {
  CHECK_THROWS_AS(run_binning(std::vector<Point2>(3), BinningConfig{}), std::domain_error);
  CHECK_THROWS_AS(run_binning(std::vector<Point2>(10), BinningConfig{1.0, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(run_binning(std::vector<Point2>(10), BinningConfig{1.2, 0.0}), std::invalid_argument);
}
