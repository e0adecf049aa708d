#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "trajsmooth/geometry.hpp"

using namespace trajsmooth;

namespace {

std::vector<Point2> sorted(std::vector<Point2> v) {
  std::sort(v.begin(), v.end(), [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return v;
}

std::vector<Point2> random_points(std::mt19937_64& g, std::size_t n, bool grid) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-3, 3);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = grid ? Point2{double(k(g)), double(k(g))} : Point2{u(g), u(g)};
  return pts;
}

}  // namespace

TEST_CASE("triangle is its own hull") {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}};
  const auto h = convex_hull(pts);
  CHECK_FALSE(h.degenerate);
  CHECK(sorted(h.vertices) == sorted(pts));
  CHECK(polygon_area(h) == doctest::Approx(0.5));
}

TEST_CASE("interior point of the unit square is dropped") {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto h = convex_hull(pts);
  CHECK(h.vertices.size() == 4);
  CHECK(polygon_area(h) == doctest::Approx(1.0));
}

TEST_CASE("collinear and tiny inputs are degenerate with zero area") {
  const std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}};
  const auto h = convex_hull(line);
  CHECK(h.degenerate);
  CHECK(polygon_area(h) == 0.0);
  const std::vector<Point2> two{{0, 0}, {3, 1}};
  CHECK(hull_area(two) == 0.0);
  const std::vector<Point2> same{{2, 2}, {2, 2}, {2, 2}, {2, 2}};
  CHECK(hull_area(same) == 0.0);
}

TEST_CASE("hull vertices are counterclockwise") {
  const std::vector<Point2> pts{{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0.2, 0.7}};
  const auto h = convex_hull(pts);
  for (std::size_t i = 0; i < h.vertices.size(); ++i) {
    const auto& a = h.vertices[i];
    const auto& b = h.vertices[(i + 1) % h.vertices.size()];
    const auto& c = h.vertices[(i + 2) % h.vertices.size()];
    CHECK(cross(a, b, c) > 0.0);
  }
}

TEST_CASE("invalid hull input throws") {
  CHECK_THROWS_AS(convex_hull(std::vector<Point2>{}), std::domain_error);
  const std::vector<Point2> bad{{0, 0}, {std::numeric_limits<double>::quiet_NaN(), 1}, {1, 0}};
  CHECK_THROWS_AS(convex_hull(bad), std::domain_error);
  const std::vector<Point2> inf{{0, 0}, {std::numeric_limits<double>::infinity(), 1}, {1, 0}};
  CHECK_THROWS_AS(convex_hull(inf), std::domain_error);
}

TEST_CASE("points centroid") {
  CHECK(points_centroid(std::vector<Point2>{{0, 0}, {2, 0}}) == Point2{1, 0});
  CHECK(points_centroid(std::vector<Point2>{{1, 1}}) == Point2{1, 1});
  CHECK(points_centroid(std::vector<Point2>{{0, 0}, {0, 2}, {2, 0}, {2, 2}}) == Point2{1, 1});
  CHECK_THROWS_AS(points_centroid(std::vector<Point2>{}), std::domain_error);
}

TEST_CASE("orientation predicate") {
  CHECK(orientation({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(orientation({0, 0}, {0, 1}, {1, 0}) == -1);
  CHECK(orientation({0, 0}, {1, 1}, {2, 2}) == 0);
}

TEST_CASE("hull matches the brute-force oracle on random and grid sets") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 300; ++rep) {
    const auto pts = random_points(g, 1 + rep % 25, rep % 2 == 0);
    const auto h = convex_hull(pts);
    const auto expected = oracle::brute_force_hull_vertices(pts);
    if (expected.size() >= 3) {
      CHECK_FALSE(h.degenerate);
      CHECK(sorted(h.vertices) == expected);
    } else {
      CHECK(h.degenerate);
    }
    CHECK(polygon_area(h) == doctest::Approx(oracle::brute_force_hull_area(pts)).epsilon(1e-12));
  }
}

TEST_CASE("hull is idempotent and translation invariant in area") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto pts = random_points(g, 12, false);
    const auto h = convex_hull(pts);
    const auto hh = convex_hull(h.vertices);
    CHECK(sorted(hh.vertices) == sorted(h.vertices));
    auto shifted = pts;
    for (auto& p : shifted) p += Point2{5.0, -7.0};
    CHECK(hull_area(shifted) == doctest::Approx(hull_area(pts)).epsilon(1e-10));
  }
}
