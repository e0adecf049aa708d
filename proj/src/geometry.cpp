#include "trajsmooth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trajsmooth {

int orientation(const Point2& o, const Point2& a, const Point2& b) {
  const double c = cross(o, a, b);
  if (c > kCollinearEpsilon) return 1;
  if (c < -kCollinearEpsilon) return -1;
  return 0;
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  if (points.empty()) throw std::domain_error("convex_hull: empty point set");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::domain_error("convex_hull: non-finite coordinate");
    }
  }

  std::vector<Point2> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  if (sorted.size() < 3) {
    return {std::vector<Point2>(points.begin(), points.end()), true};
  }

  std::vector<Point2> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const auto& p : sorted) {
    while (k >= 2 && orientation(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = sorted.rbegin() + 1; it != sorted.rend(); ++it) {
    while (k >= lower && orientation(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);

  if (hull.size() < 3) {
    return {std::vector<Point2>(points.begin(), points.end()), true};
  }
  return {std::move(hull), false};
}

double polygon_area(const ConvexPolygon& poly) {
  if (poly.degenerate || poly.vertices.size() < 3) return 0.0;
  const auto& v = poly.vertices;
  double twice = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    twice += v[j].x * v[i].y - v[i].x * v[j].y;
  }
  return std::abs(twice) * 0.5;
}

double hull_area(std::span<const Point2> points) { return polygon_area(convex_hull(points)); }

Point2 points_centroid(std::span<const Point2> points) {
  if (points.empty()) throw std::domain_error("points_centroid: empty point set");
  Point2 sum;
  for (const auto& p : points) sum += p;
  return sum * (1.0 / static_cast<double>(points.size()));
}

}  // namespace trajsmooth
