#pragma once

#include <span>
#include <vector>

namespace trajsmooth {

/// Planar position in kilometres east (x) and north (y) of a local origin.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;

  Point2& operator+=(const Point2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Point2& operator-=(const Point2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Point2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

inline Point2 operator+(Point2 a, const Point2& b) { return a += b; }
inline Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
inline Point2 operator*(double s, Point2 p) { return p *= s; }
inline Point2 operator*(Point2 p, double s) { return p *= s; }
inline Point2 operator/(const Point2& p, double s) { return {p.x / s, p.y / s}; }

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double squared_norm(const Point2& p) { return dot(p, p); }

/// Tolerance used by the orientation predicate to declare three points collinear (km).
inline constexpr double kCollinearEpsilon = 1e-12;

/// Twice the signed area of triangle (o, a, b); positive for a counterclockwise turn.
inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Sign of the turn o -> a -> b with a collinearity band of kCollinearEpsilon.
int orientation(const Point2& o, const Point2& a, const Point2& b);

/// Convex polygon with counterclockwise vertices. Degenerate hulls (fewer than three
/// distinct points, or all points collinear) keep the full input point list and have
/// zero area.
struct ConvexPolygon {
  std::vector<Point2> vertices;
  bool degenerate = false;
};

/// Andrew's monotone chain. Collinear boundary points are dropped.
/// Throws std::domain_error on empty input or non-finite coordinates.
ConvexPolygon convex_hull(std::span<const Point2> points);

/// Shoelace area; zero for degenerate polygons.
double polygon_area(const ConvexPolygon& poly);

/// Shorthand for polygon_area(convex_hull(points)).
double hull_area(std::span<const Point2> points);

/// Arithmetic mean of the points (not the area centroid of their hull).
Point2 points_centroid(std::span<const Point2> points);

}  // namespace trajsmooth
