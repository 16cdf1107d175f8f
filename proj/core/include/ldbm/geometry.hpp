#pragma once

#include <cmath>
#include <variant>

namespace ldbm {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
constexpr double norm2(Point p) { return p.x * p.x + p.y * p.y; }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Closed axis-aligned box [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point lo;
  Point hi;
  bool contains(Point p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

/// Closed ball |p - center| <= radius.
struct Ball {
  Point center;
  double radius = 0.0;
  bool contains(Point p) const { return norm2(p - center) <= radius * radius; }
};

/// Open annulus inner < |p - center| < outer.
struct Annulus {
  Point center;
  double inner = 0.0;
  double outer = 0.0;
  bool contains(Point p) const {
    const double r2 = norm2(p - center);
    return r2 > inner * inner && r2 < outer * outer;
  }
};

using Region = std::variant<Box, Ball, Annulus>;

inline bool contains(const Region& region, Point p) {
  return std::visit([p](const auto& r) { return r.contains(p); }, region);
}

/// Smallest axis-aligned box containing the region.
inline Box bounding_box(const Region& region) {
  struct Visitor {
    Box operator()(const Box& b) const { return b; }
    Box operator()(const Ball& b) const {
      return {{b.center.x - b.radius, b.center.y - b.radius}, {b.center.x + b.radius, b.center.y + b.radius}};
    }
    Box operator()(const Annulus& a) const {
      return {{a.center.x - a.outer, a.center.y - a.outer}, {a.center.x + a.outer, a.center.y + a.outer}};
    }
  };
  return std::visit(Visitor{}, region);
}

}  // namespace ldbm
