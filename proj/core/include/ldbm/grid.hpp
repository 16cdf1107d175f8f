#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ldbm/geometry.hpp"

namespace ldbm {

/// Regular cell-centred grid on the box [origin, origin + extent].
///
/// Node (i, j) sits at the centre of cell (i, j); values are stored row-major
/// with index j * nx + i (rows run along y). Cells whose centre lies within
/// `exclusion_radius` of the origin are masked out of every mass sum.
class GridSpec {
 public:
  GridSpec(Point origin, double extent_x, double extent_y, int nx, int ny, double exclusion_radius = 0.0);

  /// Square [-half, half]^2 with n x n cells.
  static GridSpec centered_square(double half_width, int n, double exclusion_radius = 0.0);
  /// [-2, 2]^2 at 64 x 64.
  static GridSpec default_grid();

  Point origin() const { return origin_; }
  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t node_count() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double cell_width_x() const { return extent_x_ / nx_; }
  double cell_width_y() const { return extent_y_ / ny_; }
  double cell_width() const;  // smaller of the two widths
  double cell_area() const { return cell_width_x() * cell_width_y(); }
  double exclusion_radius() const { return exclusion_radius_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i); }
  Point node(int i, int j) const;
  Point node(std::size_t idx) const { return node(static_cast<int>(idx % nx_), static_cast<int>(idx / nx_)); }
  bool excluded(std::size_t idx) const;

  /// Inside the closed extent box.
  bool contains(Point p) const;
  bool contains(const Box& box) const;
  Box bounds() const { return {origin_, {origin_.x + extent_x_, origin_.y + extent_y_}}; }
  /// Cell (i, j) containing p, clamped to the grid.
  std::pair<int, int> cell_of(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Point origin_;
  double extent_x_;
  double extent_y_;
  int nx_;
  int ny_;
  double exclusion_radius_;
};

/// Bilinear interpolation of node values. Inside the outer half-cell rim the
/// value is clamped to the nearest interior node line.
double interpolate_bilinear(const GridSpec& grid, std::span<const double> values, Point p);

}  // namespace ldbm
