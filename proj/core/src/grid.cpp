#include "ldbm/grid.hpp"

#include <algorithm>
#include <cmath>

#include "ldbm/error.hpp"

namespace ldbm {

GridSpec::GridSpec(Point origin, double extent_x, double extent_y, int nx, int ny, double exclusion_radius)
    : origin_(origin), extent_x_(extent_x), extent_y_(extent_y), nx_(nx), ny_(ny), exclusion_radius_(exclusion_radius) {
  if (nx < 2 || ny < 2) throw DomainError("GridSpec: resolution must be at least 2 per axis");
  if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) || !std::isfinite(extent_y))
    throw DomainError("GridSpec: extent must be finite and positive");
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) throw DomainError("GridSpec: origin must be finite");
  if (!(exclusion_radius >= 0.0)) throw DomainError("GridSpec: exclusion radius must be nonnegative");
}

GridSpec GridSpec::centered_square(double half_width, int n, double exclusion_radius) {
  return GridSpec({-half_width, -half_width}, 2.0 * half_width, 2.0 * half_width, n, n, exclusion_radius);
}

GridSpec GridSpec::default_grid() { return centered_square(2.0, 64); }

double GridSpec::cell_width() const { return std::min(cell_width_x(), cell_width_y()); }

Point GridSpec::node(int i, int j) const {
  return {origin_.x + (i + 0.5) * cell_width_x(), origin_.y + (j + 0.5) * cell_width_y()};
}

bool GridSpec::excluded(std::size_t idx) const {
  if (exclusion_radius_ <= 0.0) return false;
  return norm(node(idx)) < exclusion_radius_;
}

bool GridSpec::contains(Point p) const {
  return p.x >= origin_.x && p.x <= origin_.x + extent_x_ && p.y >= origin_.y && p.y <= origin_.y + extent_y_;
}

bool GridSpec::contains(const Box& box) const { return contains(box.lo) && contains(box.hi); }

std::pair<int, int> GridSpec::cell_of(Point p) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / cell_width_x())), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / cell_width_y())), 0, ny_ - 1);
  return {i, j};
}

double interpolate_bilinear(const GridSpec& grid, std::span<const double> values, Point p) {
  if (values.size() != grid.node_count()) throw ContractError("interpolate_bilinear: value count does not match grid");
  // Continuous node coordinates: node i sits at fx = i.
  const double fx = std::clamp((p.x - grid.origin().x) / grid.cell_width_x() - 0.5, 0.0, grid.nx() - 1.0);
  const double fy = std::clamp((p.y - grid.origin().y) / grid.cell_width_y() - 0.5, 0.0, grid.ny() - 1.0);
  const int i0 = std::min(static_cast<int>(fx), grid.nx() - 2);
  const int j0 = std::min(static_cast<int>(fy), grid.ny() - 2);
  const double tx = fx - i0;
  const double ty = fy - j0;
  const std::size_t base = grid.index(i0, j0);
  const auto nx = static_cast<std::size_t>(grid.nx());
  const double v00 = values[base];
  const double v10 = values[base + 1];
  const double v01 = values[base + nx];
  const double v11 = values[base + nx + 1];
  return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

}  // namespace ldbm
