#include "ldbm/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldbm/error.hpp"
#include "ldbm/stats.hpp"

namespace ldbm {

WeightSpec::WeightSpec(double alpha, bool relaxed) : alpha_(alpha), relaxed_(relaxed) {
  if (!std::isfinite(alpha)) throw DomainError("weight exponent must be finite");
  if (relaxed) {
    if (!(alpha > -2.0)) throw DomainError("weight exponent must satisfy alpha in (-2, inf)");
  } else if (!(alpha >= 2.0)) {
    throw DomainError("weight exponent must satisfy alpha in [2, inf) (pass relaxed to admit alpha in (-2, inf))");
  }
}

double WeightSpec::operator()(Point x) const {
  const double r = norm(x);
  if (alpha_ == 0.0) return 1.0;
  if (r == 0.0) return alpha_ > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(r, alpha_);
}

FieldProvenance provenance_of(const FieldState& field) { return {field.seed, field.draw, field.level}; }

void check_subcritical(double gamma) {
  if (!(gamma >= 0.0 && gamma < 2.0))
    throw DomainError("gamma must lie in the subcritical regime [0, 2)");
}

ChaosDensity build_regularized_measure(const FieldState& field, double gamma, std::optional<WeightSpec> weight) {
  check_subcritical(gamma);
  if (field.values.size() != field.grid.node_count()) throw ContractError("build_regularized_measure: malformed field");
  ChaosDensity out;
  out.grid = field.grid;
  out.gamma = gamma;
  out.level = field.level;
  out.weight = weight;
  out.provenance = provenance_of(field);
  out.variance = field.variance;
  out.density.resize(field.values.size());
  const double shift = 0.5 * gamma * gamma * field.variance;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double x = field.values[i];
    if (!std::isfinite(x)) throw ContractError("build_regularized_measure: field contains nonfinite values");
    double d = gamma == 0.0 ? 1.0 : std::exp(gamma * x - shift);
    if (weight) d *= (*weight)(field.grid.node(i));
    out.density[i] = d;
  }
  return out;
}

namespace {

// Visits (index, centre) of every unmasked cell whose centre lies in the region.
template <typename F>
void for_each_cell_in(const GridSpec& grid, const Region& region, F&& f) {
  const Box box = bounding_box(region);
  const int i0 = std::max(0, static_cast<int>(std::floor((box.lo.x - grid.origin().x) / grid.cell_width_x() - 0.5)));
  const int i1 = std::min(grid.nx() - 1, static_cast<int>(std::ceil((box.hi.x - grid.origin().x) / grid.cell_width_x())));
  const int j0 = std::max(0, static_cast<int>(std::floor((box.lo.y - grid.origin().y) / grid.cell_width_y() - 0.5)));
  const int j1 = std::min(grid.ny() - 1, static_cast<int>(std::ceil((box.hi.y - grid.origin().y) / grid.cell_width_y())));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Point c = grid.node(i, j);
      const std::size_t idx = grid.index(i, j);
      if (contains(region, c) && !grid.excluded(idx)) f(idx, c);
    }
  }
}

double ball_mass(const ChaosDensity& d, Point center, double radius) {
  return measure_of_set(d, Ball{center, radius}).mass;
}

}  // namespace

MassResult measure_of_set(const ChaosDensity& density, const Region& region) {
  MassResult out;
  double sum = 0.0;
  for_each_cell_in(density.grid, region, [&](std::size_t idx, Point) {
    sum += density.density[idx];
    ++out.cells;
  });
  out.mass = sum * density.grid.cell_area();
  out.empty = out.cells == 0;
  return out;
}

DominationReport check_weight_domination(const ChaosDensity& weighted, const ChaosDensity& unweighted,
                                         const Region& region) {
  if (!weighted.with_weight() || unweighted.with_weight())
    throw ContractError("check_weight_domination: expects one weighted and one unweighted density");
  if (!(weighted.provenance == unweighted.provenance) || weighted.gamma != unweighted.gamma ||
      !(weighted.grid == unweighted.grid))
    throw ContractError("check_weight_domination: densities come from different field realizations");
  DominationReport report;
  double lhs = 0.0;
  double base = 0.0;
  double sup = 0.0;
  for_each_cell_in(weighted.grid, region, [&](std::size_t idx, Point c) {
    lhs += weighted.density[idx];
    base += unweighted.density[idx];
    sup = std::max(sup, (*weighted.weight)(c));
  });
  const double area = weighted.grid.cell_area();
  report.lhs = lhs * area;
  report.sup_weight = sup;
  report.rhs = sup * base * area;
  report.holds = report.lhs <= report.rhs;
  return report;
}

std::vector<double> log_spaced(double smallest, double largest, std::size_t count) {
  if (count < 2 || !(smallest > 0.0) || !(largest > smallest)) throw DomainError("log_spaced: invalid range");
  std::vector<double> out(count);
  const double a = std::log(smallest);
  const double b = std::log(largest);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1.0));
  return out;
}

SmallBallFit smallball_scaling(std::span<const ChaosDensity> ensemble, Point center, std::span<const double> radii) {
  if (ensemble.empty()) throw ContractError("smallball_scaling: empty ensemble");
  if (radii.size() < 4) throw ResolutionError("smallball_scaling: need at least 4 radii");
  const GridSpec& grid = ensemble.front().grid;
  const auto [rmin, rmax] = std::minmax_element(radii.begin(), radii.end());
  if (*rmax < 10.0 * *rmin * (1.0 - 1e-12)) throw ResolutionError("smallball_scaling: radii must span a decade");
  const double h = grid.cell_width();
  for (double r : radii) {
    if (r < 2.0 * h) {
      std::ostringstream os;
      os << "smallball_scaling: radius " << r << " is below two cell widths (" << 2.0 * h << ")";
      throw ResolutionError(os.str());
    }
    const Ball ball{center, r};
    if (!grid.contains(bounding_box(ball))) throw ResolutionError("smallball_scaling: ball leaves the grid");
  }
  for (const auto& d : ensemble)
    if (!(d.grid == grid)) throw ContractError("smallball_scaling: ensemble members use different grids");

  SmallBallFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  std::vector<double> log_r, log_m;
  std::vector<std::vector<double>> masses(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    RunningStats stats;
    masses[k].reserve(ensemble.size());
    for (const auto& d : ensemble) {
      const double m = ball_mass(d, center, radii[k]);
      masses[k].push_back(m);
      stats.add(m);
    }
    if (!(stats.mean() > 0.0)) throw ResolutionError("smallball_scaling: ball carries no mass");
    fit.mean_mass.push_back(stats.mean());
    fit.mass_se.push_back(stats.standard_error());
    log_r.push_back(std::log(radii[k]));
    log_m.push_back(std::log(stats.mean()));
  }
  const LinearFit line = fit_line(log_r, log_m);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_se = line.slope_se;
  double envelope = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii.size(); ++k)
    for (double m : masses[k]) envelope = std::max(envelope, std::log(m) - fit.slope * log_r[k]);
  fit.envelope_intercept = envelope;
  return fit;
}

}  // namespace ldbm
