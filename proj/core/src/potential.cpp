#include "ldbm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ldbm/clock.hpp"
#include "ldbm/error.hpp"
#include "ldbm/parallel.hpp"
#include "ldbm/stats.hpp"

namespace ldbm {

namespace {

void require_inside_grid(const GridSpec& grid, const Region& G) {
  if (!grid.contains(bounding_box(G))) throw ContractError("domain G is not contained in the field grid");
}

}  // namespace

std::vector<double> resolvent_integrals(Point x, const FieldState& field, const Region& G, const PotentialParams& params,
                                        std::vector<char>* exited) {
  check_subcritical(params.gamma);
  if (!contains(G, x)) throw ContractError("resolvent potential: start point outside G");
  require_inside_grid(field.grid, G);
  const std::size_t steps = step_count(params.horizon, params.dt);

  std::vector<double> values(params.paths, 0.0);
  if (exited) exited->assign(params.paths, 0);
  parallel_for(params.paths, [&](std::size_t p) {
    DbmStepper stepper(x, params.alpha, params.dt, StreamKey{params.seed, params.label, static_cast<std::uint32_t>(p)});
    const double decay = std::exp(-params.dt);
    double discount = 1.0;
    double previous = clock_integrand(field, params.gamma, x);
    double sum = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
      const Point& y = stepper.step();
      if (!contains(G, y)) {
        if (exited) (*exited)[p] = 1;
        break;
      }
      const double next_discount = discount * decay;
      const double current = next_discount * clock_integrand(field, params.gamma, y);
      sum += 0.5 * params.dt * (previous + current);
      previous = current;
      discount = next_discount;
    }
    values[p] = sum;
  });
  return values;
}

PotentialEstimate resolvent_potential_mc(Point x, const FieldState& field, const Region& G,
                                         const PotentialParams& params) {
  if (params.paths < 200) throw DomainError("resolvent potential needs at least 200 paths");
  std::vector<char> exited;
  const std::vector<double> values = resolvent_integrals(x, field, G, params, &exited);
  RunningStats stats;
  for (double v : values) stats.add(v);
  PotentialEstimate est;
  est.mean = stats.mean();
  est.standard_error = stats.standard_error();
  est.paths = values.size();
  est.exited_fraction =
      static_cast<double>(std::count(exited.begin(), exited.end(), 1)) / static_cast<double>(values.size());
  return est;
}

PotentialReport potential_report(const FieldState& field, const Region& G, std::span<const Point> probes,
                                 PotentialParams params) {
  if (probes.empty()) throw ContractError("potential report needs probe points");
  PotentialReport report;
  report.params = params;
  report.level = field.level;
  report.probes.assign(probes.begin(), probes.end());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    params.label = streams::potential(static_cast<std::uint32_t>(p));
    report.estimates.push_back(resolvent_potential_mc(probes[p], field, G, params));
    if (report.estimates.back().mean > report.sup) {
      report.sup = report.estimates.back().mean;
      report.argsup = p;
    }
  }
  return report;
}

std::vector<Point> polar_probes(const AnnulusDomain& domain, int radial, int angular) {
  if (radial < 1 || angular < 1) throw ContractError("polar probe lattice needs at least one ring and one ray");
  const double lo = domain.inner() * 1.5;
  const double hi = domain.outer() / 1.5;
  std::vector<Point> probes;
  for (int i = 0; i < radial; ++i) {
    const double r = radial == 1 ? std::sqrt(lo * hi) : lo * std::pow(hi / lo, static_cast<double>(i) / (radial - 1));
    const double offset = (i % 2) * 0.5;
    for (int j = 0; j < angular; ++j) {
      const double theta = 2.0 * std::numbers::pi * (j + offset) / angular;
      probes.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }
  return probes;
}

SingularIntegralReport singular_integral_check(const ChaosDensity& density, const Region& G, double delta,
                                               std::span<const Point> probes) {
  if (!(delta >= 0.0 && delta < 2.0)) throw DomainError("singular integral exponent must satisfy 0 <= delta < 2");
  const GridSpec& grid = density.grid;
  require_inside_grid(grid, G);

  struct Cell {
    int i, j;
    double mass;
  };
  std::vector<Cell> cells;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const std::size_t idx = grid.index(i, j);
      if (grid.excluded(idx) || !contains(G, grid.node(i, j))) continue;
      cells.push_back({i, j, density.density[idx] * grid.cell_area()});
    }
  }

  SingularIntegralReport report;
  report.delta = delta;
  const double self = std::pow(0.5 * grid.cell_width(), -delta);
  for (const Cell& c : cells) report.mass += c.mass;

  for (Point x : probes) {
    if (!contains(G, x)) throw ContractError("singular integral probe outside G");
    const auto [ci, cj] = grid.cell_of(x);
    double sum = 0.0;
    for (const Cell& c : cells) {
      const double w = (c.i == ci && c.j == cj) ? self : std::pow(distance(x, grid.node(c.i, c.j)), -delta);
      sum += w * c.mass;
    }
    report.probes.push_back(x);
    report.values.push_back(sum);
    report.sup = std::max(report.sup, sum);
  }

  // Kernel by lattice lag.
  const int nx = grid.nx();
  const int ny = grid.ny();
  std::vector<double> lag(static_cast<std::size_t>(nx) * ny);
  for (int dj = 0; dj < ny; ++dj)
    for (int di = 0; di < nx; ++di)
      lag[static_cast<std::size_t>(dj) * nx + di] =
          (di == 0 && dj == 0) ? self : std::pow(std::hypot(di * grid.cell_width_x(), dj * grid.cell_width_y()), -delta);
  double total = 0.0;
  for (const Cell& a : cells) {
    double row = 0.0;
    for (const Cell& b : cells)
      row += lag[static_cast<std::size_t>(std::abs(a.j - b.j)) * nx + std::abs(a.i - b.i)] * b.mass;
    total += a.mass * row;
  }
  report.double_integral = total;
  return report;
}

DyadicShellReport dyadic_shell_bound(const ChaosDensity& density, Point x, double R, double delta, double zeta,
                                     double c2) {
  if (!(delta >= 0.0)) throw DomainError("shell exponent delta must be nonnegative");
  if (!(delta < zeta)) {
    std::ostringstream os;
    os << "dyadic shell bound needs delta < zeta (delta=" << delta << ", zeta=" << zeta
       << "); the geometric series diverges";
    throw DomainError(os.str());
  }
  if (!(R > 0.0) || !(c2 > 0.0)) throw DomainError("dyadic shell bound needs R > 0 and c2 > 0");
  const GridSpec& grid = density.grid;
  if (!grid.contains(bounding_box(Ball{x, 2.0 * R}))) throw ContractError("outer shell ball leaves the grid");

  DyadicShellReport report;
  const double min_radius = 2.0 * grid.cell_width();
  for (int n = 0;; ++n) {
    const double r = std::ldexp(R, 1 - n);
    if (n > 0 && r < min_radius) break;
    const double term = std::pow(2.0, n * delta) * std::pow(R, -delta) * measure_of_set(density, Ball{x, r}).mass;
    report.ball_radii.push_back(r);
    report.terms.push_back(term);
    report.shell_sum += term;
  }
  report.dyadic_bound = c2 * std::pow(R, zeta - delta) * std::pow(2.0, zeta) / (1.0 - std::pow(2.0, delta - zeta));
  report.holds = report.shell_sum <= report.dyadic_bound;
  return report;
}

SmallBallFit origin_mass_decay(std::span<const ChaosDensity> ensemble, std::span<const double> radii) {
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ResolutionError("origin mass decay: radii must be distinct");
  return smallball_scaling(ensemble, Point{0.0, 0.0}, sorted);
}

namespace {

// m(ring intersect G) by the polar midpoint rule around the source.
double ring_reference_mass(const Region& G, Point source, double alpha, double r0, double r1) {
  constexpr int kRadial = 48;
  constexpr int kAngular = 720;
  const double dr = (r1 - r0) / kRadial;
  const double dtheta = 2.0 * std::numbers::pi / kAngular;
  double sum = 0.0;
  for (int a = 0; a < kRadial; ++a) {
    const double r = r0 + (a + 0.5) * dr;
    for (int b = 0; b < kAngular; ++b) {
      const double theta = (b + 0.5) * dtheta;
      const Point y{source.x + r * std::cos(theta), source.y + r * std::sin(theta)};
      if (!contains(G, y)) continue;
      const double rho = alpha == 0.0 ? 1.0 : std::pow(norm(y), alpha);
      sum += rho * r;
    }
  }
  return sum * dr * dtheta;
}

}  // namespace

ResolventKernelReport resolvent_kernel_singularity(const Region& G, const ResolventKernelParams& params) {
  if (params.paths < 10000) throw DomainError("resolvent kernel estimate needs at least 10^4 paths");
  if (!contains(G, params.source)) throw ContractError("resolvent kernel: source outside G");
  if (params.edges.size() < 3 || params.edges.front() != 0.0 ||
      !std::is_sorted(params.edges.begin(), params.edges.end()) ||
      std::adjacent_find(params.edges.begin(), params.edges.end()) != params.edges.end())
    throw ContractError("resolvent kernel: edges must start at 0 and increase strictly");
  const std::size_t steps = step_count(params.horizon, params.dt);
  const std::size_t bins = params.edges.size() - 1;
  const double outer = params.edges.back();

  // One occupation row per path; rows are only combined after sampling.
  std::vector<std::vector<double>> rows(params.paths, std::vector<double>(bins, 0.0));
  parallel_for(params.paths, [&](std::size_t p) {
    std::vector<double>& row = rows[p];
    DbmStepper stepper(params.source, params.alpha, params.dt,
                       StreamKey{params.seed, params.label, static_cast<std::uint32_t>(p)});
    const double decay = std::exp(-params.dt);
    double discount = 1.0;
    Point y = params.source;
    for (std::size_t i = 0; i < steps; ++i) {
      // Left-point rule: the step [t_i, t_i + dt) is charged to X_{t_i}.
      const double d = distance(y, params.source);
      if (d < outer) {
        const auto b = static_cast<std::size_t>(std::upper_bound(params.edges.begin(), params.edges.end(), d) -
                                                params.edges.begin() - 1);
        row[b] += params.dt * discount;
      }
      y = stepper.step();
      if (!contains(G, y)) break;
      discount *= decay;
    }
  });

  ResolventKernelReport report;
  report.paths = params.paths;
  // Merge sparse rings outward; a sparse tail folds into the previous ring. The source ring stays alone.
  const auto occupancy = [&](std::size_t lo, std::size_t hi) {
    std::size_t count = 0;
    for (const auto& row : rows)
      if (std::any_of(row.begin() + static_cast<std::ptrdiff_t>(lo), row.begin() + static_cast<std::ptrdiff_t>(hi),
                      [](double v) { return v > 0.0; }))
        ++count;
    return count;
  };
  std::vector<std::pair<std::size_t, std::size_t>> rings{{0, 1}};
  for (std::size_t lo = 1; lo < bins;) {
    std::size_t hi = lo + 1;
    while (hi < bins && occupancy(lo, hi) < params.min_occupancy) ++hi;
    const bool sparse = occupancy(lo, hi) < params.min_occupancy;
    std::ostringstream os;
    if (sparse && rings.size() > 1) {
      os << "rings " << params.edges[lo] << ".." << params.edges[hi] << " below occupancy "
         << params.min_occupancy << "; folded into the previous ring";
      rings.back().second = hi;
    } else {
      if (hi > lo + 1)
        os << "widened rings " << params.edges[lo] << ".." << params.edges[hi] << " to reach occupancy "
           << params.min_occupancy;
      rings.emplace_back(lo, hi);
    }
    if (!os.str().empty()) report.warnings.push_back(os.str());
    lo = hi;
  }

  for (std::size_t g = 0; g < rings.size(); ++g) {
    const auto [lo, hi] = rings[g];
    const double r0 = params.edges[lo];
    const double r1 = params.edges[hi];
    report.edges.push_back(r0);
    RunningStats stats;
    std::size_t visits = 0;
    for (const auto& row : rows) {
      double v = 0.0;
      for (std::size_t c = lo; c < hi; ++c) v += row[c];
      stats.add(v);
      if (v > 0.0) ++visits;
    }
    const double mass = ring_reference_mass(G, params.source, params.alpha, r0, r1);
    report.reference_mass.push_back(mass);
    report.visits.push_back(visits);
    const double est = mass > 0.0 ? stats.mean() / mass : 0.0;
    const double se = mass > 0.0 ? stats.standard_error() / mass : 0.0;
    const double mid = 0.5 * (r0 + r1);
    report.estimate.push_back(est);
    report.standard_error.push_back(se);
    report.scaled.push_back(est * std::pow(mid, params.delta));
    if (g > 0 && mass > 0.0 && visits > 0 && report.scaled.back() > report.max_scaled) {
      report.max_scaled = report.scaled.back();
      report.max_scaled_se = se * std::pow(mid, params.delta);
      report.argmax = g;
    }
  }
  report.edges.push_back(params.edges.back());
  report.source_bin = 0;
  report.source_bin_excluded = true;
  return report;
}

}  // namespace ldbm
