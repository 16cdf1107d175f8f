#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ldbm/chaos.hpp"
#include "ldbm/dbm.hpp"
#include "ldbm/gff.hpp"

namespace ldbm {

/// Reference measure of the Revuz correspondence between the clock and the
/// chaos measure. `weighted` means m = rho dx, so the clock integrand is the
/// density of M^rho with respect to m and carries no rho factor.
enum class RevuzReference { weighted, lebesgue };
inline constexpr RevuzReference REVUZ_REFERENCE = RevuzReference::weighted;

/// exp(gamma X_n(x) - gamma^2/2 log c_n) with X_n interpolated bilinearly.
double clock_integrand(const FieldState& field, double gamma, Point x);

/// Additive functional F on the path grid, F(0) = 0, linear between grid times.
struct ClockSample {
  double dt = 1e-4;
  double start_time = 0.0;
  std::vector<double> values;
  FieldProvenance field;
  double gamma = 0.0;
  /// Killing annulus index; empty for the unkilled clock.
  std::optional<int> annulus;
  /// First grid time not counted (exit from the annulus or the field grid).
  double frozen_at = kNever;
  /// The path left the field grid before the annulus, so the clock froze early.
  bool left_grid = false;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return start_time + static_cast<double>(i) * dt; }
  double final_value() const { return values.empty() ? 0.0 : values.back(); }
  /// Piecewise-linear F(t) for t in [start_time, end].
  double value_at(double t) const;
};

/// Trapezoid rule for F(t) = int_0^t exp(gamma X_n(X_s) - gamma^2/2 log c_n) ds.
///
/// With a domain the clock freezes from the first grid point outside it; a
/// segment counts only when both endpoints are inside the domain and the grid.
ClockSample accumulate_pcaf(const PathSample& path, const FieldState& field, double gamma,
                            std::optional<AnnulusDomain> domain = std::nullopt);

struct ConsistencyResult {
  double residual = 0.0;  // max_{t < sigma_k} |F^k(t) - F^{k+1}(t)|
  double scale = 0.0;     // F^k just before sigma_k
  double tolerance = 0.0;
  double sigma = kNever;
  bool passed = false;
};

/// Compares the clocks killed on E_k and E_{k+1} before the exit from E_k.
ConsistencyResult consistency_check(const PathSample& path, const FieldState& field, double gamma, int k);

/// inf{s : F(s) > tau}; throws IndexError unless 0 <= tau < F(end).
double invert_clock(const ClockSample& clock, double tau);

/// Z(t) = X(F^{-1}(t)) with linear interpolation between path points.
std::vector<Point> time_change(const PathSample& path, const ClockSample& clock, std::span<const double> times);

/// Path position at time s by linear interpolation on the path grid.
Point path_position(const PathSample& path, double s);

}  // namespace ldbm
