#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldbm/geometry.hpp"
#include "ldbm/gff.hpp"
#include "ldbm/grid.hpp"

namespace ldbm {

/// Radial weight rho(x) = |x|^alpha.
///
/// The main pipeline requires alpha >= 2; `relaxed` admits the full range
/// alpha > -2 on which the weighted form is defined.
class WeightSpec {
 public:
  explicit WeightSpec(double alpha = 2.0, bool relaxed = false);

  double alpha() const { return alpha_; }
  bool relaxed() const { return relaxed_; }
  double operator()(Point x) const;

 private:
  double alpha_;
  bool relaxed_;
};

/// Identifies the field realization a density or clock was built from.
struct FieldProvenance {
  std::uint64_t seed = 0;
  std::uint32_t draw = 0;
  int level = 0;

  friend bool operator==(const FieldProvenance&, const FieldProvenance&) = default;
};

FieldProvenance provenance_of(const FieldState& field);

/// Per-cell density of the regularized measure
///   exp(gamma X_n(z) - gamma^2/2 log c_n) [* rho(z)] dz.
struct ChaosDensity {
  GridSpec grid = GridSpec::default_grid();
  double gamma = 0.0;
  int level = 0;
  std::optional<WeightSpec> weight;
  std::vector<double> density;
  FieldProvenance provenance;
  double variance = 0.0;  // normalization E[X_n^2] = log c_n

  bool with_weight() const { return weight.has_value(); }
};

/// gamma must lie in [0, 2).
void check_subcritical(double gamma);

ChaosDensity build_regularized_measure(const FieldState& field, double gamma, std::optional<WeightSpec> weight);

struct MassResult {
  double mass = 0.0;
  std::size_t cells = 0;
  bool empty = false;  // region met no cell centre
};

/// Riemann sum over cells whose centre lies in the region.
MassResult measure_of_set(const ChaosDensity& density, const Region& region);

struct DominationReport {
  double lhs = 0.0;         // M^rho(G)
  double rhs = 0.0;         // sup_G rho * M(G)
  double sup_weight = 0.0;  // sup of rho over cell centres in G
  bool holds = false;
};

/// Grid-level check of M^rho_{n,gamma}(G) <= sup_G rho * M_{n,gamma}(G).
DominationReport check_weight_domination(const ChaosDensity& weighted, const ChaosDensity& unweighted,
                                         const Region& region);

struct SmallBallFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the mean-mass prefactor
  double slope_se = 0.0;
  std::vector<double> radii;
  std::vector<double> mean_mass;
  std::vector<double> mass_se;
  /// log of the smallest c with M_i(B_r(x)) <= c r^slope for every member i and fitted radius r.
  double envelope_intercept = 0.0;
};

/// Fits log(mean M(B_r(x))) = intercept + slope log r over an ensemble.
///
/// Requires at least 4 radii spanning a decade, every radius at least two cell
/// widths, and every ball inside the grid.
SmallBallFit smallball_scaling(std::span<const ChaosDensity> ensemble, Point center, std::span<const double> radii);

/// Log-spaced radii from `smallest` to `largest`.
std::vector<double> log_spaced(double smallest, double largest, std::size_t count);

}  // namespace ldbm
