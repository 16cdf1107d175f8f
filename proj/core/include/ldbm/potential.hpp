#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldbm/chaos.hpp"
#include "ldbm/dbm.hpp"
#include "ldbm/geometry.hpp"
#include "ldbm/gff.hpp"
#include "ldbm/rng.hpp"

namespace ldbm {

struct PotentialParams {
  double gamma = 0.5;
  double alpha = 2.0;
  double dt = 1e-3;
  /// Paths run until they leave G or reach this horizon; the discounted tail is below exp(-horizon) * sup f.
  double horizon = 10.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  std::uint32_t label = streams::potential(0);
};

struct PotentialEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t paths = 0;
  double exited_fraction = 0.0;  // paths that left G before the horizon
};

/// Per-path values of int_0^{sigma_{G^c} ^ T} e^{-t} dF_t, path p drawn from StreamKey{seed, label, p}.
std::vector<double> resolvent_integrals(Point x, const FieldState& field, const Region& G, const PotentialParams& params,
                                        std::vector<char>* exited = nullptr);

/// Monte Carlo 1-potential of 1_G M at x; requires x in G and N >= 200.
PotentialEstimate resolvent_potential_mc(Point x, const FieldState& field, const Region& G,
                                         const PotentialParams& params);

struct PotentialReport {
  std::vector<Point> probes;
  std::vector<PotentialEstimate> estimates;
  double sup = 0.0;
  std::size_t argsup = 0;
  PotentialParams params;
  int level = 0;
};

/// Probe p uses the stream label streams::potential(p).
PotentialReport potential_report(const FieldState& field, const Region& G, std::span<const Point> probes,
                                 PotentialParams params);

/// radial x angular probes on log-spaced radii strictly inside the annulus, alternate rings rotated by half a step.
std::vector<Point> polar_probes(const AnnulusDomain& domain, int radial = 5, int angular = 5);

struct SingularIntegralReport {
  double delta = 0.0;
  std::vector<Point> probes;
  std::vector<double> values;
  double sup = 0.0;
  /// Double integral of |x - y|^{-delta} mu(dx) mu(dy) over G x G.
  double double_integral = 0.0;
  double mass = 0.0;
};

/// Grid sums of int_G |x - y|^{-delta} mu(dy); the probe's own cell uses |x - y| = h/2.
SingularIntegralReport singular_integral_check(const ChaosDensity& density, const Region& G, double delta,
                                               std::span<const Point> probes);

struct DyadicShellReport {
  double shell_sum = 0.0;
  double dyadic_bound = 0.0;
  bool holds = false;
  std::vector<double> ball_radii;  // 2^{1-n} R for the shells used
  std::vector<double> terms;
};

/// Shell sum sum_n 2^{n delta} R^{-delta} M(B_{2^{1-n}R}(x)) against the geometric bound
/// c2 R^{zeta - delta} 2^zeta / (1 - 2^{delta - zeta}) for a Holder bound M(B_r) <= c2 r^zeta.
/// Shells with radius below two cell widths are dropped; the first shell is always kept.
DyadicShellReport dyadic_shell_bound(const ChaosDensity& density, Point x, double R, double delta, double zeta,
                                     double c2);

/// Log-log slope of the ensemble-mean mass of B_r(0).
SmallBallFit origin_mass_decay(std::span<const ChaosDensity> ensemble, std::span<const double> radii);

struct ResolventKernelParams {
  Point source{1.0, 0.0};
  double alpha = 2.0;
  double dt = 1e-3;
  double horizon = 10.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::uint32_t label = streams::resolvent(0);
  double delta = 0.25;
  /// Ring edges in |y - x|, starting at 0; the first ring is the source bin.
  std::vector<double> edges{0.0, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 4.0};
  /// Rings visited by fewer paths are merged outward.
  std::size_t min_occupancy = 100;
};

struct ResolventKernelReport {
  std::vector<double> edges;
  std::vector<double> reference_mass;  // m(ring intersect G)
  std::vector<std::size_t> visits;
  std::vector<double> estimate;        // discounted occupation / m-mass
  std::vector<double> standard_error;
  std::vector<double> scaled;          // estimate * mid^delta
  double max_scaled = 0.0;
  double max_scaled_se = 0.0;
  std::size_t argmax = 0;
  std::size_t source_bin = 0;
  bool source_bin_excluded = true;
  std::vector<std::string> warnings;
  std::size_t paths = 0;
};

/// Discounted occupation density of the process killed on leaving G, relative to m = rho dx.
ResolventKernelReport resolvent_kernel_singularity(const Region& G, const ResolventKernelParams& params);

}  // namespace ldbm
