#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "ldbm/geometry.hpp"
#include "ldbm/rng.hpp"

namespace ldbm {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// E_k = {1/k < |x| < k}, k >= 2.
class AnnulusDomain {
 public:
  explicit AnnulusDomain(int k);

  int k() const { return k_; }
  double inner() const { return 1.0 / k_; }
  double outer() const { return static_cast<double>(k_); }
  bool contains(Point x) const {
    const double r2 = norm2(x);
    return r2 > inner() * inner() && r2 < outer() * outer();
  }
  Annulus region() const { return {{0.0, 0.0}, inner(), outer()}; }

 private:
  int k_;
};

/// Drift (alpha/2) x / |x|^2 = grad(1/2 log |x|^alpha) of the distorted Brownian motion.
Point drift(Point x, double alpha);

/// First grid times with the path outside a domain: sigma counts t > 0 only, D includes t = 0.
struct ExitTimes {
  double sigma = kNever;
  double hitting = kNever;
};

/// Time-discretized trajectory on the uniform grid start_time + i dt.
struct PathSample {
  double dt = 1e-4;
  double start_time = 0.0;
  std::vector<Point> points;
  StreamKey stream;
  double alpha = 2.0;
  std::map<int, ExitTimes> exits;
  /// Grid time of the first point outside the killing domain; kNever for an unkilled path.
  double lifetime = kNever;
  /// Steps recomputed with substeps because they came near the origin.
  std::size_t guard_events = 0;
  /// Steps that still ended inside the origin guard disc after substepping.
  std::size_t guard_flags = 0;

  std::size_t size() const { return points.size(); }
  double time(std::size_t i) const { return start_time + static_cast<double>(i) * dt; }
  double end_time() const { return points.empty() ? start_time : time(points.size() - 1); }
};

struct PathOptions {
  double dt = 1e-4;
  double horizon = 5.0;
  double alpha = 2.0;
  /// Record exit times for these annuli E_k.
  std::vector<int> annuli;
  double origin_guard = 1e-6;
  int guard_substeps = 10;
};

/// Euler-Maruyama stepper for dX = drift(X) dt + dB.
///
/// A step that lands within `origin_guard` of 0, or whose chord passes that
/// close, is recomputed once with `guard_substeps` Brownian-bridge substeps
/// sharing the coarse increment; a step still inside the guard is flagged.
class DbmStepper {
 public:
  DbmStepper(Point start, double alpha, double dt, const StreamKey& stream, double origin_guard = 1e-6,
             int guard_substeps = 10);

  Point position() const { return x_; }
  const Point& step();
  std::size_t guard_events() const { return guard_events_; }
  std::size_t guard_flags() const { return guard_flags_; }

 private:
  Point advance(Point x, double h, Point noise) const;

  Point x_;
  double alpha_;
  double dt_;
  double sqrt_dt_;
  double guard_;
  int substeps_;
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
  std::size_t guard_events_ = 0;
  std::size_t guard_flags_ = 0;
};

/// Number of steps T/dt; throws unless T/dt is an integer (to 1e-9 relative).
std::size_t step_count(double horizon, double dt);

PathSample simulate_path(Point start, const PathOptions& options, const StreamKey& stream);

/// Part process on `domain`: keeps the points strictly before the first grid exit.
PathSample kill_path(const PathSample& path, const AnnulusDomain& domain);

/// Splits at grid index `at`; the point at `at` starts the second piece.
std::pair<PathSample, PathSample> split_path(const PathSample& path, std::size_t at);

struct ConservativenessParams {
  std::size_t paths = 2000;
  double horizon = 5.0;
  double dt = 1e-4;
  double alpha = 2.0;
  Point start{1.0, 0.0};
  std::vector<int> annuli{2, 3, 5, 10};
  /// Radii for the origin-approach proxy P(min |X| < eps).
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.02, 0.01};
  std::uint64_t seed = 1;
};

struct ConservativenessReport {
  std::vector<int> annuli;
  std::vector<double> survival;  // P(sigma_{E_k^c} > T)
  std::vector<double> survival_se;
  std::size_t nonfinite_paths = 0;
  std::size_t guard_events = 0;
  std::size_t guard_flags = 0;
  double min_radius = kNever;
  std::vector<double> epsilons;
  std::vector<double> below_epsilon;  // P(min_t |X_t| < eps)
  bool survival_monotone = false;
  bool passed = false;
};

ConservativenessReport conservativeness_diagnostic(const ConservativenessParams& params);

}  // namespace ldbm
