#include "ldbm/dbm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ldbm/error.hpp"
#include "ldbm/parallel.hpp"

namespace ldbm {

AnnulusDomain::AnnulusDomain(int k) : k_(k) {
  if (k < 2) throw DomainError("annulus index k must be >= 2, got " + std::to_string(k));
}

Point drift(Point x, double alpha) {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw DomainError("drift is singular at the origin");
  const double s = 0.5 * alpha / r2;
  return {s * x.x, s * x.y};
}

namespace {

constexpr int kMaxSubsteps = 64;

double segment_distance_to_origin(Point a, Point b) {
  const Point d = b - a;
  const double len2 = norm2(d);
  if (len2 == 0.0) return norm(a);
  const double t = std::clamp(-(a.x * d.x + a.y * d.y) / len2, 0.0, 1.0);
  return norm(a + t * d);
}

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

DbmStepper::DbmStepper(Point start, double alpha, double dt, const StreamKey& stream, double origin_guard,
                       int guard_substeps)
    : x_(start),
      alpha_(alpha),
      dt_(dt),
      sqrt_dt_(std::sqrt(dt)),
      guard_(origin_guard),
      substeps_(guard_substeps),
      engine_(stream) {
  if (norm2(start) == 0.0) throw DomainError("distorted Brownian motion cannot start at the origin");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (guard_substeps < 1 || guard_substeps > kMaxSubsteps)
    throw DomainError("guard substeps must lie in [1, 64]");
}

Point DbmStepper::advance(Point x, double h, Point noise) const {
  if (alpha_ == 0.0 || norm2(x) == 0.0) return x + noise;
  return x + h * drift(x, alpha_) + noise;
}

const Point& DbmStepper::step() {
  const Point dw{sqrt_dt_ * normal_(engine_), sqrt_dt_ * normal_(engine_)};
  Point next = advance(x_, dt_, dw);
  if (norm(next) < guard_ || segment_distance_to_origin(x_, next) < guard_) {
    ++guard_events_;
    // Brownian bridge pinned to the coarse increment.
    std::array<Point, kMaxSubsteps> w;
    const double h = dt_ / substeps_;
    const double sqrt_h = std::sqrt(h);
    Point mean{};
    for (int j = 0; j < substeps_; ++j) {
      w[j] = {sqrt_h * normal_(engine_), sqrt_h * normal_(engine_)};
      mean = mean + w[j];
    }
    mean = (1.0 / substeps_) * mean;
    const Point share = (1.0 / substeps_) * dw;
    Point y = x_;
    for (int j = 0; j < substeps_; ++j) y = advance(y, h, w[j] - mean + share);
    if (norm(y) < guard_) ++guard_flags_;
    next = y;
  }
  x_ = next;
  return x_;
}

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw DomainError("need dt > 0 and T >= 0");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "T/dt must be an integer (T=" << horizon << ", dt=" << dt << ")";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(steps);
}

PathSample simulate_path(Point start, const PathOptions& options, const StreamKey& stream) {
  const std::size_t steps = step_count(options.horizon, options.dt);
  std::vector<AnnulusDomain> domains;
  for (int k : options.annuli) domains.emplace_back(k);

  PathSample path;
  path.dt = options.dt;
  path.stream = stream;
  path.alpha = options.alpha;
  path.points.reserve(steps + 1);
  path.points.push_back(start);

  std::vector<ExitTimes> exits(domains.size());
  for (std::size_t d = 0; d < domains.size(); ++d)
    if (!domains[d].contains(start)) exits[d].hitting = 0.0;
  std::size_t open = domains.size();

  DbmStepper stepper(start, options.alpha, options.dt, stream, options.origin_guard, options.guard_substeps);
  for (std::size_t i = 1; i <= steps; ++i) {
    const Point previous = stepper.position();
    const Point& x = stepper.step();
    if (!finite(x)) {
      std::ostringstream os;
      os.precision(17);
      os << "nonfinite position at step " << i << " (t=" << path.time(i) << ") from (" << previous.x << ", "
         << previous.y << "), stream " << to_string(stream);
      throw NumericalError(os.str());
    }
    path.points.push_back(x);
    if (open == 0) continue;
    for (std::size_t d = 0; d < domains.size(); ++d) {
      if (exits[d].sigma != kNever || domains[d].contains(x)) continue;
      exits[d].sigma = path.time(i);
      if (exits[d].hitting == kNever) exits[d].hitting = exits[d].sigma;
      --open;
    }
  }
  for (std::size_t d = 0; d < domains.size(); ++d) path.exits[domains[d].k()] = exits[d];
  path.guard_events = stepper.guard_events();
  path.guard_flags = stepper.guard_flags();
  return path;
}

PathSample kill_path(const PathSample& path, const AnnulusDomain& domain) {
  if (path.points.empty() || !domain.contains(path.points.front()))
    throw ContractError("kill_path: start point outside E_" + std::to_string(domain.k()));
  PathSample killed = path;
  for (std::size_t j = 1; j < path.points.size(); ++j) {
    if (!domain.contains(path.points[j])) {
      killed.points.resize(j);
      killed.lifetime = path.time(j);
      break;
    }
  }
  return killed;
}

std::pair<PathSample, PathSample> split_path(const PathSample& path, std::size_t at) {
  if (at >= path.points.size()) throw IndexError("split index beyond the end of the path");
  PathSample head = path;
  head.points.resize(at + 1);
  head.lifetime = kNever;
  PathSample tail = path;
  tail.points.assign(path.points.begin() + static_cast<std::ptrdiff_t>(at), path.points.end());
  tail.start_time = path.time(at);
  return {std::move(head), std::move(tail)};
}

ConservativenessReport conservativeness_diagnostic(const ConservativenessParams& params) {
  if (params.paths < 500) throw DomainError("conservativeness diagnostic needs at least 500 paths");
  const std::size_t steps = step_count(params.horizon, params.dt);
  std::vector<int> annuli = params.annuli;
  std::sort(annuli.begin(), annuli.end());
  std::vector<AnnulusDomain> domains;
  for (int k : annuli) domains.emplace_back(k);

  struct Outcome {
    std::vector<char> survived;
    double min_radius = kNever;
    bool nonfinite = false;
    std::size_t guard_events = 0;
    std::size_t guard_flags = 0;
  };
  std::vector<Outcome> outcomes(params.paths);

  parallel_for(params.paths, [&](std::size_t p) {
    Outcome& out = outcomes[p];
    out.survived.assign(domains.size(), 1);
    const StreamKey key{params.seed, streams::path(), static_cast<std::uint32_t>(p)};
    DbmStepper stepper(params.start, params.alpha, params.dt, key);
    double min_r2 = norm2(params.start);
    for (std::size_t i = 1; i <= steps; ++i) {
      const Point& x = stepper.step();
      if (!finite(x)) {
        out.nonfinite = true;
        break;
      }
      const double r2 = norm2(x);
      min_r2 = std::min(min_r2, r2);
      for (std::size_t d = 0; d < domains.size(); ++d)
        if (out.survived[d] && !domains[d].contains(x)) out.survived[d] = 0;
    }
    out.min_radius = std::sqrt(min_r2);
    out.guard_events = stepper.guard_events();
    out.guard_flags = stepper.guard_flags();
  });

  ConservativenessReport report;
  report.annuli = annuli;
  report.epsilons = params.epsilons;
  std::sort(report.epsilons.begin(), report.epsilons.end(), std::greater<>());
  report.survival.assign(domains.size(), 0.0);
  report.below_epsilon.assign(report.epsilons.size(), 0.0);
  const double n = static_cast<double>(params.paths);
  for (const Outcome& out : outcomes) {
    if (out.nonfinite) ++report.nonfinite_paths;
    report.guard_events += out.guard_events;
    report.guard_flags += out.guard_flags;
    report.min_radius = std::min(report.min_radius, out.min_radius);
    for (std::size_t d = 0; d < domains.size(); ++d) report.survival[d] += out.survived[d] ? 1.0 : 0.0;
    for (std::size_t e = 0; e < report.epsilons.size(); ++e)
      if (out.min_radius < report.epsilons[e]) report.below_epsilon[e] += 1.0;
  }
  for (double& s : report.survival) s /= n;
  for (double& b : report.below_epsilon) b /= n;
  for (double s : report.survival) report.survival_se.push_back(std::sqrt(s * (1.0 - s) / n));
  report.survival_monotone = std::is_sorted(report.survival.begin(), report.survival.end());
  const bool flags_ok = params.alpha < 2.0 || report.guard_flags == 0;
  report.passed = report.nonfinite_paths == 0 && report.survival_monotone && flags_ok && report.min_radius > 0.0;
  return report;
}

}  // namespace ldbm
