#include "ldbm/clock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldbm/error.hpp"

namespace ldbm {

namespace {

// Neumaier compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_field(const FieldState& field) {
  if (field.values.size() != field.grid.node_count())
    throw ContractError("field values do not match the field grid");
}

}  // namespace

double clock_integrand(const FieldState& field, double gamma, Point x) {
  if (gamma == 0.0) return 1.0;
  const double value = interpolate_bilinear(field.grid, field.values, x);
  return std::exp(gamma * value - 0.5 * gamma * gamma * field.variance);
}

double ClockSample::value_at(double t) const {
  if (values.empty()) throw IndexError("empty clock");
  const double u = (t - start_time) / dt;
  if (u <= 0.0) return values.front();
  const auto last = values.size() - 1;
  if (u >= static_cast<double>(last)) return values.back();
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  return values[i] + f * (values[i + 1] - values[i]);
}

ClockSample accumulate_pcaf(const PathSample& path, const FieldState& field, double gamma,
                            std::optional<AnnulusDomain> domain) {
  check_subcritical(gamma);
  require_field(field);
  if (path.points.empty()) throw ContractError("empty path");
  const Point start = path.points.front();
  if (!field.grid.contains(start)) throw ContractError("path starts outside the field grid");
  if (domain && !domain->contains(start))
    throw ContractError("path starts outside E_" + std::to_string(domain->k()));

  ClockSample clock;
  clock.dt = path.dt;
  clock.start_time = path.start_time;
  clock.field = provenance_of(field);
  clock.gamma = gamma;
  if (domain) clock.annulus = domain->k();
  clock.values.assign(path.size(), 0.0);

  CompensatedSum sum;
  double previous = clock_integrand(field, gamma, start);
  const double half_dt = 0.5 * path.dt;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Point x = path.points[i];
    const bool in_grid = field.grid.contains(x);
    if (!in_grid || (domain && !domain->contains(x))) {
      clock.frozen_at = path.time(i);
      clock.left_grid = !in_grid && (!domain || domain->contains(x));
      std::fill(clock.values.begin() + static_cast<std::ptrdiff_t>(i), clock.values.end(), sum.value());
      break;
    }
    const double current = clock_integrand(field, gamma, x);
    sum.add(half_dt * (previous + current));
    clock.values[i] = sum.value();
    previous = current;
  }
  return clock;
}

ConsistencyResult consistency_check(const PathSample& path, const FieldState& field, double gamma, int k) {
  const AnnulusDomain inner(k);
  const AnnulusDomain outer(k + 1);
  if (path.points.empty() || !inner.contains(path.points.front()))
    throw ContractError("consistency check: start point outside E_" + std::to_string(k));
  const ClockSample fk = accumulate_pcaf(path, field, gamma, inner);
  const ClockSample fk1 = accumulate_pcaf(path, field, gamma, outer);

  ConsistencyResult result;
  std::size_t end = path.size();
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!inner.contains(path.points[i])) {
      result.sigma = path.time(i);
      end = i;
      break;
    }
  }
  for (std::size_t i = 0; i < end; ++i)
    result.residual = std::max(result.residual, std::abs(fk.values[i] - fk1.values[i]));
  result.scale = fk.values[end - 1];
  result.tolerance = 1e-12 * (1.0 + result.scale);
  result.passed = result.residual <= result.tolerance;
  return result;
}

double invert_clock(const ClockSample& clock, double tau) {
  if (clock.values.empty()) throw IndexError("empty clock");
  if (!(tau >= 0.0) || !(tau < clock.final_value())) {
    std::ostringstream os;
    os.precision(17);
    os << "clock exhausted: reading " << tau << " outside [0, " << clock.final_value() << ")";
    throw IndexError(os.str());
  }
  const auto it = std::upper_bound(clock.values.begin(), clock.values.end(), tau);
  const auto j = static_cast<std::size_t>(it - clock.values.begin());
  const double lo = clock.values[j - 1];
  const double hi = clock.values[j];
  return clock.time(j - 1) + (tau - lo) / (hi - lo) * clock.dt;
}

Point path_position(const PathSample& path, double s) {
  if (path.points.empty()) throw IndexError("empty path");
  const double u = (s - path.start_time) / path.dt;
  if (u <= 0.0) return path.points.front();
  const auto last = path.points.size() - 1;
  if (u >= static_cast<double>(last)) return path.points.back();
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  const Point a = path.points[i];
  const Point b = path.points[i + 1];
  return a + f * (b - a);
}

std::vector<Point> time_change(const PathSample& path, const ClockSample& clock, std::span<const double> times) {
  if (clock.size() != path.size() || clock.dt != path.dt || clock.start_time != path.start_time)
    throw ContractError("clock and path are not on the same time grid");
  std::vector<Point> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(path_position(path, invert_clock(clock, t)));
  return out;
}

}  // namespace ldbm
