#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldbm/clock.hpp"
#include "ldbm/error.hpp"

using namespace ldbm;

namespace {

const GridSpec kGrid = GridSpec::centered_square(3.5, 56);

FieldState constant_field(double value, double variance) {
  FieldState f;
  f.level = 4;
  f.grid = kGrid;
  f.values.assign(kGrid.node_count(), value);
  f.variance = variance;
  return f;
}

const FieldSampler& sampler() {
  static const FieldSampler fs(kGrid, CutoffSequence::dyadic(), MassParam(1.0));
  return fs;
}

PathSample sample_path(std::uint32_t i, double horizon = 0.5, double dt = 1e-3) {
  PathOptions o;
  o.dt = dt;
  o.horizon = horizon;
  return simulate_path({1.0, 0.0}, o, {11, streams::path(), i});
}

}  // namespace

TEST(Clock, RevuzReferenceIsWeighted) {
  static_assert(REVUZ_REFERENCE == RevuzReference::weighted);
  // With gamma = 0 the clock is t, not int rho(X_s) ds.
  const auto path = sample_path(0);
  const auto clock = accumulate_pcaf(path, constant_field(0.3, 2.0), 0.0);
  double rho_integral = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    rho_integral += 0.5 * path.dt * (norm2(path.points[i - 1]) + norm2(path.points[i]));
  EXPECT_NEAR(clock.final_value(), path.end_time(), 1e-12);
  EXPECT_GT(std::abs(rho_integral - path.end_time()), 1e-3);
}

TEST(Clock, GammaZeroIsElapsedTime) {
  const auto path = sample_path(1);
  const auto clock = accumulate_pcaf(path, sampler().sample(6, 3, 0), 0.0);
  EXPECT_EQ(clock.values.front(), 0.0);
  for (std::size_t i = 0; i < clock.size(); i += 97) EXPECT_NEAR(clock.values[i], path.time(i), 1e-12 * (1 + path.time(i)));
}

TEST(Clock, ConstantFieldScalesTime) {
  const double c = 0.8, v = 4.0 * std::log(2.0), gamma = 0.5;
  const auto path = sample_path(2);
  const auto clock = accumulate_pcaf(path, constant_field(c, v), gamma);
  const double factor = std::exp(gamma * c - 0.5 * gamma * gamma * v);
  EXPECT_NEAR(clock.final_value(), path.end_time() * factor, 1e-12 * factor);
}

TEST(Clock, StrictlyIncreasingOnSampledField) {
  const auto path = sample_path(3);
  const auto clock = accumulate_pcaf(path, sampler().sample(6, 3, 0), 0.5);
  for (std::size_t i = 1; i < clock.size(); ++i) ASSERT_GT(clock.values[i], clock.values[i - 1]);
}

TEST(Clock, AdditivityOverSplitPath) {
  const auto field = sampler().sample(6, 3, 1);
  const auto path = sample_path(4);
  const auto full = accumulate_pcaf(path, field, 0.5);
  const auto [head, tail] = split_path(path, 300);
  const double sum = accumulate_pcaf(head, field, 0.5).final_value() + accumulate_pcaf(tail, field, 0.5).final_value();
  EXPECT_NEAR(sum, full.final_value(), 1e-12 * full.final_value());
}

TEST(Clock, FreezesAfterExit) {
  const auto field = sampler().sample(6, 3, 2);
  for (std::uint32_t i = 0; i < 40; ++i) {
    const auto path = sample_path(i, 2.0);
    const auto clock = accumulate_pcaf(path, field, 0.5, AnnulusDomain(2));
    if (std::isinf(clock.frozen_at)) continue;
    const auto j = static_cast<std::size_t>(std::llround(clock.frozen_at / path.dt));
    EXPECT_FALSE(AnnulusDomain(2).contains(path.points[j]));
    for (std::size_t k = j; k < clock.size(); ++k) EXPECT_EQ(clock.values[k], clock.values[j - 1]);
  }
}

TEST(Clock, Preconditions) {
  const auto path = sample_path(5);
  EXPECT_THROW(accumulate_pcaf(path, constant_field(0.0, 1.0), 2.0), DomainError);
  PathSample outside = path;
  outside.points.front() = {5.0, 0.0};
  EXPECT_THROW(accumulate_pcaf(outside, constant_field(0.0, 1.0), 0.5), ContractError);
  outside.points.front() = {2.5, 0.0};
  EXPECT_THROW(accumulate_pcaf(outside, constant_field(0.0, 1.0), 0.5, AnnulusDomain(2)), ContractError);
  FieldState broken = constant_field(0.0, 1.0);
  broken.values.pop_back();
  EXPECT_THROW(accumulate_pcaf(path, broken, 0.5), ContractError);
}

TEST(Consistency, ResidualVanishes) {
  const auto field = sampler().sample(6, 3, 4);
  bool saw_exit = false;
  for (std::uint32_t i = 0; i < 30; ++i) {
    const auto path = sample_path(i, 3.0);
    for (int k : {2, 3}) {
      const auto r = consistency_check(path, field, 0.5, k);
      EXPECT_TRUE(r.passed);
      EXPECT_LE(r.residual, 1e-12 * (1 + r.scale));
      saw_exit = saw_exit || !std::isinf(r.sigma);
    }
  }
  EXPECT_TRUE(saw_exit);
}

TEST(Consistency, GammaZeroAndNeverExiting) {
  PathSample p;
  p.dt = 0.01;
  for (int i = 0; i < 100; ++i) p.points.push_back({1.0 + 0.001 * i, 0.0});
  const auto r = consistency_check(p, constant_field(0.0, 0.0), 0.0, 2);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_TRUE(std::isinf(r.sigma));
  EXPECT_THROW(consistency_check(p, constant_field(0.0, 0.0), 0.0, 0), DomainError);
  p.points.front() = {0.2, 0.0};
  EXPECT_THROW(consistency_check(p, constant_field(0.0, 0.0), 0.0, 2), ContractError);
}

TEST(InvertClock, GammaZeroIdentity) {
  const auto path = sample_path(6);
  const auto clock = accumulate_pcaf(path, constant_field(0.0, 0.0), 0.0);
  for (double tau : {0.0, 0.1, 0.25, 0.499}) EXPECT_NEAR(invert_clock(clock, tau), tau, 1e-12);
}

TEST(InvertClock, RoundTripAgainstDirectScan) {
  const auto path = sample_path(7);
  const auto clock = accumulate_pcaf(path, sampler().sample(6, 3, 5), 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, clock.final_value());
  for (int i = 0; i < 100; ++i) {
    const double tau = u(rng);
    const double s = invert_clock(clock, tau);
    EXPECT_NEAR(clock.value_at(s), tau, 1e-10);
    std::size_t j = 0;
    while (clock.values[j] <= tau) ++j;
    EXPECT_GE(s, clock.time(j - 1));
    EXPECT_LE(s, clock.time(j));
  }
}

TEST(InvertClock, ConstantFactor) {
  const double c = 1.2;
  const auto path = sample_path(8);
  const auto clock = accumulate_pcaf(path, constant_field(c, 0.0), 1.0);
  for (double tau : {0.1, 1.0, 1.5}) EXPECT_NEAR(invert_clock(clock, tau), tau * std::exp(-c), 1e-12);
}

TEST(InvertClock, Exhausted) {
  const auto path = sample_path(9);
  const auto clock = accumulate_pcaf(path, constant_field(0.0, 0.0), 0.0);
  EXPECT_THROW(invert_clock(clock, clock.final_value()), IndexError);
  EXPECT_THROW(invert_clock(clock, -1e-3), IndexError);
}

TEST(TimeChange, IdentityForGammaZero) {
  const auto path = sample_path(10);
  const auto clock = accumulate_pcaf(path, sampler().sample(6, 3, 6), 0.0);
  std::vector<double> times;
  for (int i = 0; i < 200; ++i) times.push_back(0.00247 * i);
  const auto z = time_change(path, clock, times);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_LT(distance(z[i], path_position(path, times[i])), 1e-10);
}

TEST(TimeChange, ScaledForConstantFactor) {
  const double c = 0.7;
  const auto path = sample_path(11);
  const auto clock = accumulate_pcaf(path, constant_field(c, 0.0), 1.0);
  for (double t : {0.05, 0.2, 0.5}) {
    const auto z = time_change(path, clock, std::vector<double>{t});
    EXPECT_LT(distance(z[0], path_position(path, t * std::exp(-c))), 1e-10);
  }
}

TEST(TimeChange, MonotoneTraversal) {
  const auto path = sample_path(12);
  const auto clock = accumulate_pcaf(path, sampler().sample(6, 3, 7), 0.5);
  double previous = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double s = invert_clock(clock, clock.final_value() * i / 500.0);
    EXPECT_GE(s, previous);
    previous = s;
  }
}

TEST(TimeChange, GridMismatch) {
  const auto path = sample_path(13);
  auto clock = accumulate_pcaf(path, constant_field(0.0, 0.0), 0.0);
  clock.values.pop_back();
  EXPECT_THROW(time_change(path, clock, std::vector<double>{0.1}), ContractError);
}

TEST(Clock, RefinementStability) {
  const auto field = sampler().sample(6, 3, 8);
  for (std::uint32_t i = 0; i < 5; ++i) {
    const auto fine = sample_path(100 + i, 5.0, 5e-5);
    PathSample coarse = fine;
    coarse.dt = 1e-4;
    coarse.points.clear();
    for (std::size_t k = 0; k < fine.size(); k += 2) coarse.points.push_back(fine.points[k]);
    const double a = accumulate_pcaf(fine, field, 0.5).final_value();
    const double b = accumulate_pcaf(coarse, field, 0.5).final_value();
    EXPECT_LT(std::abs(a - b) / a, 0.05);
  }
}
