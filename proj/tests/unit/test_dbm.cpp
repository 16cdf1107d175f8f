#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldbm/dbm.hpp"
#include "ldbm/error.hpp"
#include "ldbm/stats.hpp"

using namespace ldbm;

namespace {

StreamKey path_key(std::uint32_t i, std::uint64_t seed = 5) { return {seed, streams::path(), i}; }

PathSample make_path(std::vector<Point> pts, double dt = 0.1) {
  PathSample p;
  p.dt = dt;
  p.points = std::move(pts);
  return p;
}

}  // namespace

TEST(AnnulusDomain, Membership) {
  const AnnulusDomain e2(2);
  EXPECT_TRUE(e2.contains({1.0, 0.0}));
  EXPECT_FALSE(e2.contains({0.5, 0.0}));  // open at 1/k
  EXPECT_FALSE(e2.contains({0.0, 2.0}));  // open at k
  EXPECT_TRUE(e2.contains({0.0, 1.99}));
  EXPECT_THROW(AnnulusDomain(1), DomainError);
  const AnnulusDomain e3(3);
  for (double r = 0.01; r < 4.0; r += 0.01)
    if (e2.contains({r, 0.0})) EXPECT_TRUE(e3.contains({r, 0.0}));
}

TEST(Drift, Examples) {
  EXPECT_EQ(drift({1.0, 0.0}, 2.0), (Point{1.0, 0.0}));
  EXPECT_EQ(drift({0.0, 2.0}, 4.0), (Point{0.0, 1.0}));
  EXPECT_EQ(drift({3.0, 4.0}, 0.0), (Point{0.0, 0.0}));
  EXPECT_THROW(drift({0.0, 0.0}, 2.0), DomainError);
}

TEST(Drift, FiniteDifferencesOfHalfLogWeight) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logr(std::log(0.1), std::log(10.0)), angle(0.0, 6.283185307179586);
  const double alpha = 2.0;
  const auto potential = [&](Point x) { return 0.5 * alpha * std::log(norm(x)); };
  for (int i = 0; i < 100; ++i) {
    const double r = std::exp(logr(rng));
    const double t = angle(rng);
    const Point x{r * std::cos(t), r * std::sin(t)};
    const double h = 1e-5 * r;
    const Point fd{(potential({x.x + h, x.y}) - potential({x.x - h, x.y})) / (2 * h),
                   (potential({x.x, x.y + h}) - potential({x.x, x.y - h})) / (2 * h)};
    const Point d = drift(x, alpha);
    EXPECT_LT(norm(fd - d) / norm(d), 1e-6) << "x=(" << x.x << "," << x.y << ")";
  }
}

TEST(SimulatePath, DeterministicAndGridShape) {
  PathOptions o;
  o.dt = 1e-3;
  o.horizon = 1.0;
  o.annuli = {2, 3};
  const auto a = simulate_path({1.0, 0.0}, o, path_key(3));
  const auto b = simulate_path({1.0, 0.0}, o, path_key(3));
  EXPECT_EQ(a.size(), 1001u);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(simulate_path({1.0, 0.0}, o, path_key(4)).points, a.points);
  EXPECT_DOUBLE_EQ(a.end_time(), 1.0);
  for (const Point& p : a.points) EXPECT_TRUE(std::isfinite(p.x) && std::isfinite(p.y));
}

TEST(SimulatePath, Preconditions) {
  PathOptions o;
  o.horizon = 1.0;
  o.dt = 0.3;
  EXPECT_THROW(simulate_path({1.0, 0.0}, o, path_key(0)), DomainError);  // T/dt not integral
  o.dt = 1e-3;
  EXPECT_THROW(simulate_path({0.0, 0.0}, o, path_key(0)), DomainError);
}

TEST(SimulatePath, PlanarBrownianMotionWithoutWeight) {
  PathOptions o;
  o.alpha = 0.0;
  o.dt = 1e-3;
  o.horizon = 1.0;
  RunningStats msd, incx, incy;
  for (std::uint32_t i = 0; i < 2000; ++i) {
    const auto p = simulate_path({1.0, 0.0}, o, path_key(i));
    msd.add(norm2(p.points.back() - p.points.front()));
    for (std::size_t k = 1; k < p.size(); k += 50) {
      const Point d = p.points[k] - p.points[k - 1];
      incx.add(d.x * d.x);
      incy.add(d.y * d.y);
    }
  }
  EXPECT_NEAR(msd.mean(), 2.0, 3.0 * msd.standard_error());
  EXPECT_NEAR(incx.mean(), o.dt, 3.0 * incx.standard_error());
  EXPECT_NEAR(incy.mean(), o.dt, 3.0 * incy.standard_error());
}

TEST(SimulatePath, OutwardDriftRaisesLogRadius) {
  PathOptions o;
  o.dt = 1e-3;
  o.horizon = 1.0;
  RunningStats inc;
  for (std::uint32_t i = 0; i < 2000; ++i) {
    const auto p = simulate_path({1.0, 0.0}, o, path_key(i, 9));
    inc.add(std::log(norm(p.points.back())) - std::log(norm(p.points[p.size() / 2])));
  }
  EXPECT_GT(inc.mean(), 3.0 * inc.standard_error());
  // Radial part is a 4-dimensional Bessel process: E log R_1 - E log R_{1/2} from 20000 exact draws.
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z;
  RunningStats oracle;
  for (int i = 0; i < 20000; ++i) {
    double a[4] = {1.0, 0.0, 0.0, 0.0}, half, full;
    for (double& c : a) c += std::sqrt(0.5) * z(rng);
    half = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
    for (double& c : a) c += std::sqrt(0.5) * z(rng);
    full = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
    oracle.add(std::log(full) - std::log(half));
  }
  EXPECT_NEAR(inc.mean(), oracle.mean(), 3.0 * std::hypot(inc.standard_error(), oracle.standard_error()));
}

TEST(SimulatePath, ExitTimesOrderedInK) {
  PathOptions o;
  o.dt = 1e-3;
  o.horizon = 2.0;
  o.annuli = {2, 3, 5};
  for (std::uint32_t i = 0; i < 200; ++i) {
    const auto p = simulate_path({1.0, 0.0}, o, path_key(i));
    EXPECT_LE(p.exits.at(2).sigma, p.exits.at(3).sigma);
    EXPECT_LE(p.exits.at(3).sigma, p.exits.at(5).sigma);
    for (const auto& [k, e] : p.exits) EXPECT_LE(e.hitting, e.sigma);
  }
}

TEST(SimulatePath, HittingTimeZeroWhenStartingOutside) {
  PathOptions o;
  o.dt = 1e-3;
  o.horizon = 0.1;
  o.annuli = {2};
  const auto p = simulate_path({3.0, 0.0}, o, path_key(0));
  EXPECT_EQ(p.exits.at(2).hitting, 0.0);
  EXPECT_GT(p.exits.at(2).sigma, 0.0);
}

TEST(OriginGuard, SubstepsTriggerNearOriginAndKeepIncrement) {
  // Start very close to the origin with the drift switched off: the guard fires
  // and the bridge substeps must add up to the coarse Brownian increment.
  const StreamKey key{1, streams::auxiliary(), 0};
  DbmStepper guarded({1e-7, 0.0}, 0.0, 1e-4, key);
  guarded.step();
  EXPECT_EQ(guarded.guard_events(), 1u);
  Philox4x32 engine(key);
  std::normal_distribution<double> normal;
  const double dx = 1e-2 * normal(engine);
  const double dy = 1e-2 * normal(engine);
  EXPECT_NEAR(guarded.position().x, 1e-7 + dx, 1e-15);
  EXPECT_NEAR(guarded.position().y, dy, 1e-15);
}

TEST(KillPath, Examples) {
  const AnnulusDomain e2(2);
  const auto never = make_path({{1, 0}, {1.1, 0}, {1.2, 0}});
  const auto kept = kill_path(never, e2);
  EXPECT_EQ(kept.points, never.points);
  EXPECT_TRUE(std::isinf(kept.lifetime));

  const auto exits = make_path({{1, 0}, {1.5, 0}, {2.5, 0}, {1.0, 0}});
  const auto killed = kill_path(exits, e2);
  EXPECT_EQ(killed.size(), 2u);
  EXPECT_DOUBLE_EQ(killed.lifetime, 2 * 0.1);

  EXPECT_THROW(kill_path(make_path({{3, 0}, {1, 0}}), e2), ContractError);
}

TEST(KillPath, NestedDomains) {
  PathOptions o;
  o.dt = 1e-3;
  o.horizon = 3.0;
  for (std::uint32_t i = 0; i < 50; ++i) {
    const auto p = simulate_path({1.0, 0.0}, o, path_key(i));
    const auto k2 = kill_path(p, AnnulusDomain(2));
    const auto k23 = kill_path(k2, AnnulusDomain(3));
    EXPECT_EQ(k23.points, k2.points);
    EXPECT_EQ(k23.lifetime, k2.lifetime);
  }
}

TEST(SplitPath, SharesSplitPoint) {
  const auto p = make_path({{1, 0}, {1.1, 0}, {1.2, 0}, {1.3, 0}});
  const auto [head, tail] = split_path(p, 2);
  EXPECT_EQ(head.size(), 3u);
  EXPECT_EQ(tail.size(), 2u);
  EXPECT_EQ(head.points.back(), tail.points.front());
  EXPECT_DOUBLE_EQ(tail.start_time, 0.2);
  EXPECT_THROW(split_path(p, 4), IndexError);
}

TEST(Conservativeness, MonotoneSurvivalAndNoExplosion) {
  ConservativenessParams c;
  c.paths = 500;
  c.horizon = 10.0;
  c.dt = 1e-3;
  c.annuli = {2, 5, 10};
  const auto r = conservativeness_diagnostic(c);
  EXPECT_EQ(r.nonfinite_paths, 0u);
  EXPECT_TRUE(r.survival_monotone);
  EXPECT_LE(r.survival[0], r.survival[1]);
  EXPECT_GT(r.min_radius, 0.0);
  EXPECT_TRUE(std::is_sorted(r.below_epsilon.rbegin(), r.below_epsilon.rend()));
  EXPECT_TRUE(r.passed);
}

TEST(Conservativeness, NeedsEnoughPaths) {
  ConservativenessParams c;
  c.paths = 100;
  EXPECT_THROW(conservativeness_diagnostic(c), DomainError);
}
