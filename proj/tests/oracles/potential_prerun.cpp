// Independent Monte Carlo of the 1-potential on E_3 for the field realization
// used in the acceptance suite: own Euler stepper (mt19937_64), own bilinear
// interpolation of X_n inside exp(gamma X - gamma^2/2 log c_n).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "ldbm/gff.hpp"
#include "ldbm/potential.hpp"

using namespace ldbm;

int main(int argc, char** argv) {
  const long paths = argc > 1 ? std::atol(argv[1]) : 10000;
  const int level = argc > 2 ? std::atoi(argv[2]) : 6;
  const double gamma = 0.5, dt = 1e-3, horizon = 10.0;
  const GridSpec grid = GridSpec::centered_square(3.5, 56);
  const FieldSampler sampler(grid, CutoffSequence::dyadic(), MassParam(1.0));
  const FieldState field = sampler.sample(level, 42, 0);

  const int n = grid.nx();
  const double h = grid.cell_width();
  const std::vector<double>& f = field.values;
  const auto integrand = [&](double x, double y) {
    // Nodes at -3.5 + (i + 1/2) h; clamp to the node hull.
    const double u = std::clamp((x + 3.5) / h - 0.5, 0.0, n - 1.0);
    const double v = std::clamp((y + 3.5) / h - 0.5, 0.0, n - 1.0);
    const int i = std::min(static_cast<int>(u), n - 2), j = std::min(static_cast<int>(v), n - 2);
    const double a = u - i, b = v - j;
    const double X = (1 - a) * (1 - b) * f[j * n + i] + a * (1 - b) * f[j * n + i + 1] + (1 - a) * b * f[(j + 1) * n + i] +
                     a * b * f[(j + 1) * n + i + 1];
    return std::exp(gamma * X - 0.5 * gamma * gamma * field.variance);
  };

  const auto probes = polar_probes(AnnulusDomain(3));
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  const long steps = std::lround(horizon / dt);
  const double decay = std::exp(-dt);
  double sup = 0.0, sup_se = 0.0;
  for (Point x0 : probes) {
    double s = 0.0, s2 = 0.0;
    for (long p = 0; p < paths; ++p) {
      double x = x0.x, y = x0.y, disc = 1.0, prev = integrand(x, y), sum = 0.0;
      for (long i = 0; i < steps; ++i) {
        const double r2 = x * x + y * y;
        x += dt * x / r2 + normal(gen);
        y += dt * y / r2 + normal(gen);
        const double q = x * x + y * y;
        if (!(q > 1.0 / 9.0 && q < 9.0)) break;
        disc *= decay;
        const double cur = disc * integrand(x, y);
        sum += 0.5 * dt * (prev + cur);
        prev = cur;
      }
      s += sum;
      s2 += sum * sum;
    }
    const double mean = s / paths;
    const double se = std::sqrt((s2 / paths - mean * mean) / (paths - 1));
    std::printf("probe (%.6f, %.6f): %.6f +- %.6f\n", x0.x, x0.y, mean, se);
    if (mean > sup) sup = mean, sup_se = se;
  }
  std::printf("level=%d paths=%ld sup=%.6f se=%.6f\n", level, paths, sup, sup_se);
}
