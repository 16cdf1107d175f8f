#pragma once

#include <string>
#include <vector>

namespace ldbm {

/// Mass m > 0 of the operator m^2 - Laplacian.
class MassParam {
 public:
  explicit MassParam(double m = 1.0);
  double value() const { return m_; }

 private:
  double m_;
};

/// Strictly increasing cutoffs c_1 = 1 < c_2 < ... with the base value c_0 = 1.
///
/// Layer n covers scales s in [c_{n-1}, c_n]; since c_0 = c_1 the first layer
/// carries zero variance and the layers tile [1, infinity) exactly.
class CutoffSequence {
 public:
  /// c_n = 2^{n-1}; extends on demand.
  static CutoffSequence dyadic();
  /// Fixed list c_1, ..., c_N. Requires c_1 = 1 and strict increase.
  static CutoffSequence from_values(std::vector<double> values);

  /// c_n for 0 <= n <= max_index(); throws IndexError otherwise.
  double cutoff(int n) const;
  int max_index() const;
  bool is_dyadic() const { return dyadic_; }
  std::string describe() const;

 private:
  CutoffSequence(std::vector<double> values, bool dyadic) : values_(std::move(values)), dyadic_(dyadic) {}

  std::vector<double> values_;  // explicit c_1..c_N (empty for the dyadic preset)
  bool dyadic_;
};

struct QuadratureOptions {
  /// Relative tolerance handed to the adaptive Gauss-Kronrod driver.
  double tolerance = 1e-13;
  unsigned max_depth = 15;
};

enum class KernelMethod {
  quadrature,  // ground truth: adaptive quadrature of the defining integral
  bessel       // closed form m r K_1(m r), validated against quadrature in tests
};

/// k_m(z) for |z| = r, by adaptive quadrature of (1/2) int_0^inf exp(-m^2 r^2/(2s) - s/2) ds.
double kernel_km(double r, MassParam m, const QuadratureOptions& options = {});

/// Closed-form k_m(r) = m r K_1(m r).
double kernel_km_bessel(double r, MassParam m);

double kernel_km(double r, MassParam m, KernelMethod method, const QuadratureOptions& options = {});

/// int_lower^upper k_m(s r) / s ds.
double scale_integral(double r, double lower, double upper, MassParam m, KernelMethod method = KernelMethod::bessel,
                      const QuadratureOptions& options = {});

/// Covariance of layer Y_n at lag r: int_{c_{n-1}}^{c_n} k_m(s r)/s ds.
double layer_covariance(double r, int n, const CutoffSequence& seq, MassParam m,
                        KernelMethod method = KernelMethod::bessel, const QuadratureOptions& options = {});

/// Massive Green function truncated at scale `upper`: int_1^upper k_m(s r)/s ds. Requires r > 0, upper > 1.
double green_massive(double r, MassParam m, double upper, KernelMethod method = KernelMethod::bessel,
                     const QuadratureOptions& options = {});

/// Tabulated layer covariance r -> C_n(r) for field sampling.
///
/// Nodes are uniform in u = log r on [log r_min, log r_cut]; the interpolant is
/// cubic Hermite in u using the exact derivative dC/du = k_m(c_n r) - k_m(c_{n-1} r),
/// with a Fritsch-Carlson limiter so the table stays monotone. Below r_min the
/// zero-lag value is returned, beyond r_cut zero.
class CovarianceTable {
 public:
  CovarianceTable(int n, const CutoffSequence& seq, MassParam m, double log_step = 0.02);

  double operator()(double r) const;

  int layer() const { return layer_; }
  double zero_lag() const { return zero_lag_; }
  double cutoff_radius() const { return r_cut_; }
  std::size_t node_count() const { return values_.size(); }
  /// Number of intervals whose derivatives the monotonicity limiter modified.
  std::size_t limited_intervals() const { return limited_; }

 private:
  int layer_;
  double zero_lag_ = 0.0;
  double r_min_ = 0.0;
  double r_cut_ = 0.0;
  double u_min_ = 0.0;
  double h_ = 0.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::size_t limited_ = 0;
};

}  // namespace ldbm
