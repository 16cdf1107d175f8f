#include "ldbm/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "ldbm/error.hpp"

namespace ldbm {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;

// Integrand window: keep scales s where a/s + s/2 exceeds its minimum by at most this much.
constexpr double kExponentWindow = 45.0;

// Nested kernel quadrature inside a scale integral runs at a tighter tolerance,
// floored where Gauss-Kronrod error estimates stop being meaningful in double.
constexpr double kInnerToleranceFactor = 1e-2;
constexpr double kToleranceFloor = 1e-14;

template <typename F>
double integrate(F&& f, double a, double b, const QuadratureOptions& options) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  return Kronrod::integrate(f, a, b, options.max_depth, std::max(options.tolerance, kToleranceFloor), &error);
}

}  // namespace

MassParam::MassParam(double m) : m_(m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("mass parameter must be a finite positive number");
}

CutoffSequence CutoffSequence::dyadic() { return CutoffSequence({}, true); }

CutoffSequence CutoffSequence::from_values(std::vector<double> values) {
  if (values.empty()) throw DomainError("cutoff sequence must contain at least c_1");
  if (values.front() != 1.0) throw DomainError("cutoff sequence must start with c_1 = 1");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1]) || !std::isfinite(values[i]))
      throw DomainError("cutoff sequence must be strictly increasing and finite");
  }
  return CutoffSequence(std::move(values), false);
}

double CutoffSequence::cutoff(int n) const {
  if (n < 0 || n > max_index()) {
    std::ostringstream os;
    os << "cutoff index " << n << " outside [0, " << max_index() << "]";
    throw IndexError(os.str());
  }
  if (n == 0) return 1.0;
  if (dyadic_) return std::ldexp(1.0, n - 1);
  return values_[static_cast<std::size_t>(n - 1)];
}

int CutoffSequence::max_index() const {
  // 2^{n-1} stays exactly representable far beyond any usable level.
  return dyadic_ ? 512 : static_cast<int>(values_.size());
}

std::string CutoffSequence::describe() const {
  if (dyadic_) return "dyadic";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
  return os.str();
}

double kernel_km(double r, MassParam m, const QuadratureOptions& options) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("kernel_km: r must be finite and nonnegative");
  const double mr = m.value() * r;
  if (mr == 0.0) {
    // (1/2) int_0^S exp(-s/2) ds; the tail beyond S is exp(-window).
    const double upper = 2.0 * kExponentWindow;
    return integrate([](double s) { return 0.5 * std::exp(-0.5 * s); }, 0.0, upper, options);
  }
  const double a = 0.5 * mr * mr;
  // The exponent a/s + s/2 is minimal (= m r) at s = m r; it exceeds the minimum
  // by more than the window outside [lo, hi].
  const double ceiling = mr + kExponentWindow;
  const double lo = a / ceiling;
  const double hi = 2.0 * ceiling;
  // u = log s spreads the integrand evenly for every r.
  auto integrand = [a](double u) {
    const double s = std::exp(u);
    return 0.5 * std::exp(u - a / s - 0.5 * s);
  };
  return integrate(integrand, std::log(lo), std::log(hi), options);
}

double kernel_km_bessel(double r, MassParam m) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("kernel_km_bessel: r must be finite and nonnegative");
  const double x = m.value() * r;
  if (x == 0.0) return 1.0;
  if (x > 700.0) return 0.0;
  return x * boost::math::cyl_bessel_k(1, x);
}

double kernel_km(double r, MassParam m, KernelMethod method, const QuadratureOptions& options) {
  return method == KernelMethod::bessel ? kernel_km_bessel(r, m) : kernel_km(r, m, options);
}

double scale_integral(double r, double lower, double upper, MassParam m, KernelMethod method,
                      const QuadratureOptions& options) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("scale_integral: r must be finite and nonnegative");
  if (!(lower > 0.0) || upper < lower) throw DomainError("scale_integral: need 0 < lower <= upper");
  if (upper == lower) return 0.0;
  const double lu = std::log(lower);
  const double uu = std::log(upper);
  QuadratureOptions inner = options;
  inner.tolerance = std::max(options.tolerance * kInnerToleranceFactor, kToleranceFloor);
  // ds/s = du.
  auto integrand = [&](double u) { return kernel_km(std::exp(u) * r, m, method, inner); };
  return integrate(integrand, lu, uu, options);
}

double layer_covariance(double r, int n, const CutoffSequence& seq, MassParam m, KernelMethod method,
                        const QuadratureOptions& options) {
  if (n < 1) throw IndexError("layer index must be >= 1");
  const double lower = seq.cutoff(n - 1);
  const double upper = seq.cutoff(n);
  return scale_integral(r, lower, upper, m, method, options);
}

double green_massive(double r, MassParam m, double upper, KernelMethod method, const QuadratureOptions& options) {
  if (!(r > 0.0)) throw DomainError("green_massive: r must be positive (logarithmic divergence on the diagonal)");
  if (!(upper > 1.0)) throw DomainError("green_massive: truncation bound must exceed 1");
  return scale_integral(r, 1.0, upper, m, method, options);
}

CovarianceTable::CovarianceTable(int n, const CutoffSequence& seq, MassParam m, double log_step) : layer_(n) {
  if (n < 1) throw IndexError("layer index must be >= 1");
  if (!(log_step > 0.0)) throw DomainError("CovarianceTable: log step must be positive");
  const double lower = seq.cutoff(n - 1);
  const double upper = seq.cutoff(n);
  zero_lag_ = std::log(upper) - std::log(lower);
  if (zero_lag_ == 0.0) return;

  // Below r_min the lag correction is O((c_n r)^2 log r), far under the budget.
  r_min_ = 1e-12 / upper;
  // Beyond r_cut, C(r) <= zero_lag * k_m(c_{n-1} r) < 1e-20.
  r_cut_ = 50.0 / (m.value() * lower);
  u_min_ = std::log(r_min_);
  const double u_max = std::log(r_cut_);
  const auto intervals = static_cast<std::size_t>(std::ceil((u_max - u_min_) / log_step));
  h_ = (u_max - u_min_) / static_cast<double>(intervals);

  values_.resize(intervals + 1);
  slopes_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double r = std::exp(u_min_ + h_ * static_cast<double>(i));
    values_[i] = scale_integral(r, lower, upper, m, KernelMethod::bessel);
    slopes_[i] = kernel_km_bessel(upper * r, m) - kernel_km_bessel(lower * r, m);
  }

  // Fritsch-Carlson: keep each cubic piece monotone.
  for (std::size_t i = 0; i < intervals; ++i) {
    const double secant = (values_[i + 1] - values_[i]) / h_;
    if (secant == 0.0) {
      if (slopes_[i] != 0.0 || slopes_[i + 1] != 0.0) ++limited_;
      slopes_[i] = slopes_[i + 1] = 0.0;
      continue;
    }
    double a = slopes_[i] / secant;
    double b = slopes_[i + 1] / secant;
    bool changed = false;
    if (a < 0.0) {
      slopes_[i] = 0.0;
      a = 0.0;
      changed = true;
    }
    if (b < 0.0) {
      slopes_[i + 1] = 0.0;
      b = 0.0;
      changed = true;
    }
    const double norm2 = a * a + b * b;
    if (norm2 > 9.0) {
      const double tau = 3.0 / std::sqrt(norm2);
      slopes_[i] = tau * a * secant;
      slopes_[i + 1] = tau * b * secant;
      changed = true;
    }
    if (changed) ++limited_;
  }
}

double CovarianceTable::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("CovarianceTable: r must be nonnegative");
  if (values_.empty()) return 0.0;
  if (r <= r_min_) return zero_lag_;
  if (r >= r_cut_) return 0.0;
  const double t = (std::log(r) - u_min_) / h_;
  const auto last = values_.size() - 1;
  auto i = static_cast<std::size_t>(t);
  if (i >= last) i = last - 1;
  const double x = t - static_cast<double>(i);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
  const double h10 = x3 - 2.0 * x2 + x;
  const double h01 = -2.0 * x3 + 3.0 * x2;
  const double h11 = x3 - x2;
  return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] + h11 * h_ * slopes_[i + 1];
}

}  // namespace ldbm
