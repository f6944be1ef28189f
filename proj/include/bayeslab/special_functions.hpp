#pragma once

// Scalar special functions and densities used by the conjugate models.
//
// Everything here is a pure function of its arguments. Invalid parameters
// raise DomainError; iterative routines that fail to converge raise
// ConvergenceError.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "bayeslab/errors.hpp"

namespace bayeslab {

using Count = std::uint64_t;

/// A real number in [0, 1].
class Probability {
 public:
  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
  }
  double value() const noexcept { return value_; }
  friend bool operator==(const Probability&, const Probability&) = default;

 private:
  double value_;
};

/// A finite real number strictly greater than zero.
class PositiveReal {
 public:
  explicit PositiveReal(double value) : value_(value) {
    if (!(std::isfinite(value) && value > 0.0)) {
      throw DomainError("value must be finite and > 0, got " + std::to_string(value));
    }
  }
  double value() const noexcept { return value_; }
  friend bool operator==(const PositiveReal&, const PositiveReal&) = default;

 private:
  double value_;
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
  }
}

inline void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// zeta(k) - 1 for k = 2..kZetaTerms+1. Direct summation up to N-1 and an
// Euler-Maclaurin tail starting at N.
inline constexpr int kZetaTerms = 48;

inline double zeta_minus_one(int k) {
  constexpr int N = 30;
  double sum = 0.0;
  for (int m = N - 1; m >= 2; --m) sum += std::pow(static_cast<double>(m), -k);
  const double n = N;
  double tail = std::pow(n, 1.0 - k) / (k - 1) + 0.5 * std::pow(n, -k);
  // B_2j / (2j)!
  constexpr std::array<double, 5> bernoulli_over_factorial = {
      1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0};
  double rising = k;  // k (k+1) ... (k+2j)
  for (std::size_t j = 0; j < bernoulli_over_factorial.size(); ++j) {
    const int order = 2 * static_cast<int>(j) + 1;
    tail += bernoulli_over_factorial[j] * rising * std::pow(n, -k - order);
    rising *= static_cast<double>(k + order) * static_cast<double>(k + order + 1);
  }
  return sum + tail;
}

inline const std::array<double, kZetaTerms>& zeta_minus_one_table() {
  static const std::array<double, kZetaTerms> table = [] {
    std::array<double, kZetaTerms> t{};
    for (int i = 0; i < kZetaTerms; ++i) t[static_cast<std::size_t>(i)] = zeta_minus_one(i + 2);
    return t;
  }();
  return table;
}

// ln Gamma(2 + z) for |z| <= 0.5 by its Taylor series about 2.
inline double log_gamma_near_two(double z) {
  const auto& zeta = zeta_minus_one_table();
  double power = -z;  // (-z)^k
  double sum = 0.0;
  for (int k = 2; k < kZetaTerms + 2; ++k) {
    power *= -z;
    const double term = zeta[static_cast<std::size_t>(k - 2)] * power / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(z)) break;
  }
  return z * (1.0 - kEulerGamma) + sum;
}

// Lanczos approximation, g = 7, n = 9.
inline double log_gamma_lanczos(double x) {
  constexpr double g = 7.0;
  constexpr std::array<double, 9> c = {
      0.99999999999980993227684700473478,  676.520368121885098567009190444019,
      -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
      -176.61502916214059906584551354,     12.507343278686904814458936853,
      -0.13857109526572011689554707,       9.984369578019570859563e-6,
      1.50563273514931155834e-7};
  const double z = x - 1.0;
  double series = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) series += c[i] / (z + static_cast<double>(i));
  const double t = z + g + 0.5;
  constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace detail

/// ln Gamma(x) for finite x > 0.
inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma argument");
  if (x < 0.5) {
    // ln Gamma(x) = ln Gamma(x + 1) - ln x, with x + 1 in [1, 1.5)
    return detail::log_gamma_near_two(x) - std::log1p(x) - std::log(x);
  }
  if (x < 1.5) return detail::log_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
  if (x < 2.5) return detail::log_gamma_near_two(x - 2.0);
  return detail::log_gamma_lanczos(x);
}

/// ln B(a, b).
inline double log_beta(double a, double b) {
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/// Natural log of the Beta(a, b) density. Returns +inf where the density
/// diverges at an endpoint and -inf where it vanishes.
inline double beta_log_pdf(double x, double a, double b) {
  detail::require_unit_interval(x, "x");
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (x == 0.0) {
    if (a < 1.0) return inf;
    if (a > 1.0) return -inf;
    return std::log(b);  // B(1, b) = 1/b
  }
  if (x == 1.0) {
    if (b < 1.0) return inf;
    if (b > 1.0) return -inf;
    return std::log(a);
  }
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

/// Beta(a, b) density at x in [0, 1].
inline double beta_pdf(double x, double a, double b) { return std::exp(beta_log_pdf(x, a, b)); }

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
inline double incomplete_beta_fraction(double x, double a, double b) {
  constexpr int max_iterations = 20000;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) <= eps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

// I_x(a, b) evaluated directly on the convergent branch (caller guarantees it).
inline double incomplete_beta_direct(double x, double a, double b) {
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  return std::exp(log_front) * incomplete_beta_fraction(x, a, b) / a;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b), i.e. the Beta(a, b) CDF.
inline double beta_cdf(double x, double a, double b) {
  detail::require_unit_interval(x, "x");
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - detail::incomplete_beta_direct(1.0 - x, b, a);
  return detail::incomplete_beta_direct(x, a, b);
}

namespace detail {

// Rough standard normal quantile (absolute error < 5e-4), used only as a seed.
inline double normal_quantile_seed(double p) {
  const double q = p < 0.5 ? p : 1.0 - p;
  const double t = std::sqrt(-2.0 * std::log(q));
  const double z =
      t - (2.515517 + t * (0.802853 + t * 0.010328)) /
              (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
  return p < 0.5 ? -z : z;
}

// Solves I_x(a, b) = p for p in (0, 0.5] by safeguarded Newton iteration
// on h(u) = ln I_{e^u}(a, b) - ln p over u = ln x.
inline double beta_quantile_lower(double p, double a, double b) {
  constexpr int max_iterations = 200;
  const double log_p = std::log(p);
  const double log_beta_ab = log_beta(a, b);

  auto h_of = [&](double u) {
    const double cdf = beta_cdf(std::exp(u), a, b);
    return std::log(cdf) - log_p;
  };
  auto slope_of = [&](double u, double h) {
    // d/du ln F(e^u) = x f(x) / F(x)
    const double x = std::exp(u);
    const double log_pdf = (a - 1.0) * u + (b - 1.0) * std::log1p(-x) - log_beta_ab;
    return std::exp(log_pdf + u - (h + log_p));
  };

  // Seed: normal approximation, then power-law tail approximation.
  const double mean = a / (a + b);
  const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
  double x0 = mean + normal_quantile_seed(p) * sd;
  if (!(x0 > 0.0 && x0 < 1.0)) x0 = std::exp((log_p + std::log(a) + log_beta_ab) / a);
  if (!(x0 > 0.0 && x0 < 1.0)) x0 = 0.5 * mean;
  double u = std::log(x0);

  // Bracket [lo, hi] with h(lo) < 0 <= h(hi). u = 0 (x = 1) has F = 1 >= p.
  double hi = 0.0;
  double lo = u;
  double h = h_of(u);
  if (h >= 0.0) {
    hi = u;
    double step = 1.0;
    for (;;) {
      lo = hi - step;
      const double h_lo = h_of(lo);
      if (h_lo < 0.0) break;
      hi = lo;
      step *= 2.0;
      if (lo < -1500.0) return 0.0;
    }
    u = 0.5 * (lo + hi);
    h = h_of(u);
  }

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (h == 0.0) return std::exp(u);
    if (h < 0.0) lo = u; else hi = u;

    double next = 0.5 * (lo + hi);
    if (std::isfinite(h)) {
      const double slope = slope_of(u, h);
      if (std::isfinite(slope) && slope > 0.0) {
        const double newton = u - h / slope;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u));
    if (std::abs(next - u) <= tol || (hi - lo) <= tol) return std::exp(next);
    u = next;
    h = h_of(u);
  }
  throw ConvergenceError("beta_quantile did not converge");
}

}  // namespace detail

/// Inverse of beta_cdf in x: the p-quantile of Beta(a, b).
inline double beta_quantile(double p, double a, double b) {
  detail::require_unit_interval(p, "p");
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (p <= 0.5) return detail::beta_quantile_lower(p, a, b);
  // Upper half through the mirrored distribution: F(x; a, b) = 1 - F(1 - x; b, a).
  return 1.0 - detail::beta_quantile_lower(1.0 - p, b, a);
}

/// ln P(Y = y) for Y ~ Binomial(n, p). Returns -inf for impossible outcomes.
inline double binomial_log_pmf(Count y, Count n, double p) {
  if (y > n) {
    throw DomainError("binomial_log_pmf: y (" + std::to_string(y) + ") exceeds n (" +
                      std::to_string(n) + ")");
  }
  detail::require_unit_interval(p, "p");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (p == 0.0) return y == 0 ? 0.0 : neg_inf;
  if (p == 1.0) return y == n ? 0.0 : neg_inf;
  const auto yd = static_cast<double>(y);
  const auto nd = static_cast<double>(n);
  const double log_choose = log_gamma(nd + 1.0) - log_gamma(yd + 1.0) - log_gamma(nd - yd + 1.0);
  return log_choose + yd * std::log(p) + (nd - yd) * std::log1p(-p);
}

/// ln P(Y = y) for Y ~ Poisson(rate).
inline double poisson_log_pmf(Count y, double rate) {
  detail::require_positive(rate, "rate");
  const auto yd = static_cast<double>(y);
  return yd * std::log(rate) - rate - log_gamma(yd + 1.0);
}

/// Normal(mean, sd) density.
inline double normal_pdf(double x, double mean, double sd) {
  detail::require_positive(sd, "sd");
  if (!std::isfinite(x) || !std::isfinite(mean)) throw DomainError("normal_pdf: non-finite input");
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace bayeslab
