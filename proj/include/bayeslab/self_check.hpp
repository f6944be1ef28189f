#pragma once

// Built-in numerical oracles run by `bayeslab check`.

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bayeslab/conjugate_models.hpp"
#include "bayeslab/special_functions.hpp"

namespace bayeslab {

struct CheckResult {
  std::string name;
  double max_error;
  double tolerance;
  bool passed;
};

namespace detail {

inline constexpr std::array<double, 6> kShapeLattice = {0.5, 1.0, 2.0, 5.0, 20.0, 100.0};

// Composite Simpson for I_x(a, b). For a < 1 the integral is taken in
// u = t^a, which removes the endpoint singularity.
inline double simpson_beta_cdf(double x, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double log_b = log_beta(a, b);
  double upper;
  std::function<double(double)> f;
  if (a < 1.0) {
    upper = std::pow(x, a);
    f = [=](double u) {
      const double t = std::pow(u, 1.0 / a);
      return std::exp((b - 1.0) * std::log1p(-t) - log_b) / a;
    };
  } else {
    upper = x;
    f = [=](double t) { return beta_pdf(t, a, b); };
  }
  const double h = upper / panels;
  double sum = f(0.0) + f(upper);
  for (int i = 1; i < panels; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace detail

inline CheckResult check_quantile_round_trip(double tolerance) {
  double worst = 0.0;
  for (double a : detail::kShapeLattice) {
    for (double b : detail::kShapeLattice) {
      for (int i = 1; i <= 999; i += 2) {
        const double x = i / 1000.0;
        // Compose on whichever tail keeps the probability representable.
        const double p = beta_cdf(x, a, b);
        const double back = p <= 0.5 ? beta_quantile(p, a, b)
                                     : 1.0 - beta_quantile(beta_cdf(1.0 - x, b, a), b, a);
        worst = std::max(worst, std::abs(back - x));
      }
    }
  }
  return {"quantile(cdf(x)) round trip", worst, tolerance, worst <= tolerance};
}

inline CheckResult check_cdf_against_simpson(double tolerance) {
  constexpr std::array<double, 6> shapes = {0.5, 1.0, 2.0, 5.0, 20.0, 50.0};
  constexpr std::array<double, 5> xs = {0.05, 0.25, 0.5, 0.75, 0.95};
  double worst = 0.0;
  for (double a : shapes) {
    for (double b : shapes) {
      for (double x : xs) {
        worst = std::max(worst, std::abs(beta_cdf(x, a, b) - detail::simpson_beta_cdf(x, a, b, 100000)));
      }
    }
  }
  return {"cdf vs Simpson integration", worst, tolerance, worst <= tolerance};
}

inline CheckResult check_sequential_equals_batch(double tolerance) {
  std::mt19937_64 rng(20211);
  std::uniform_real_distribution<double> shape(1e-3, 100.0);
  std::uniform_int_distribution<Count> size(0, 250);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BetaParams prior(shape(rng), shape(rng));
    const Count n1 = size(rng), n2 = size(rng);
    const BinomialData first(n1, std::uniform_int_distribution<Count>(0, n1)(rng));
    const BinomialData second(n2, std::uniform_int_distribution<Count>(0, n2)(rng));
    const BetaParams chained = beta_binomial_update(beta_binomial_update(prior, first), second);
    const BetaParams batch = beta_binomial_update(prior, first + second);
    worst = std::max({worst, std::abs(chained.alpha() - batch.alpha()), std::abs(chained.beta() - batch.beta())});
  }
  return {"sequential = batch update", worst, tolerance, worst <= tolerance};
}

inline CheckResult check_binomial_normalization(double tolerance) {
  double worst = 0.0;
  for (Count n = 0; n <= 60; ++n) {
    for (double p : {0.1, 0.5, 0.9}) {
      double total = 0.0;
      for (Count y = 0; y <= n; ++y) total += std::exp(binomial_log_pmf(y, n, p));
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  return {"binomial pmf sums to 1", worst, tolerance, worst <= tolerance};
}

/// `tolerance_scale` multiplies every tolerance (1 for normal use).
inline std::vector<CheckResult> run_self_check(double tolerance_scale = 1.0) {
  return {check_quantile_round_trip(1e-8 * tolerance_scale),
          check_cdf_against_simpson(1e-8 * tolerance_scale),
          check_sequential_equals_batch(0.0),
          check_binomial_normalization(1e-12 * tolerance_scale)};
}

}  // namespace bayeslab
