#pragma once

// Closed-form conjugate updates: Beta-Binomial, plus Gamma-Poisson and
// Normal-Normal (known variance).

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "bayeslab/errors.hpp"
#include "bayeslab/special_functions.hpp"

namespace bayeslab {

/// A real-valued base plus an exact integer increment. The sum is rounded
/// once when read, so incremental and batched updates produce bit-identical
/// parameters.
class CountedReal {
 public:
  CountedReal() = default;
  explicit CountedReal(double base, Count added = 0) : base_(base), added_(added) {}

  double value() const noexcept { return base_ + static_cast<double>(added_); }
  double base() const noexcept { return base_; }
  Count added() const noexcept { return added_; }

  CountedReal plus(Count k) const { return CountedReal(base_, added_ + k); }

 private:
  double base_ = 0.0;
  Count added_ = 0;
};

/// Beta(alpha, beta) over a proportion.
class BetaParams {
 public:
  BetaParams(double alpha, double beta) : BetaParams(CountedReal(alpha), CountedReal(beta)) {}

  double alpha() const noexcept { return alpha_.value(); }
  double beta() const noexcept { return beta_.value(); }

  /// Parameters with `successes` added to alpha and `failures` added to beta.
  BetaParams plus_counts(Count successes, Count failures) const {
    return BetaParams(alpha_.plus(successes), beta_.plus(failures));
  }

  friend bool operator==(const BetaParams& lhs, const BetaParams& rhs) noexcept {
    return lhs.alpha() == rhs.alpha() && lhs.beta() == rhs.beta();
  }

 private:
  BetaParams(CountedReal alpha, CountedReal beta) : alpha_(alpha), beta_(beta) {
    detail::require_positive(alpha_.value(), "alpha");
    detail::require_positive(beta_.value(), "beta");
  }

  CountedReal alpha_;
  CountedReal beta_;
};

/// One round of binary data: n observations of which y are the specified outcome.
class BinomialData {
 public:
  BinomialData() = default;
  BinomialData(Count n, Count y) : n_(n), y_(y) {
    if (y > n) {
      throw DomainError("number of specified outcomes (" + std::to_string(y) +
                        ") exceeds number of observations (" + std::to_string(n) + ")");
    }
  }

  Count n() const noexcept { return n_; }
  Count y() const noexcept { return y_; }
  Count failures() const noexcept { return n_ - y_; }

  friend BinomialData operator+(const BinomialData& a, const BinomialData& b) {
    return BinomialData(a.n_ + b.n_, a.y_ + b.y_);
  }
  friend bool operator==(const BinomialData&, const BinomialData&) = default;

 private:
  Count n_ = 0;
  Count y_ = 0;
};

/// Gamma(shape, rate).
class GammaParams {
 public:
  GammaParams(double shape, double rate) : GammaParams(CountedReal(shape), CountedReal(rate)) {}

  double shape() const noexcept { return shape_.value(); }
  double rate() const noexcept { return rate_.value(); }
  double mean() const noexcept { return shape() / rate(); }

  GammaParams plus_counts(Count total, Count observations) const {
    return GammaParams(shape_.plus(total), rate_.plus(observations));
  }

  friend bool operator==(const GammaParams& lhs, const GammaParams& rhs) noexcept {
    return lhs.shape() == rhs.shape() && lhs.rate() == rhs.rate();
  }

 private:
  GammaParams(CountedReal shape, CountedReal rate) : shape_(shape), rate_(rate) {
    detail::require_positive(shape_.value(), "shape");
    detail::require_positive(rate_.value(), "rate");
  }

  CountedReal shape_;
  CountedReal rate_;
};

struct NormalParams {
  double mean;
  double sd;

  NormalParams(double mean_, double sd_) : mean(mean_), sd(sd_) {
    if (!std::isfinite(mean)) throw DomainError("normal mean must be finite");
    detail::require_positive(sd, "sd");
  }
  friend bool operator==(const NormalParams&, const NormalParams&) = default;
};

struct BetaSummary {
  double mean;
  std::optional<double> mode;  // only when alpha > 1 and beta > 1
  double variance;
  double sd;
};

struct CredibleInterval {
  double level;
  double lower;
  double upper;
};

inline BetaParams beta_binomial_update(const BetaParams& prior, const BinomialData& data) {
  return prior.plus_counts(data.y(), data.failures());
}

inline BetaSummary beta_summary(const BetaParams& params) {
  const double a = params.alpha();
  const double b = params.beta();
  const double total = a + b;
  BetaSummary s{};
  s.mean = a / total;
  if (a > 1.0 && b > 1.0) s.mode = (a - 1.0) / (total - 2.0);
  s.variance = a * b / (total * total * (total + 1.0));
  s.sd = std::sqrt(s.variance);
  return s;
}

/// Equal-tailed interval holding `level` posterior probability.
inline CredibleInterval credible_interval(const BetaParams& params, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("credible level must lie strictly between 0 and 1");
  }
  const double tail = 0.5 * (1.0 - level);
  return CredibleInterval{level, beta_quantile(tail, params.alpha(), params.beta()),
                          beta_quantile(1.0 - tail, params.alpha(), params.beta())};
}

/// The binomial likelihood in pi normalised to unit area: Beta(y + 1, n - y + 1).
inline BetaParams scaled_likelihood(const BinomialData& data) {
  if (data.n() == 0) throw DomainError("likelihood curve needs at least one observation");
  return beta_binomial_update(BetaParams(1.0, 1.0), data);
}

inline GammaParams gamma_poisson_update(const GammaParams& prior, std::span<const Count> counts) {
  Count total = 0;
  for (Count c : counts) total += c;
  return prior.plus_counts(total, counts.size());
}

/// Normal mean with known observation sd; `sample_mean` is required when n > 0.
inline NormalParams normal_normal_update(const NormalParams& prior, double known_sd, Count n,
                                         std::optional<double> sample_mean) {
  detail::require_positive(known_sd, "known_sd");
  if (n == 0) return prior;
  if (!sample_mean || !std::isfinite(*sample_mean)) {
    throw DomainError("sample mean is required when n > 0");
  }
  const double prior_precision = 1.0 / (prior.sd * prior.sd);
  const double data_precision = static_cast<double>(n) / (known_sd * known_sd);
  const double precision = prior_precision + data_precision;
  const double mean = (prior_precision * prior.mean + data_precision * *sample_mean) / precision;
  return NormalParams(mean, std::sqrt(1.0 / precision));
}

}  // namespace bayeslab
