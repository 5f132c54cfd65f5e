#pragma once

// Univariate and bivariate standard normal primitives.
//
// All functions are pure. Infinite arguments are accepted wherever an
// endpoint may be unbounded, with phi(+-inf) = Phi(-inf) = 1 - Phi(inf) = 0.

#include <algorithm>
#include <cmath>
#include <limits>

namespace selinf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A probability in [0, 1]. Construction validates; reads are implicit.
class Prob {
 public:
  constexpr Prob() = default;
  explicit Prob(double value);

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_ = 0.0;
};

/// Natural log of a probability, in [-inf, 0].
class LogProb {
 public:
  constexpr LogProb() = default;
  explicit LogProb(double value);

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_ = -kInf;
};

double std_pdf(double x);
double log_std_pdf(double x);

/// Phi(x), via the complementary error function.
Prob std_cdf(double x);
/// 1 - Phi(x) without cancellation.
Prob std_ccdf(double x);
/// log Phi(x), finite for every finite x.
LogProb log_std_cdf(double x);

/// Mills ratio (1 - Phi(t)) / phi(t) for t >= 0.
double mills_ratio(double t);

/// Phi^{-1}(q). Throws DomainError unless 0 < q < 1.
double std_quantile(double q);

/// Phi^{-1}(exp(log_q)) for log_q < 0; usable far below the smallest double.
double std_quantile_from_log(double log_q);

/// log(Phi(beta) - Phi(alpha)) for alpha < beta, accurate in both tails and
/// for narrow intervals.
LogProb log_std_interval_mass(double alpha, double beta);

/// Phi((hi - mean)/sd) - Phi((lo - mean)/sd). Throws DomainError if sd <= 0
/// and ValidationError if lo >= hi.
Prob cdf_interval_mass(double lo, double hi, double mean, double sd);

/// log of cdf_interval_mass; finite for every nonempty interval.
LogProb log_interval_mass(double lo, double hi, double mean, double sd);

/// P(Z1 <= h, Z2 <= k) for a standard bivariate normal with correlation corr.
/// Throws DomainError if |corr| > 1.
Prob bvn_cdf(double h, double k, double corr);

/// log(sum_i exp(terms_i)) over a contiguous range; -inf for an empty range.
template <typename Range>
double log_sum_exp(const Range& terms) {
  double peak = -kInf;
  for (double t : terms) peak = std::max(peak, t);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

}  // namespace selinf
