#pragma once

#include <optional>
#include <span>
#include <vector>

#include "selinf/cond_normal.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf {

/// Quantile levels 0 < q1 <= q2 < 1 of an interval [mu_q1(x), mu_q2(x)].
class QuantilePair {
 public:
  /// Throws ValidationError unless 0 < q1 <= q2 < 1.
  QuantilePair(double q1, double q2);

  /// (alpha/2, 1 - alpha/2).
  static QuantilePair equal_tailed(double alpha);

  double q1() const { return q1_; }
  double q2() const { return q2_; }
  /// Coverage q2 - q1.
  double level() const { return q2_ - q1_; }

  friend bool operator==(const QuantilePair&, const QuantilePair&) = default;

 private:
  double q1_;
  double q2_;
};

/// (sigma2, tau2, T) with mu left free; the family indexed by the parameter.
struct SpecFamily {
  double sigma2;
  double tau2;
  TruncationSet truncation;

  CondNormalSpec at(double mu) const { return CondNormalSpec(mu, sigma2, tau2, truncation); }
};

struct ConfidenceInterval {
  double lower;
  double upper;
  QuantilePair pair;
  double bound;  ///< length bound (sigma/rho)(Phi^{-1}(q2) - Phi^{-1}(q1)); exact length for classical intervals
  double x;      ///< observed statistic

  double length() const { return upper - lower; }
  bool covers(double mu) const { return lower <= mu && mu <= upper; }
};

inline constexpr double kMuTolerance = 1e-10;
inline constexpr int kMaxIterations = 200;

/// mu with F_mu(x) = 1 - q. F is strictly decreasing in mu, so the root is
/// bracketed around x and then narrowed to kMuTolerance by a bracketing
/// (TOMS 748) solver. Throws NonConvergenceError if no bracket is found within
/// 1e6 sigma / rho of x (only possible for tau2 = 0).
double mu_q(const SpecFamily& family, double x, double q);

/// [mu_q1(x), mu_q2(x)]; the q2 search is seeded from the q1 root.
ConfidenceInterval interval(const SpecFamily& family, double x, const QuantilePair& pair);

/// (sigma/rho)(Phi^{-1}(q2) - Phi^{-1}(q1)); +inf when tau2 = 0.
double length_bound(double sigma2, double tau2, const QuantilePair& pair);

/// Length of the interval when nothing is conditioned on.
double unconditional_length(double sigma2, const QuantilePair& pair);

struct LengthPoint {
  double x;
  double length;
};

std::vector<LengthPoint> sharpness_curve(const SpecFamily& family, const QuantilePair& pair,
                                         std::span<const double> x_grid);

/// G_{mu_q(x)}(x, sup T) - (1 - q); tends to 0 as x -> inf when T is bounded above.
double sharpness_gap(const SpecFamily& family, double x, double q);

}  // namespace selinf
