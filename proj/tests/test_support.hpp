#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "selinf/cond_normal.hpp"
#include "selinf/rng.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf::testing {

// Adaptive 61-point Gauss-Kronrod on [a, b], split into unit-width pieces so
// that narrow features are never skipped.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double piece = 0.5) {
  if (!(a < b)) return 0.0;
  double total = 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == n) ? b : lo + h;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 5, 1e-14);
  }
  return total;
}

// Lower limit below which the conditional density is negligible.
inline double lower_support(const CondNormalSpec& spec) {
  const double lo = std::max(spec.truncation().infimum(), spec.mu() - 40.0 * spec.total_sd());
  return std::min(lo, spec.mu()) - 12.0 * spec.sigma();
}

inline double upper_support(const CondNormalSpec& spec) {
  const double hi = std::min(spec.truncation().supremum(), spec.mu() + 40.0 * spec.total_sd());
  return std::max(hi, spec.mu()) + 12.0 * spec.sigma();
}

// F_mu(x) by integrating the density directly.
inline double cdf_by_quadrature(const CondNormalSpec& spec, double x) {
  const double lo = lower_support(spec);
  if (x <= lo) return 0.0;
  return integrate([&](double u) { return pdf(spec, u); }, lo, x);
}

inline double central_difference(const std::function<double(double)>& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// A random union of at most max_k disjoint intervals; the outermost endpoints
// are infinite with probability one half each.
inline TruncationSet random_truncation(RandomStream& rs, int max_k, double span = 6.0) {
  const int k = 1 + static_cast<int>(rs.uniform() * max_k);
  std::vector<double> cuts;
  for (int i = 0; i < 2 * k; ++i) cuts.push_back(-span + 2.0 * span * rs.uniform());
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> raw;
  for (int i = 0; i < k; ++i) {
    double lo = cuts[2 * i];
    double hi = cuts[2 * i + 1];
    if (hi - lo < 0.05) hi = lo + 0.05;
    raw.push_back({lo, hi});
  }
  if (rs.uniform() < 0.5) raw.front().lo = -kInf;
  if (rs.uniform() < 0.5) raw.back().hi = kInf;
  return TruncationSet::make(std::span<const Interval>(raw));
}

inline double uniform_in(RandomStream& rs, double lo, double hi) {
  return lo + (hi - lo) * rs.uniform();
}

// Log-uniform draw, as used for variances.
inline double log_uniform_in(RandomStream& rs, double lo, double hi) {
  return std::exp(uniform_in(rs, std::log(lo), std::log(hi)));
}

}  // namespace selinf::testing
