#include "selinf/quantile_ci.hpp"

#include <boost/math/policies/policy.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "selinf/error.hpp"
#include "selinf/scalar_normal.hpp"

namespace selinf {

namespace {

using RootPolicy = boost::math::policies::policy<
    boost::math::policies::evaluation_error<boost::math::policies::throw_on_error>>;

// sigma / rho, or sigma when there is no randomization.
double search_scale(const SpecFamily& family) {
  const double sigma = std::sqrt(family.sigma2);
  if (family.tau2 == 0.0) return sigma;
  return sigma * std::sqrt((family.sigma2 + family.tau2) / family.tau2);
}

// F_mu(x) - target, decreasing in mu.
struct Objective {
  const SpecFamily& family;
  double x;
  double target;

  double operator()(double mu) const { return cdf(family.at(mu), x) - target; }
};

// Root of a decreasing f on a bracket with f(lo) > 0 > f(hi); stops once the
// bracket is no wider than kMuTolerance.
double solve_bracketed(const Objective& f, double lo, double hi, double f_lo, double f_hi) {
  std::uintmax_t max_iter = kMaxIterations;
  const auto tol = [](double a, double b) { return std::fabs(b - a) <= kMuTolerance; };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter,
                                                        RootPolicy());
  return 0.5 * (a + b);
}

double solve_expanding(const Objective& f, double x, double q, double scale) {
  const double limit = 1e6 * scale;
  double half = scale * (std::fabs(std_quantile(q)) + 10.0);
  while (true) {
    const double lo = x - half;
    const double hi = x + half;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (f_lo > 0.0 && f_hi < 0.0) return solve_bracketed(f, lo, hi, f_lo, f_hi);
    half *= 2.0;
    if (half > limit) {
      throw NonConvergenceError("no bracket for mu_q within " + std::to_string(limit) +
                                " of x = " + std::to_string(x));
    }
  }
}

}  // namespace

QuantilePair::QuantilePair(double q1, double q2) : q1_(q1), q2_(q2) {
  if (!(q1 > 0.0 && q1 <= q2 && q2 < 1.0)) {
    throw ValidationError("quantile pair requires 0 < q1 <= q2 < 1");
  }
}

QuantilePair QuantilePair::equal_tailed(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  return QuantilePair(alpha / 2.0, 1.0 - alpha / 2.0);
}

double mu_q(const SpecFamily& family, double x, double q) {
  if (!std::isfinite(x)) throw DomainError("mu_q: x must be finite");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("mu_q: q must lie in (0, 1)");
  return solve_expanding(Objective{family, x, 1.0 - q}, x, q, search_scale(family));
}

ConfidenceInterval interval(const SpecFamily& family, double x, const QuantilePair& pair) {
  const double lower = mu_q(family, x, pair.q1());
  const double bound = length_bound(family.sigma2, family.tau2, pair);
  double upper = lower;
  if (pair.q2() != pair.q1()) {
    const Objective f{family, x, 1.0 - pair.q2()};
    const double hi = lower + bound;
    const double f_lo = f(lower);
    const double f_hi = std::isfinite(hi) ? f(hi) : 0.0;
    if (f_lo > 0.0 && f_hi < 0.0) {
      upper = solve_bracketed(f, lower, hi, f_lo, f_hi);
    } else {
      upper = solve_expanding(f, x, pair.q2(), search_scale(family));
    }
  }
  return {lower, upper, pair, bound, x};
}

double length_bound(double sigma2, double tau2, const QuantilePair& pair) {
  if (tau2 == 0.0) return kInf;
  const double rho = std::sqrt(tau2 / (sigma2 + tau2));
  return std::sqrt(sigma2) / rho * (std_quantile(pair.q2()) - std_quantile(pair.q1()));
}

double unconditional_length(double sigma2, const QuantilePair& pair) {
  return std::sqrt(sigma2) * (std_quantile(pair.q2()) - std_quantile(pair.q1()));
}

std::vector<LengthPoint> sharpness_curve(const SpecFamily& family, const QuantilePair& pair,
                                         std::span<const double> x_grid) {
  std::vector<LengthPoint> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) out.push_back({x, interval(family, x, pair).length()});
  return out;
}

double sharpness_gap(const SpecFamily& family, double x, double q) {
  const double mu = mu_q(family, x, q);
  return g_cdf(family.at(mu), x, family.truncation.supremum()) - (1.0 - q);
}

}  // namespace selinf
