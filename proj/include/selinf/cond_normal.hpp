#pragma once

// The law of X | X + U in T with X ~ N(mu, sigma2), U ~ N(0, tau2) independent.
//
// Throughout, V = X + U ~ N(mu, sigma2 + tau2), rho2 = tau2 / (sigma2 + tau2),
// and X | V = v ~ N(rho2 mu + (1 - rho2) v, sigma2 rho2). tau2 = 0 gives the
// plain truncated normal X | X in T.

#include "selinf/rng.hpp"
#include "selinf/scalar_normal.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf {

/// Full parameterization (mu, sigma2, tau2, T) of the conditional law.
class CondNormalSpec {
 public:
  /// Throws DomainError unless sigma2 > 0, tau2 >= 0 and mu is finite.
  CondNormalSpec(double mu, double sigma2, double tau2, TruncationSet truncation);

  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  double tau2() const { return tau2_; }
  const TruncationSet& truncation() const { return truncation_; }

  double sigma() const { return sigma_; }
  double tau() const { return tau_; }
  /// Standard deviation of V = X + U.
  double total_sd() const { return total_sd_; }
  double rho2() const { return tau2_ / (sigma2_ + tau2_); }
  double rho() const { return tau_ / total_sd_; }

  CondNormalSpec with_mu(double mu) const;

 private:
  double mu_;
  double sigma2_;
  double tau2_;
  double sigma_;
  double tau_;
  double total_sd_;
  TruncationSet truncation_;
};

/// P(X + U in T), via log-space interval masses; strictly positive.
Prob selection_prob(const CondNormalSpec& spec);
LogProb log_selection_prob(const CondNormalSpec& spec);

/// Conditional CDF F_mu(x). Per interval of T, the bivariate-normal closed form
/// is used while the interval's selection mass is at least
/// kBivariateRouteMinMass; lighter intervals, and intervals whose conditional
/// probability falls below the same threshold, switch to the scaled quadrature
/// route so that tail values keep their relative precision.
Prob cdf(const CondNormalSpec& spec, double x);

inline constexpr double kBivariateRouteMinMass = 1e-3;

/// CDF through the bivariate-normal closed form only (no route switching).
/// Accurate to about 1e-15 / P(X + U in T).
Prob cdf_bivariate_route(const CondNormalSpec& spec, double x);

/// CDF as E[G_mu(x, V)] under the truncated law of V, integrated on scaled
/// coordinates anchored at each interval's nearest endpoint. Valid at any
/// selection probability. Requires tau2 > 0.
Prob cdf_tail_route(const CondNormalSpec& spec, double x);

/// Conditional density f_mu(x), evaluated in log space.
double pdf(const CondNormalSpec& spec, double x);
double log_pdf(const CondNormalSpec& spec, double x);

struct NormalParams {
  double mean;
  double var;
};

/// Law of X given X + U = v. Throws UnsupportedError when tau2 = 0.
NormalParams cond_given_sum(const CondNormalSpec& spec, double v);

/// G_mu(x, v) = P(X <= x | X + U = v). v may be infinite.
Prob g_cdf(const CondNormalSpec& spec, double x, double v);

/// Density of V at v divided by P(X + U in T); zero at infinite v.
double h_weight(const CondNormalSpec& spec, double v);

/// phi((v - x)/tau)/tau divided by sum_i [Phi((b_i - x)/tau) - Phi((a_i - x)/tau)];
/// zero at infinite v.
double l_weight(const CondNormalSpec& spec, double x, double v);

/// d f_mu(x) / d mu in closed form.
double dpdf_dmu(const CondNormalSpec& spec, double x);
/// d f_mu(x) / d x in closed form.
double dpdf_dx(const CondNormalSpec& spec, double x);
/// d G_mu(x, v) / d x written as f_mu(x) l(x, v) / h(v).
double dg_dx(const CondNormalSpec& spec, double x, double v);

/// Closed form of int_{-inf}^x (u - mu)/sigma2 f_mu(u) du.
double owen_integral(const CondNormalSpec& spec, double x);

/// B_mu(x); negative everywhere exactly when d Phi^{-1}(F_mu(x)) / d mu < -rho/sigma.
double b_gap(const CondNormalSpec& spec, double x);

struct CondDraw {
  double x;  ///< draw of X
  double v;  ///< the conditioning value X + U, always inside T
};

/// Exact two-stage draw: V from the truncated normal on T by inverse CDF,
/// then X | V. Requires tau2 > 0.
CondDraw sample_pair(const CondNormalSpec& spec, RandomStream& stream);
double sample(const CondNormalSpec& spec, RandomStream& stream);

/// Plain truncated-normal CDF of N(mean, sd^2) restricted to T, in log space.
Prob truncated_normal_cdf(const TruncationSet& truncation, double mean, double sd, double x);

}  // namespace selinf
