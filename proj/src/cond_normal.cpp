#include "selinf/cond_normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "selinf/detail/gauss_kronrod.hpp"
#include "selinf/error.hpp"

namespace selinf {

namespace {

// Standardized view of T under V ~ N(mu, s^2): endpoints (a_i - mu)/s and log masses.
struct Standardized {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> log_mass;
  double log_total = 0.0;
};

Standardized standardize(const TruncationSet& t, double mean, double sd) {
  Standardized out;
  const auto ivs = t.intervals();
  out.alpha.reserve(ivs.size());
  out.beta.reserve(ivs.size());
  out.log_mass.reserve(ivs.size());
  for (const auto& iv : ivs) {
    const double a = (iv.lo - mean) / sd;
    const double b = (iv.hi - mean) / sd;
    out.alpha.push_back(a);
    out.beta.push_back(b);
    out.log_mass.push_back(log_std_interval_mass(a, b));
  }
  out.log_total = log_sum_exp(out.log_mass);
  return out;
}

double clamp_prob(double p) { return std::clamp(p, 0.0, 1.0); }

void require_randomized(const CondNormalSpec& spec, const char* what) {
  if (!(spec.tau2() > 0.0)) {
    throw UnsupportedError(std::string(what) + " requires tau2 > 0");
  }
}

// P(Y <= h, alpha < Z < beta) / P(alpha < Z < beta) for standard normals with
// correlation r, reflecting Z so that the differenced orthants sit in a lower tail.
double ratio_bivariate(double h, double alpha, double beta, double r, double mass) {
  if (!(mass > 0.0)) throw DomainError("bivariate route: interval mass underflows");
  double hi_term;
  double lo_term;
  if (alpha + beta <= 0.0) {
    hi_term = bvn_cdf(h, beta, r);
    lo_term = alpha == -kInf ? 0.0 : static_cast<double>(bvn_cdf(h, alpha, r));
  } else {
    hi_term = bvn_cdf(h, -alpha, -r);
    lo_term = beta == kInf ? 0.0 : static_cast<double>(bvn_cdf(h, -beta, -r));
  }
  return clamp_prob((hi_term - lo_term) / mass);
}

// E[Phi(c - t Z) | alpha < Z < beta] for standard normal Z, by quadrature on a
// coordinate anchored at the endpoint nearest the mode so that the weight
// never underflows.
double ratio_quadrature(double c, double t, double alpha, double beta) {
  constexpr double kRelTol = 1e-14;
  // Weight and G as functions of the local coordinate u.
  double z0;
  double dir;     // z = z0 + dir * u
  double slope;   // weight exp(slope * u - u^2 / 2) relative to phi(z0)
  double length;  // u ranges over [0, length]
  if (alpha < 0.0 && beta > 0.0) {
    z0 = std::max(alpha, -12.0);
    dir = 1.0;
    slope = 0.0;
    length = std::min(beta, 12.0) - z0;
  } else if (beta <= 0.0) {
    z0 = beta;
    dir = -1.0;
    slope = beta;
    length = beta - alpha;
  } else {
    z0 = alpha;
    dir = 1.0;
    slope = -alpha;
    length = beta - alpha;
  }
  const double decay = std::fabs(slope);
  const double upper = std::min(length, slope == 0.0 ? 24.0 : std::min(12.0, 45.0 / decay));

  auto integrand = [&](double u) {
    const double z = z0 + dir * u;
    const double w = slope == 0.0 ? std::exp(-0.5 * z * z) : std::exp(slope * u - 0.5 * u * u);
    return std::array<double, 2>{w, w * static_cast<double>(std_cdf(c - t * z))};
  };

  std::vector<double> breaks = {0.0, upper};
  if (t > 0.0) {
    // G changes on the scale 1/t around z = c/t.
    const double u_step = (c / t - z0) * dir;
    for (double off : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
      const double u = u_step + off / t;
      if (u > 0.0 && u < upper) breaks.push_back(u);
    }
  }
  if (decay > 0.0) {
    for (double m : {1.0, 4.0}) {
      const double u = m / decay;
      if (u < upper) breaks.push_back(u);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const auto res = detail::integrate_adaptive<2>(integrand, breaks, 0.0, kRelTol);
  if (!(res.value[0] > 0.0)) return std_cdf(c - t * z0);
  return clamp_prob(res.value[1] / res.value[0]);
}

// Route used for the per-interval ratios of the conditional CDF.
enum class Route { kAuto, kBivariate, kTail };

double cdf_impl(const CondNormalSpec& spec, double x, Route route) {
  if (std::isnan(x)) throw DomainError("cdf: NaN argument");
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  if (spec.tau2() == 0.0) {
    return truncated_normal_cdf(spec.truncation(), spec.mu(), spec.sigma(), x);
  }
  const double s = spec.total_sd();
  const auto st = standardize(spec.truncation(), spec.mu(), s);
  const double h = (x - spec.mu()) / spec.sigma();
  const double r = spec.sigma() / s;
  const double c = (x - spec.mu()) * s / (spec.sigma() * spec.tau());
  const double t = spec.sigma() / spec.tau();
  const double log_min_mass = std::log(kBivariateRouteMinMass);

  // Heaviest intervals first; in automatic mode an interval whose whole
  // weight is below 1e-17 of the running total cannot change the result.
  std::vector<std::size_t> order(st.alpha.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return st.log_mass[a] > st.log_mass[b]; });
  double total = 0.0;
  for (std::size_t i : order) {
    const double weight = std::exp(st.log_mass[i] - st.log_total);
    if (weight == 0.0) continue;
    if (route == Route::kAuto && weight < 1e-17 * total) continue;
    const bool bivariate = route == Route::kBivariate ||
                           (route == Route::kAuto && st.log_mass[i] >= log_min_mass);
    double ratio =
        bivariate ? ratio_bivariate(h, st.alpha[i], st.beta[i], r, std::exp(st.log_mass[i]))
                  : ratio_quadrature(c, t, st.alpha[i], st.beta[i]);
    // The closed form is only accurate in absolute terms; small ratios are redone
    // by quadrature so that lower-tail values keep their relative precision.
    if (bivariate && route == Route::kAuto && ratio < kBivariateRouteMinMass) {
      ratio = ratio_quadrature(c, t, st.alpha[i], st.beta[i]);
    }
    total += weight * ratio;
  }
  return clamp_prob(total);
}

// log sum_i [Phi((b_i - x)/tau) - Phi((a_i - x)/tau)].
double log_inner_mass(const CondNormalSpec& spec, double x) {
  const auto ivs = spec.truncation().intervals();
  std::vector<double> terms;
  terms.reserve(ivs.size());
  for (const auto& iv : ivs) {
    terms.push_back(log_std_interval_mass((iv.lo - x) / spec.tau(), (iv.hi - x) / spec.tau()));
  }
  return log_sum_exp(terms);
}

double phi_of_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) return 0.0;
  return std_pdf(std_quantile(p));
}

// Standard normal restricted to (alpha, beta), drawn by inverse CDF at u.
double std_truncated_inverse(double alpha, double beta, double u) {
  if (alpha + beta > 0.0) return -std_truncated_inverse(-beta, -alpha, 1.0 - u);
  if (beta <= 0.0) {
    const double lb = log_std_cdf(beta);
    const double ratio = alpha == -kInf ? 0.0 : std::exp(log_std_cdf(alpha) - lb);
    const double lp = lb + std::log(ratio + u * (1.0 - ratio));
    return std_quantile_from_log(std::min(lp, -1e-300));
  }
  const double pa = std_cdf(alpha);
  const double pbc = std_ccdf(beta);
  const double mass = 1.0 - pa - pbc;
  const double p = pa + u * mass;
  if (p <= 0.5) return std_quantile(p);
  return -std_quantile(pbc + (1.0 - u) * mass);
}

double strictly_inside(double v, double lo, double hi) {
  if (v <= lo) v = std::nextafter(lo, kInf);
  if (v >= hi) v = std::nextafter(hi, -kInf);
  return v;
}

}  // namespace

CondNormalSpec::CondNormalSpec(double mu, double sigma2, double tau2, TruncationSet truncation)
    : mu_(mu),
      sigma2_(sigma2),
      tau2_(tau2),
      sigma_(std::sqrt(sigma2)),
      tau_(std::sqrt(tau2)),
      total_sd_(std::sqrt(sigma2 + tau2)),
      truncation_(std::move(truncation)) {
  if (!std::isfinite(mu)) throw DomainError("mu must be finite");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be positive");
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw DomainError("tau2 must be nonnegative");
}

CondNormalSpec CondNormalSpec::with_mu(double mu) const {
  return CondNormalSpec(mu, sigma2_, tau2_, truncation_);
}

LogProb log_selection_prob(const CondNormalSpec& spec) {
  const auto ivs = spec.truncation().intervals();
  std::vector<double> terms;
  terms.reserve(ivs.size());
  for (const auto& iv : ivs) {
    terms.push_back(log_interval_mass(iv.lo, iv.hi, spec.mu(), spec.total_sd()));
  }
  return LogProb(std::min(0.0, log_sum_exp(terms)));
}

Prob selection_prob(const CondNormalSpec& spec) {
  double total = 0.0;
  for (const auto& iv : spec.truncation().intervals()) {
    total += cdf_interval_mass(iv.lo, iv.hi, spec.mu(), spec.total_sd());
  }
  return Prob(std::min(1.0, total));
}

Prob cdf(const CondNormalSpec& spec, double x) { return Prob(cdf_impl(spec, x, Route::kAuto)); }

Prob cdf_bivariate_route(const CondNormalSpec& spec, double x) {
  return Prob(cdf_impl(spec, x, Route::kBivariate));
}

Prob cdf_tail_route(const CondNormalSpec& spec, double x) {
  require_randomized(spec, "cdf_tail_route");
  return Prob(cdf_impl(spec, x, Route::kTail));
}

Prob truncated_normal_cdf(const TruncationSet& truncation, double mean, double sd, double x) {
  if (x == -kInf) return Prob(0.0);
  if (x == kInf) return Prob(1.0);
  std::vector<double> all;
  std::vector<double> below;
  for (const auto& iv : truncation.intervals()) {
    const double lm = log_interval_mass(iv.lo, iv.hi, mean, sd);
    all.push_back(lm);
    if (x >= iv.hi) {
      below.push_back(lm);
    } else if (x > iv.lo) {
      below.push_back(log_interval_mass(iv.lo, x, mean, sd));
    }
  }
  if (below.empty()) return Prob(0.0);
  return Prob(clamp_prob(std::exp(log_sum_exp(below) - log_sum_exp(all))));
}

double log_pdf(const CondNormalSpec& spec, double x) {
  if (std::isinf(x)) return -kInf;
  const double z = (x - spec.mu()) / spec.sigma();
  const double base = log_std_pdf(z) - std::log(spec.sigma()) - log_selection_prob(spec);
  if (spec.tau2() == 0.0) {
    return spec.truncation().contains(x) ? base : -kInf;
  }
  return base + log_inner_mass(spec, x);
}

double pdf(const CondNormalSpec& spec, double x) { return std::exp(log_pdf(spec, x)); }

NormalParams cond_given_sum(const CondNormalSpec& spec, double v) {
  require_randomized(spec, "cond_given_sum");
  const double rho2 = spec.rho2();
  return {rho2 * spec.mu() + (1.0 - rho2) * v, spec.sigma2() * rho2};
}

Prob g_cdf(const CondNormalSpec& spec, double x, double v) {
  require_randomized(spec, "g_cdf");
  if (v == kInf) return Prob(0.0);
  if (v == -kInf) return Prob(1.0);
  const double s2 = spec.sigma2() + spec.tau2();
  const double mean = (spec.tau2() * spec.mu() + spec.sigma2() * v) / s2;
  const double sd = spec.sigma() * spec.tau() / spec.total_sd();
  return std_cdf((x - mean) / sd);
}

double h_weight(const CondNormalSpec& spec, double v) {
  if (std::isinf(v)) return 0.0;
  const double s = spec.total_sd();
  return std::exp(log_std_pdf((v - spec.mu()) / s) - std::log(s) - log_selection_prob(spec));
}

double l_weight(const CondNormalSpec& spec, double x, double v) {
  require_randomized(spec, "l_weight");
  if (std::isinf(v)) return 0.0;
  const double tau = spec.tau();
  return std::exp(log_std_pdf((v - x) / tau) - std::log(tau) - log_inner_mass(spec, x));
}

double dpdf_dmu(const CondNormalSpec& spec, double x) {
  require_randomized(spec, "dpdf_dmu");
  double hsum = 0.0;
  for (const auto& iv : spec.truncation().intervals()) {
    hsum += h_weight(spec, iv.hi) - h_weight(spec, iv.lo);
  }
  return pdf(spec, x) * ((x - spec.mu()) / spec.sigma2() + hsum);
}

double dpdf_dx(const CondNormalSpec& spec, double x) {
  require_randomized(spec, "dpdf_dx");
  double lsum = 0.0;
  for (const auto& iv : spec.truncation().intervals()) {
    lsum += l_weight(spec, x, iv.hi) - l_weight(spec, x, iv.lo);
  }
  return pdf(spec, x) * (-(x - spec.mu()) / spec.sigma2() - lsum);
}

double dg_dx(const CondNormalSpec& spec, double x, double v) {
  require_randomized(spec, "dg_dx");
  if (std::isinf(v)) return 0.0;
  const double s = spec.total_sd();
  const double tau = spec.tau();
  // log f + log l - log h; the selection probability cancels.
  const double log_f = log_pdf(spec, x);
  const double log_l = log_std_pdf((v - x) / tau) - std::log(tau) - log_inner_mass(spec, x);
  const double log_h = log_std_pdf((v - spec.mu()) / s) - std::log(s) - log_selection_prob(spec);
  return std::exp(log_f + log_l - log_h);
}

double owen_integral(const CondNormalSpec& spec, double x) {
  require_randomized(spec, "owen_integral");
  double acc = -pdf(spec, x);
  for (const auto& iv : spec.truncation().intervals()) {
    acc -= h_weight(spec, iv.hi) * g_cdf(spec, x, iv.hi);
    acc += h_weight(spec, iv.lo) * g_cdf(spec, x, iv.lo);
  }
  return acc;
}

namespace {

double b_gap_terms(const CondNormalSpec& spec, double x, double f_cdf) {
  double acc = spec.rho() / spec.sigma() * phi_of_quantile(f_cdf) - pdf(spec, x);
  for (const auto& iv : spec.truncation().intervals()) {
    acc += h_weight(spec, iv.hi) * (f_cdf - g_cdf(spec, x, iv.hi));
    acc -= h_weight(spec, iv.lo) * (f_cdf - g_cdf(spec, x, iv.lo));
  }
  return acc;
}

}  // namespace

double b_gap(const CondNormalSpec& spec, double x) {
  require_randomized(spec, "b_gap");
  const double f_cdf = cdf(spec, x);
  if (f_cdf > 0.5) {
    // B is unchanged under (x, mu, T) -> (-x, -mu, -T); the reflected CDF is
    // the survival function, which keeps its relative precision in the upper tail.
    std::vector<Interval> mirrored;
    for (const auto& iv : spec.truncation().intervals()) mirrored.push_back({-iv.hi, -iv.lo});
    const CondNormalSpec reflected(-spec.mu(), spec.sigma2(), spec.tau2(), TruncationSet::make(mirrored));
    const double s_cdf = cdf(reflected, -x);
    if (s_cdf < 0.5) return b_gap_terms(reflected, -x, s_cdf);
  }
  return b_gap_terms(spec, x, f_cdf);
}

CondDraw sample_pair(const CondNormalSpec& spec, RandomStream& stream) {
  require_randomized(spec, "sample");
  const double s = spec.total_sd();
  const auto st = standardize(spec.truncation(), spec.mu(), s);
  const auto ivs = spec.truncation().intervals();

  std::size_t pick = ivs.size() - 1;
  if (ivs.size() > 1) {
    const double u = stream.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      cum += std::exp(st.log_mass[i] - st.log_total);
      if (u < cum) {
        pick = i;
        break;
      }
    }
  }
  const double z = std_truncated_inverse(st.alpha[pick], st.beta[pick], stream.uniform());
  const double v = strictly_inside(spec.mu() + s * z, ivs[pick].lo, ivs[pick].hi);
  const auto cond = cond_given_sum(spec, v);
  return {cond.mean + std::sqrt(cond.var) * stream.normal(), v};
}

double sample(const CondNormalSpec& spec, RandomStream& stream) {
  return sample_pair(spec, stream).x;
}

}  // namespace selinf
