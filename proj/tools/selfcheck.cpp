#include "selfcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include "selinf/cond_normal.hpp"
#include "selinf/detail/gauss_kronrod.hpp"
#include "selinf/quantile_ci.hpp"
#include "selinf/rng.hpp"
#include "selinf/sim_harness.hpp"

namespace selinf::cli {

namespace {

constexpr std::uint64_t kSeed = 20240501;

// Random k <= 4 interval set on [-6, 6], sometimes with infinite ends.
TruncationSet random_set(RandomStream& rs) {
  const int k = 1 + static_cast<int>(rs.uniform() * 4);
  std::vector<double> e;
  for (int i = 0; i < 2 * k; ++i) e.push_back(-6.0 + 12.0 * rs.uniform());
  std::sort(e.begin(), e.end());
  if (rs.uniform() < 0.3) e.front() = -kInf;
  if (rs.uniform() < 0.3) e.back() = kInf;
  std::vector<Interval> iv;
  for (int i = 0; i < k; ++i) iv.push_back({e[2 * i], e[2 * i + 1]});
  return TruncationSet::make(iv);
}

CondNormalSpec random_spec(RandomStream& rs) {
  auto t = random_set(rs);
  const double sigma2 = 0.1 + 9.9 * rs.uniform();
  const double tau2 = 0.1 + 9.9 * rs.uniform();
  return CondNormalSpec(-4.0 + 8.0 * rs.uniform(), sigma2, tau2, std::move(t));
}

double integrate_pdf(const CondNormalSpec& spec, double x) {
  const double reach = 40.0 * std::max(spec.sigma(), spec.tau());
  double lo = std::min(spec.mu(), x);
  for (const auto& iv : spec.truncation().intervals()) {
    if (std::isfinite(iv.lo)) lo = std::min(lo, iv.lo);
    if (std::isfinite(iv.hi)) lo = std::min(lo, iv.hi);
  }
  lo -= reach;
  std::vector<double> cuts = {lo, x};
  for (const auto& iv : spec.truncation().intervals()) {
    for (double e : {iv.lo, iv.hi}) {
      if (e > lo && e < x) cuts.push_back(e);
    }
  }
  if (spec.mu() > lo && spec.mu() < x) cuts.push_back(spec.mu());
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double u) { return std::array<double, 1>{pdf(spec, u)}; };
  return detail::integrate_adaptive<1>(f, cuts, 1e-14, 1e-13, 2000).value[0];
}

struct Check {
  const char* name;
  std::function<std::pair<bool, double>()> run;  // pass flag and worst observed discrepancy
};

}  // namespace

bool run_selfcheck(std::ostream& out) {
  const std::vector<Check> checks = {
      {"cdf_vs_quadrature",
       [] {
         RandomStream rs(kSeed, 1);
         double worst = 0.0;
         for (int i = 0; i < 50; ++i) {
           const auto spec = random_spec(rs);
           const double x = -8.0 + 16.0 * rs.uniform();
           worst = std::max(worst, std::fabs(cdf(spec, x) - integrate_pdf(spec, x)));
         }
         return std::pair{worst <= 1e-9, worst};
       }},
      {"cdf_routes_agree",
       [] {
         RandomStream rs(kSeed, 2);
         double worst = 0.0;
         for (int i = 0; i < 200; ++i) {
           const auto spec = random_spec(rs);
           if (selection_prob(spec) < 1e-3) continue;
           const double x = -8.0 + 16.0 * rs.uniform();
           worst = std::max(worst, std::fabs(cdf_bivariate_route(spec, x) - cdf_tail_route(spec, x)));
         }
         return std::pair{worst <= 1e-9, worst};
       }},
      {"dpdf_dmu_finite_difference",
       [] {
         RandomStream rs(kSeed, 3);
         double worst = 0.0;
         for (int i = 0; i < 50; ++i) {
           const auto spec = random_spec(rs);
           const double x = spec.mu() + spec.sigma() * (-3.0 + 6.0 * rs.uniform());
           const double h = 1e-5;
           const double fd = (pdf(spec.with_mu(spec.mu() + h), x) - pdf(spec.with_mu(spec.mu() - h), x)) / (2 * h);
           const double exact = dpdf_dmu(spec, x);
           worst = std::max(worst, std::fabs(fd - exact) / std::max(std::fabs(exact), 1e-3));
         }
         return std::pair{worst <= 1e-5, worst};
       }},
      {"dpdf_dx_finite_difference",
       [] {
         RandomStream rs(kSeed, 4);
         double worst = 0.0;
         for (int i = 0; i < 50; ++i) {
           const auto spec = random_spec(rs);
           const double x = spec.mu() + spec.sigma() * (-3.0 + 6.0 * rs.uniform());
           const double h = 1e-5;
           const double fd = (pdf(spec, x + h) - pdf(spec, x - h)) / (2 * h);
           const double exact = dpdf_dx(spec, x);
           worst = std::max(worst, std::fabs(fd - exact) / std::max(std::fabs(exact), 1e-3));
         }
         return std::pair{worst <= 1e-5, worst};
       }},
      {"sampler_ks",
       [] {
         RandomStream rs(kSeed, 5);
         const auto spec = random_spec(rs);
         const int n = 20000;
         std::vector<double> draws(n);
         for (auto& d : draws) d = sample(spec, rs);
         std::sort(draws.begin(), draws.end());
         double ks = 0.0;
         for (int i = 0; i < n; ++i) {
           const double f = cdf(spec, draws[i]);
           ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
         }
         return std::pair{ks < 1.63 / std::sqrt(n), ks};
       }},
      {"length_below_bound",
       [] {
         RandomStream rs(kSeed, 6);
         double worst = -kInf;
         for (int i = 0; i < 200; ++i) {
           const auto spec = random_spec(rs);
           double q1 = rs.uniform();
           double q2 = rs.uniform();
           if (q1 > q2) std::swap(q1, q2);
           if (q1 == q2) continue;
           const QuantilePair pair(q1, q2);
           const SpecFamily family{spec.sigma2(), spec.tau2(), spec.truncation()};
           const auto ci = interval(family, -20.0 + 40.0 * rs.uniform(), pair);
           worst = std::max(worst, ci.length() / ci.bound);
         }
         return std::pair{worst < 1.0, worst};
       }},
  };

  bool all = true;
  out << "check,status,detail\n";
  for (const auto& check : checks) {
    const auto [ok, detail] = check.run();
    all = all && ok;
    out << check.name << ',' << (ok ? "pass" : "fail") << ',' << format_number(detail) << '\n';
  }
  return all;
}

}  // namespace selinf::cli
