#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "selinf/error.hpp"
#include "selinf/scalar_normal.hpp"

namespace selinf {
namespace {

TEST(StdPdf, KnownValues) {
  EXPECT_DOUBLE_EQ(std_pdf(0.0), 0.3989422804014327);
  EXPECT_EQ(std_pdf(kInf), 0.0);
  EXPECT_EQ(std_pdf(-kInf), 0.0);
  EXPECT_NEAR(std_pdf(1.0), std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi), 1e-17);
  EXPECT_NEAR(log_std_pdf(3.0), -4.5 - 0.9189385332046727, 1e-15);
}

TEST(StdCdf, KnownValues) {
  EXPECT_EQ(std_cdf(0.0), 0.5);
  EXPECT_EQ(std_cdf(-kInf), 0.0);
  EXPECT_EQ(std_cdf(kInf), 1.0);
  EXPECT_NEAR(std_cdf(1.959963984540054), 0.975, 1e-16);
  EXPECT_NEAR(std_ccdf(1.959963984540054), 0.025, 3e-17);
}

TEST(StdCdf, DeepTailInLogSpace) {
  // log Phi(-40) from a 40-digit evaluation
  EXPECT_NEAR(log_std_cdf(-40.0), -804.60844201375379, 1e-11);
  EXPECT_NEAR(log_std_cdf(-1e4), -5e7 - std::log(1e4) - 0.9189385332046727, 1e-6);
  EXPECT_NEAR(log_std_cdf(5.0), std::log1p(-2.866515718791939e-7), 1e-20);
}

TEST(StdQuantile, KnownValuesAndSymmetry) {
  EXPECT_EQ(std_quantile(0.5), 0.0);
  EXPECT_NEAR(std_quantile(0.975), 1.959963984540054, 1e-15);
  for (double q : {1e-12, 1e-5, 0.01, 0.2, 0.4999}) {
    const double z = std_quantile(q);
    // 1 - q is itself rounded by up to 1.1e-16
    EXPECT_NEAR(z, -std_quantile(1.0 - q), 1e-13 * std::max(1.0, std::fabs(z)) + 1.2e-16 / std_pdf(z)) << q;
  }
  EXPECT_THROW(std_quantile(0.0), DomainError);
  EXPECT_THROW(std_quantile(1.0), DomainError);
}

TEST(StdQuantile, RoundTrip) {
  for (double x = -37.0; x <= 8.0; x += 0.37) {
    const double q = std_cdf(x);
    // above zero, q itself carries an absolute rounding error of about 1e-16
    const double slack = x > 0.0 ? 2.3e-16 / std_pdf(x) : 0.0;
    EXPECT_NEAR(std_quantile(q), x, 1e-12 * std::max(1.0, std::fabs(x)) + slack) << x;
  }
  for (double lq : {-1e-3, -1.0, -50.0, -800.0, -5000.0}) {
    EXPECT_NEAR(log_std_cdf(std_quantile_from_log(lq)), lq, 1e-12 * std::fabs(lq)) << lq;
  }
}

TEST(IntervalMass, KnownValues) {
  EXPECT_EQ(cdf_interval_mass(-kInf, kInf, 0.0, 1.0), 1.0);
  EXPECT_NEAR(cdf_interval_mass(-1.0, 1.0, 0.0, 1.0), 0.6826894921370859, 1e-16);
  const double tail = cdf_interval_mass(10.0, 11.0, 0.0, 1.0);
  EXPECT_GT(tail, 0.0);
  EXPECT_NEAR(tail, 7.6196619582030762e-24, 1e-37);
  EXPECT_NEAR(cdf_interval_mass(-11.0, -10.0, 0.0, 1.0), tail, 1e-37);
  EXPECT_NEAR(log_interval_mass(50.0, 51.0, 0.0, 1.0), log_std_cdf(-50.0), 1e-9);
  EXPECT_THROW(cdf_interval_mass(1.0, 0.0, 0.0, 1.0), ValidationError);
  EXPECT_THROW(cdf_interval_mass(0.0, 1.0, 0.0, 0.0), DomainError);
}

TEST(IntervalMass, NarrowIntervalsKeepRelativePrecision) {
  const double hi = 3.0 + 1e-9;
  const double w = hi - 3.0;
  EXPECT_NEAR(log_std_interval_mass(3.0, hi), std::log(w * std_pdf(3.0 + w / 2)), 1e-12);
  EXPECT_NEAR(log_std_interval_mass(-hi, -3.0), std::log(w * std_pdf(3.0 + w / 2)), 1e-12);
}

TEST(Bvn, Marginals) {
  for (double k : {-3.0, -0.4, 0.0, 1.5}) {
    for (double r : {-0.9, 0.0, 0.7}) {
      EXPECT_NEAR(bvn_cdf(kInf, k, r), std_cdf(k), 1e-15);
      EXPECT_NEAR(bvn_cdf(k, kInf, r), std_cdf(k), 1e-15);
      EXPECT_EQ(bvn_cdf(-kInf, k, r), 0.0);
    }
  }
}

TEST(Bvn, IndependenceAndSheppard) {
  for (double h : {-2.0, 0.3, 1.1}) {
    for (double k : {-0.5, 2.0}) EXPECT_NEAR(bvn_cdf(h, k, 0.0), std_cdf(h) * std_cdf(k), 1e-15);
  }
  EXPECT_NEAR(bvn_cdf(0.0, 0.0, 0.5), 0.3333333333333333, 1e-15);
  EXPECT_NEAR(bvn_cdf(0.0, 0.0, -0.5), 1.0 / 6.0, 1e-15);
  EXPECT_THROW(bvn_cdf(0.0, 0.0, 1.5), DomainError);
}

TEST(Bvn, DegenerateCorrelations) {
  EXPECT_NEAR(bvn_cdf(0.4, -0.2, 1.0), std_cdf(-0.2), 1e-15);
  EXPECT_NEAR(bvn_cdf(0.4, -0.2, -1.0), std_cdf(0.4) - std_cdf(0.2), 1e-15);
}

TEST(Bvn, MonotoneInEachArgumentAndCorrelation) {
  double prev = 0.0;
  for (double h = -6.0; h <= 6.0; h += 0.25) {
    const double p = bvn_cdf(h, 0.7, 0.6);
    EXPECT_GE(p, prev);
    prev = p;
  }
  prev = 0.0;
  for (double r = -0.99; r <= 0.99; r += 0.03) {
    const double p = bvn_cdf(0.2, -0.1, r);
    EXPECT_GE(p, prev - 1e-16);
    prev = p;
  }
}

TEST(LogSumExp, Basics) {
  const std::vector<double> t{-1000.0, -1000.0};
  EXPECT_NEAR(log_sum_exp(t), -1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -kInf);
}

TEST(Prob, Validates) {
  EXPECT_THROW(Prob(1.5), DomainError);
  EXPECT_THROW(Prob(-0.1), DomainError);
  EXPECT_THROW(LogProb(0.1), DomainError);
  EXPECT_EQ(Prob(0.25).value(), 0.25);
}

TEST(MillsRatio, MatchesDefinition) {
  for (double t : {0.0, 0.5, 2.0, 5.0}) {
    EXPECT_NEAR(mills_ratio(t), std_ccdf(t) / std_pdf(t), 1e-14) << t;
  }
  EXPECT_NEAR(mills_ratio(100.0), 1.0 / 100.0 * (1 - 1e-4 + 3e-8), 1e-12);
}

}  // namespace
}  // namespace selinf
