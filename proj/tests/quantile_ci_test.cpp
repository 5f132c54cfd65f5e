#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "selinf/error.hpp"
#include "selinf/quantile_ci.hpp"
#include "test_support.hpp"

namespace selinf {
namespace {

const TruncationSet kUnit = TruncationSet::make({{-1.0, 1.0}});
const SpecFamily kUnitFamily{1.0, 1.0, kUnit};
const QuantilePair kPair{0.025, 0.975};

TEST(QuantilePair, Validates) {
  EXPECT_THROW(QuantilePair(0.0, 0.5), ValidationError);
  EXPECT_THROW(QuantilePair(0.6, 0.5), ValidationError);
  EXPECT_THROW(QuantilePair(0.1, 1.0), ValidationError);
  EXPECT_NO_THROW(QuantilePair(0.3, 0.3));
  const auto p = QuantilePair::equal_tailed(0.05);
  EXPECT_DOUBLE_EQ(p.q1(), 0.025);
  EXPECT_DOUBLE_EQ(p.q2(), 0.975);
  EXPECT_NEAR(p.level(), 0.95, 1e-15);
  EXPECT_THROW(QuantilePair::equal_tailed(1.0), ValidationError);
}

TEST(MuQ, RealLineClosedForm) {
  const SpecFamily line{2.0, 1.0, TruncationSet::real_line()};
  for (double x : {-3.0, 0.0, 4.5}) {
    for (double q : {0.025, 0.3, 0.975}) {
      EXPECT_NEAR(mu_q(line, x, q), x - std::sqrt(2.0) * std_quantile(1.0 - q), 1e-9) << x << " " << q;
    }
  }
}

TEST(MuQ, SymmetricMedian) { EXPECT_NEAR(mu_q(kUnitFamily, 0.0, 0.5), 0.0, 1e-10); }

TEST(MuQ, MatchesReferenceRoot) {
  // 40-digit reference root of F_mu(2) = 0.975.
  EXPECT_NEAR(mu_q(kUnitFamily, 2.0, 0.025), 0.90071007716576382, 1e-9);
}

TEST(MuQ, MatchesGridScan) {
  // Scan F in mu through the quadrature route and interpolate the crossing.
  const double target = 0.975;
  double prev_mu = -3.0;
  double prev_f = cdf_tail_route(kUnitFamily.at(prev_mu), 2.0);
  double root = std::nan("");
  for (double mu = -3.0 + 1e-3; mu <= 3.0; mu += 1e-3) {
    const double f = cdf_tail_route(kUnitFamily.at(mu), 2.0);
    if (prev_f >= target && f < target) {
      root = prev_mu + (prev_f - target) / (prev_f - f) * (mu - prev_mu);
      break;
    }
    prev_mu = mu;
    prev_f = f;
  }
  ASSERT_FALSE(std::isnan(root));
  EXPECT_NEAR(mu_q(kUnitFamily, 2.0, 0.025), root, 1e-6);
}

TEST(MuQ, RejectsBadArguments) {
  EXPECT_THROW(mu_q(kUnitFamily, kInf, 0.5), DomainError);
  EXPECT_THROW(mu_q(kUnitFamily, 0.0, 1.0), DomainError);
}

TEST(MuQ, UnrandomizedBoundaryDoesNotConverge) {
  const SpecFamily half{1.0, 0.0, TruncationSet::make({{0.0, kInf}})};
  EXPECT_THROW(mu_q(half, 1e-8, 0.025), NonConvergenceError);
  EXPECT_NO_THROW(mu_q(half, 2.0, 0.025));
}

TEST(Bound, KnownValues) {
  EXPECT_NEAR(length_bound(1.0, 1.0, kPair), 5.5436152973987118, 1e-13);
  EXPECT_NEAR(unconditional_length(1.0, kPair), 3.9199279690801085, 1e-13);
  EXPECT_EQ(length_bound(1.0, 0.0, kPair), kInf);
  EXPECT_NEAR(length_bound(4.0, 12.0, kPair), 2.0 / std::sqrt(0.75) * 3.9199279690801085, 1e-12);
}

TEST(Interval, RealLineLengthIsUnconditional) {
  const SpecFamily line{1.0, 1.0, TruncationSet::real_line()};
  const auto ci = interval(line, 0.7, kPair);
  EXPECT_NEAR(ci.length(), 3.9199279690801085, 1e-9);
  EXPECT_TRUE(ci.covers(0.7));
}

TEST(Interval, SymmetricAtZero) {
  const auto ci = interval(kUnitFamily, 0.0, kPair);
  EXPECT_NEAR(ci.lower, -ci.upper, 1e-9);
  EXPECT_LT(ci.length(), ci.bound);
  EXPECT_EQ(ci.x, 0.0);
}

TEST(Interval, DegeneratePairHasZeroLength) {
  const auto ci = interval(kUnitFamily, 0.4, QuantilePair(0.3, 0.3));
  EXPECT_EQ(ci.length(), 0.0);
}

TEST(Interval, EndpointsIncreaseInX) {
  for (const auto& t : {kUnit, TruncationSet::make({{-kInf, -2.0}, {2.0, kInf}})}) {
    const SpecFamily fam{1.0, 1.0, t};
    double lo = -kInf;
    double hi = -kInf;
    for (double x = -8.0; x <= 8.0; x += 0.4) {
      const auto ci = interval(fam, x, kPair);
      EXPECT_GT(ci.lower, lo) << x;
      EXPECT_GT(ci.upper, hi) << x;
      lo = ci.lower;
      hi = ci.upper;
    }
  }
}

TEST(Interval, StrictBoundOnRandomSpecs) {
  RandomStream rs(202, 0);
  for (int i = 0; i < 300; ++i) {
    const SpecFamily fam{testing::log_uniform_in(rs, 0.1, 10.0), testing::log_uniform_in(rs, 0.1, 10.0),
                         testing::random_truncation(rs, 4)};
    const double q1 = testing::uniform_in(rs, 0.001, 0.5);
    const QuantilePair pair(q1, testing::uniform_in(rs, q1 + 0.001, 0.999));
    const double x = testing::uniform_in(rs, -20.0, 20.0);
    const auto ci = interval(fam, x, pair);
    EXPECT_LT(ci.length(), ci.bound) << fam.truncation.to_string() << " x=" << x;
    EXPECT_GT(ci.length(), 0.0);
  }
}

TEST(Sharpness, BoundedSetApproachesBound) {
  const double bound = length_bound(1.0, 1.0, kPair);
  const double len = interval(kUnitFamily, 50.0, kPair).length();
  EXPECT_LT(len, bound);
  EXPECT_NEAR(len, bound, 0.01 * bound);
  const double gap_q1 = sharpness_gap(kUnitFamily, 40.0, 0.025);
  const double gap_q1_far = sharpness_gap(kUnitFamily, 200.0, 0.025);
  EXPECT_LT(std::fabs(gap_q1_far), std::fabs(gap_q1));
}

TEST(Sharpness, GapSetApproachesUnconditional) {
  const SpecFamily gap{1.0, 1.0, TruncationSet::make({{-kInf, -2.0}, {2.0, kInf}})};
  const double len = interval(gap, 50.0, kPair).length();
  EXPECT_NEAR(len, 3.9199279690801085, 0.05 * 3.9199279690801085);
}

TEST(Sharpness, CurveFollowsGrid) {
  const std::vector<double> xs{-2.0, 0.0, 2.0};
  const auto curve = sharpness_curve(kUnitFamily, kPair, xs);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_NEAR(curve[0].length, curve[2].length, 1e-8);
  EXPECT_LT(curve[1].length, curve[2].length);
}

}  // namespace
}  // namespace selinf
