#include <gtest/gtest.h>

#include <cmath>

#include "selinf/designs.hpp"
#include "selinf/error.hpp"
#include "selinf/rng.hpp"

namespace selinf {
namespace {

const QuantilePair kPair{0.025, 0.975};
const TruncationSet kHalf = TruncationSet::make({{0.0, kInf}});

TEST(Carving, Variances) {
  const auto a = carving_family(CarvingDesign(100, 0.5, 1.0, kHalf));
  EXPECT_NEAR(a.sigma2, 0.01, 1e-17);
  EXPECT_NEAR(a.tau2, 0.01, 1e-17);
  const auto b = carving_family(CarvingDesign(100, 0.8, 1.0, kHalf));
  EXPECT_NEAR(b.sigma2, 0.01, 1e-17);
  EXPECT_NEAR(b.tau2, 0.0025, 1e-17);
  EXPECT_EQ(carving_spec(CarvingDesign(100, 0.8, 1.0, kHalf), 0.3).mu(), 0.3);
}

TEST(Carving, Validation) {
  EXPECT_THROW(CarvingDesign(100, 1.0, 1.0, kHalf), ValidationError);
  EXPECT_THROW(CarvingDesign(100, 0.0, 1.0, kHalf), ValidationError);
  EXPECT_THROW(CarvingDesign(1, 0.5, 1.0, kHalf), ValidationError);
  EXPECT_THROW(CarvingDesign(10, 0.33, 1.0, kHalf), ValidationError);
  EXPECT_THROW(CarvingDesign(100, 0.5, 0.0, kHalf), ValidationError);
  const CarvingDesign d(100, 0.75, 1.0, kHalf);
  EXPECT_EQ(d.selection_size(), 75);
  EXPECT_EQ(d.holdout_size(), 25);
}

TEST(Carving, BoundAndSplitting) {
  const CarvingDesign d(100, 0.75, 1.0, kHalf);
  EXPECT_NEAR(carving_bound(d, kPair), 0.7839855938160217, 1e-13);
  const auto split = splitting_interval_carving(d, 0.2, kPair);
  EXPECT_NEAR(split.length(), 0.7839855938160217, 1e-13);
  EXPECT_NEAR(split.lower + split.upper, 0.4, 1e-14);
  const CarvingDesign half(100, 0.5, 1.0, kHalf);
  EXPECT_NEAR(carving_bound(half, kPair), std::sqrt(2.0) * 0.39199279690801085, 1e-13);
}

TEST(Carving, BoundMatchesGenericBound) {
  for (double delta : {0.25, 0.5, 0.75, 0.9}) {
    const CarvingDesign d(100, delta, 2.5, kHalf);
    const auto fam = carving_family(d);
    EXPECT_NEAR(fam.tau2 / (fam.sigma2 + fam.tau2), 1.0 - delta, 1e-14);
    EXPECT_NEAR(carving_bound(d, kPair), length_bound(fam.sigma2, fam.tau2, kPair), 1e-13);
  }
}

TEST(RandResponse, Variances) {
  const auto f = randresp_family(RandResponseDesign(100, 1.0, 1.0, kHalf));
  EXPECT_NEAR(f.sigma2, 0.01, 1e-17);
  EXPECT_NEAR(f.tau2, 0.01, 1e-17);
}

TEST(RandResponse, Validation) {
  EXPECT_THROW(RandResponseDesign(0, 1.0, 1.0, kHalf), ValidationError);
  EXPECT_THROW(RandResponseDesign(10, 1.0, 0.0, kHalf), ValidationError);
  EXPECT_THROW(RandResponseDesign(10, -1.0, 1.0, kHalf), ValidationError);
  EXPECT_THROW(RandResponseDesign(10, 1.0, 2.0, kHalf).inference_size(), ValidationError);
  EXPECT_EQ(RandResponseDesign(100, 1.0, 1.0, kHalf).inference_size(), 50);
  EXPECT_EQ(RandResponseDesign(100, 1.0, 3.0, kHalf).inference_size(), 75);
}

TEST(RandResponse, BoundAndSplitting) {
  const RandResponseDesign d(100, 1.0, 1.0, kHalf);
  EXPECT_NEAR(randresp_bound(d, kPair), 0.5543615297398712, 1e-13);
  EXPECT_NEAR(splitting_interval_randresp(d, 0.0, kPair).length(), 0.5543615297398712, 1e-13);
  const auto fam = randresp_family(d);
  EXPECT_NEAR(randresp_bound(d, kPair), length_bound(fam.sigma2, fam.tau2, kPair), 1e-13);
  EXPECT_NEAR(randresp_bound(d, kPair) / unconditional_length(fam.sigma2, kPair), std::sqrt(2.0), 1e-13);
  const RandResponseDesign wide(100, 1.0, 1e12, kHalf);
  EXPECT_NEAR(randresp_bound(wide, kPair) / unconditional_length(0.01, kPair), 1.0, 1e-9);
}

TEST(Classical, CoversAtNominalRate) {
  RandomStream rs(9, 0);
  const int n = 20000;
  int covered = 0;
  for (int i = 0; i < n; ++i) {
    const double xbar = 1.0 + 0.2 * rs.normal();
    covered += classical_interval(xbar, 0.2, kPair).covers(1.0);
  }
  EXPECT_NEAR(static_cast<double>(covered) / n, 0.95, 0.015);
  EXPECT_THROW(classical_interval(0.0, 0.0, kPair), DomainError);
}

}  // namespace
}  // namespace selinf
