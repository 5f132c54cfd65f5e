#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "selinf/rng.hpp"

namespace selinf {
namespace {

// Known-answer vectors for Philox4x32-10 published with Random123.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, Reproducible) {
  RandomStream a(7, 3);
  RandomStream b(7, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(RandomStream, StreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) firsts.insert(RandomStream(1, s)());
  for (std::uint64_t seed = 0; seed < 64; ++seed) firsts.insert(RandomStream(seed, 1000)());
  EXPECT_EQ(firsts.size(), 128u);
}

TEST(RandomStream, UniformMoments) {
  RandomStream rs(11, 0);
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rs.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 4.0 * std::sqrt(4.0 / 45.0 / n));
}

TEST(RandomStream, NormalMoments) {
  RandomStream rs(12, 0);
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rs.normal();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sum2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(StreamId, SeparatesGroups) {
  EXPECT_NE(stream_id(1, 0), stream_id(2, 0));
  EXPECT_NE(stream_id(1, 5), stream_id(1, 6));
  EXPECT_EQ(stream_id(0, 9), 9u);
}

}  // namespace
}  // namespace selinf
