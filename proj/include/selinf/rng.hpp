#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace selinf {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. A (seed, stream) pair names an independent
/// sequence, so replicate i of an experiment can be regenerated without
/// touching replicates 0..i-1, and work can be split across threads without
/// changing any draw.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint32_t next_u32();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via inverse CDF of uniform().
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Stream id for a (group, index) pair, e.g. (grid point, replicate).
constexpr std::uint64_t stream_id(std::uint64_t group, std::uint64_t index) {
  return (group << 32) ^ index;
}

}  // namespace selinf
