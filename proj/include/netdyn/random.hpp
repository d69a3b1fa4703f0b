#pragma once

#include <cstdint>
#include <limits>

namespace netdyn {

/// SplitMix64. Satisfies UniformRandomBitGenerator so it plugs into the
/// <random> distributions. Every sampling routine takes an explicit seed and
/// reports it back.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED5EED2024ull;

}  // namespace netdyn
