// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>

namespace loadfc {

/// Counter-based 64-bit generator: output i is a fixed bijective mix of
/// (key, i), so a (seed, stream) pair names one reproducible sequence and
/// streams never share state. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream ids used when seeding model parameters.
namespace rng_stream {
inline constexpr std::uint64_t kEncoder = 1;
inline constexpr std::uint64_t kDecoder = 2;
inline constexpr std::uint64_t kOutput = 3;
inline constexpr std::uint64_t kSynthetic = 10;
}  // namespace rng_stream

}  // namespace loadfc
