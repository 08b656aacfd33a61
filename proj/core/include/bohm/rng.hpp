#pragma once

#include <cstdint>

namespace bohm {

/// Counter-based generator: the n-th draw of stream s under key k is a pure
/// function of (k, s, n), so any partition of streams across threads yields
/// the same numbers. The mixing function is the SplitMix64 finalizer applied
/// to a Weyl-sequence combination of the three words.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t stream) noexcept
      : key_(mix(key ^ 0x243f6a8885a308d3ULL)), stream_(mix(stream + key_)) {}

  std::uint64_t next_u64() noexcept {
    const std::uint64_t c = counter_++;
    return mix(key_ ^ mix(stream_ + c * 0x9e3779b97f4a7c15ULL));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace bohm
