#pragma once

#include <cstdint>
#include <limits>

namespace strat2d {

/// Counter-based generator: output i of a stream is mix(key + i * golden),
/// with the SplitMix64 finalizer as the mixing function. A stream is fully
/// determined by (seed, stream id), so per-run streams do not depend on how
/// runs are scheduled. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// Independent child stream; children of distinct ids never share keys
  /// with each other (up to the 64-bit mixing collision probability).
  CounterRng split(std::uint64_t stream_id) const noexcept;

  result_type operator()() noexcept { return next_u64(); }
  result_type next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (consumes two draws per call).
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int) noexcept : key_(key), counter_(counter) {}
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace strat2d
