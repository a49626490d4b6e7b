#pragma once

#include <cstdint>

namespace overgrad {

/// Independent random streams derived from one user seed.
enum class Stream : std::uint64_t {
  Features = 1,
  Labels = 2,
  SharedComponent = 3,
  Weights = 4,
  Signs = 5,
  Teacher = 6,
  PowerStart = 7,
};

/// Counter-based 64-bit generator.
///
/// The k-th output (k = 1, 2, ...) is `splitmix64_mix(key + k * 0x9E3779B97F4A7C15)`
/// where `key = splitmix64_mix(seed ^ splitmix64_mix(stream))` and
/// `splitmix64_mix(z)` is the SplitMix64 finalizer
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// Derived draws:
///  - uniform in [0,1): `(x >> 11) * 2^-53`
///  - standard normal: Box-Muller on two consecutive outputs,
///    `u1 = ((x1 >> 11) + 1) * 2^-53` (in (0,1]), `u2 = (x2 >> 11) * 2^-53`,
///    yielding `sqrt(-2 ln u1) cos(2 pi u2)` then `sqrt(-2 ln u1) sin(2 pi u2)`
///  - Rademacher: +1 if the top bit of the output is set, else -1.
///
/// Any output can be reproduced from (seed, stream, counter) alone, which is
/// what makes streams matchable from other languages.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, Stream stream = Stream::Features);
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform01();
  double uniform(double lo, double hi);
  double normal();
  double rademacher();

  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace overgrad
