#pragma once

#include <cstdint>
#include <random>

namespace qdot {

/// Seeded, platform-independent random source.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// derives doubles from raw 64-bit draws instead of going through
/// std::uniform_real_distribution (whose algorithm is implementation-defined).
/// Independent streams are derived with SplitMix64 so that the stream for
/// event k depends only on (seed, k).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Stream `index` of the family rooted at `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller on uniform().
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qdot
