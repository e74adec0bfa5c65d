#pragma once

#include <cstddef>
#include <cstdint>

namespace pivotbench {

/// 64-bit seed carried by every stochastic operation.
struct Seed {
  std::uint64_t value = 0;
};

/// Stream domains keep independent consumers of one seed from overlapping.
enum class StreamDomain : std::uint64_t {
  Points = 1,
  Queries = 2,
  Probes = 3,
  Pairs = 4,
  Pivots = 5,
  Candidates = 6,
  Centers = 7,
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/**
 * xoshiro256** generator (Blackman and Vigna 2018).
 *
 * A stream is keyed by (seed, domain, index) and its 256-bit state is filled
 * by iterating SplitMix64 from
 *   key = splitmix64(splitmix64(seed) ^ splitmix64(domain << 56 ^ index)).
 * Point i of a dataset is drawn from stream (seed, Points, i), so any subset
 * of points can be regenerated independently and in any order.
 *
 * Real variates are produced by the member functions below rather than
 * std:: distributions, whose output is implementation-defined.
 */
class Rng {
 public:
  Rng(Seed seed, StreamDomain domain, std::uint64_t index) noexcept;
  explicit Rng(Seed seed) noexcept : Rng(seed, StreamDomain::Points, ~0ULL) {}

  std::uint64_t next() noexcept;

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound), unbiased (rejection on the low threshold).
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal by the Marsaglia polar method; the spare is cached.
  double normal() noexcept;

  /// Fair coin.
  bool bit() noexcept { return (next() >> 63) != 0; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pivotbench
