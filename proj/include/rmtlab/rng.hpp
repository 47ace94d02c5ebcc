#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rmt {

/// SplitMix64 finalizer. Used both as the seed mixer and as the round
/// function of the counter-based generator below.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-sample seed derivation: seed_i = mix(base_seed, i).
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Stateless generator keyed by a seed; every draw is a pure function of
/// (seed, stream, a, b, lane), so entries can be produced in any order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64(seed ^ splitmix64(stream + 1))) {}

  constexpr std::uint64_t bits(std::uint64_t a, std::uint64_t b, std::uint64_t lane = 0) const noexcept {
    std::uint64_t h = splitmix64(key_ ^ a);
    h = splitmix64(h ^ (b * 0xD6E8FEB86659FD93ULL));
    return splitmix64(h ^ (lane * 0xA0761D6478BD642FULL + 0x8EBC6AF09C88C6E3ULL));
  }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t a, std::uint64_t b, std::uint64_t lane = 0) const noexcept {
    return (static_cast<double>(bits(a, b, lane) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on lanes (2*lane, 2*lane+1).
  double normal(std::uint64_t a, std::uint64_t b, std::uint64_t lane = 0) const noexcept {
    const double u1 = uniform(a, b, 2 * lane);
    const double u2 = uniform(a, b, 2 * lane + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace rmt
