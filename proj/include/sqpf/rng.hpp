#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sqpf {

/// Seeded 64-bit Mersenne Twister. Draws are built from raw engine output so a
/// given seed yields the same stream on every platform (std distributions do not
/// guarantee that).
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Number of successes in `trials` Bernoulli(p) draws.
  std::uint64_t binomial(std::uint64_t trials, double p) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) hits += uniform() < p ? 1 : 0;
    return hits;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sqpf
