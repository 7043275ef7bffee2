#pragma once

#include <cstdint>
#include <random>

namespace hallufix {

// Deterministic PRNG used by every stochastic operation in the toolkit.
// std::mt19937_64 is bit-specified by the standard; all conversions to
// floats/integers below are explicit, so streams are reproducible across
// platforms and standard-library implementations. Never use the
// <random> distribution classes here (their algorithms are unspecified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). floor(u * n) is deterministic; the bias for
  // n << 2^53 is negligible for sampling purposes.
  std::size_t index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hallufix
