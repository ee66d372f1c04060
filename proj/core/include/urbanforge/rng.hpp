#pragma once

#include <cstdint>
#include <random>

namespace urbanforge {

// Seeded random stream. Wraps std::mt19937_64 but draws bounded integers with
// rejection sampling instead of std::uniform_int_distribution, whose output
// sequence is implementation-defined. Two builds with the same seed produce
// the same stream on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream for (seed, generation, member) so per-member
  // randomness does not depend on evaluation order.
  static Rng for_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t member) {
    std::seed_seq seq{seed, generation, member};
    Rng rng(0);
    rng.engine_.seed(seq);
    return rng;
  }

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % n;
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return double(engine_() >> 11) * 0x1.0p-53; }

  double in_range(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace urbanforge
