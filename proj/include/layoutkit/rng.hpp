#pragma once

#include <cstdint>
#include <span>

namespace layoutkit {

// Deterministic pseudo-random stream. The output sequence is fixed by this
// implementation (splitmix64), not by the standard library, so seeded
// artifacts are byte-identical across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  // Uniform integer in [0, n). n must be positive.
  int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  // Uniform integer in [lo, hi], inclusive.
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform01() < p; }

  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(below(static_cast<int>(items.size())))];
  }

  // Independent substream, e.g. one per template of a corpus.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    mix.next_u64();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace layoutkit
