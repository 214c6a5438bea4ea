#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dtn {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seeded random stream on top of mt19937_64. Value mapping is hand-rolled
/// because the <random> distributions are implementation-defined, which would
/// break byte-reproducibility of traces across standard libraries.
///
/// Substreams are derived from the master seed and an index, not from engine
/// state, so stream i draws the same sequence no matter how many streams
/// exist or how much the others consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1).
  double canonical() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi). Returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + canonical() * (hi - lo); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(bits());  // full 64-bit span
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw;
    do {
      draw = bits();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % range);
  }

  bool bernoulli(double p) { return canonical() < p; }

  /// Index drawn according to `weights` (assumed non-negative, summing to ~1).
  std::size_t weighted(std::span<const double> weights) {
    double u = canonical();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dtn
