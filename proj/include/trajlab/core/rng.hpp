#pragma once

#include <cstdint>

namespace trajlab {

/// Counter-based splittable pseudo-random generator (splitmix64 core).
///
/// The same seed always reproduces the same stream, independent of platform.
/// split(k) derives a statistically independent child stream; children with
/// distinct tags never collide with the parent stream, which keeps parallel
/// consumers (bootstrap replicates, per-episode rollouts) reproducible
/// regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed + kGolden)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal draw (Box-Muller, two uniforms per call).
  double gaussian();

  /// Independent child stream identified by `tag`.
  Rng split(std::uint64_t tag) const {
    return Rng(mix(state_ ^ mix(tag + 0x632BE59BD9B4E019ULL)));
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace trajlab
