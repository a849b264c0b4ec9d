#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace clickcast {

// Seeded random stream used by every stochastic routine in the engine.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Uniform and normal variates are derived here rather than through
// <random> distributions, whose algorithms differ between standard libraries,
// so a seed reproduces the same stream on any conforming platform (up to
// libm differences in log/sqrt).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Independent stream keyed by (seed, stream). Does not touch any existing
  // Rng; used to fork side streams without perturbing a session stream.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Standard normal variate (Marsaglia polar method).
  double normal();

  bool operator==(const Rng& other) const = default;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix_seed(std::uint64_t value);

}  // namespace clickcast
