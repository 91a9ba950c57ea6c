#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace smoothnet {

// Deterministic xoshiro256++ generator, seeded through splitmix64 so that
// any 64-bit seed (including 0) yields a well-mixed state.  Child streams
// derived from the same seed and salt are stable regardless of how many
// draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer on [0, n); n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller; draws are cached pairwise.
  double gaussian();
  // n i.i.d. draws from N(mean, std^2); std must be >= 0.
  std::vector<double> gaussian_samples(std::size_t n, double mean = 0.0, double std = 1.0);

  // Independent stream keyed by (seed, salt).
  Rng child(std::uint64_t salt) const;

  std::uint64_t seed() const { return seed_; }

  // The seed a child(salt) stream would be constructed with.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace smoothnet
