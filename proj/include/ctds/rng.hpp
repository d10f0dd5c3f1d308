#pragma once

#include <cstdint>
#include <string_view>

namespace ctds {

/// SplitMix64 (Steele, Lea & Flood 2014). 64 bits of state, one addition and
/// a finalizing mix per draw. All sampling helpers below are defined here in
/// terms of raw 64-bit draws so that archives are reproducible bit-for-bit on
/// any platform; no std:: distribution is used anywhere in the library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Substream for the index-th child of `seed`: seeded with seed ^ index.
  static Rng substream(std::uint64_t seed, std::uint64_t index) { return Rng(seed ^ index); }

  std::uint64_t next();

  /// Uniform on {0, ..., bound - 1}; bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in the open interval (lo, hi).
  double uniform_open(double lo, double hi);

  /// Standard normal via the Box-Muller transform (no cached second value).
  double normal();

  bool coin() { return (next() >> 63) != 0; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// The SplitMix64 output finalizer applied to a single word.
std::uint64_t mix64(std::uint64_t x);

}  // namespace ctds
