#pragma once

// Counter-based random numbers: every value is a pure function of
// (key, counter), so sub-streams are reproducible on any platform.
//
// Stream keys are derived as key = mix(mix(seed) ^ (tag * golden) ^ mix(index)),
// with one tag per consumer (matrix, signal, noise, Monte Carlo, ...).

#include "gsm/types.hpp"

#include <cstdint>

namespace gsm {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

enum class StreamTag : std::uint64_t {
  Matrix = 1,
  Signal = 2,
  Noise = 3,
  MonteCarlo = 4,
  Kernel = 5,
  Instance = 6,
};

std::uint64_t derive_key(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; both variates of a pair are used.
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gsm
