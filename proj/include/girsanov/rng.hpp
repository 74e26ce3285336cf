#pragma once

#include <cmath>
#include <cstdint>

namespace girsanov {

/// Counter-based random stream. The stream for a given (master_seed,
/// sample_index) pair is a pure function of those two values, so sample i
/// draws the same numbers no matter which thread runs it or in what order
/// samples execute. Each draw hashes (key, counter) through a 64-bit
/// avalanche mix; there is no shared mutable state between samples.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t sample_index)
      : key_(mix64(mix64(master_seed) + sample_index)), counter_(0) {}

  std::uint64_t next_u64() {
    return mix64(key_ ^ (kGamma * ++counter_));
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe as a log argument.
  double uniform_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential holding time with the given rate (> 0). Always > 0.
  double exponential(double rate) {
    return -std::log(uniform_open01()) / rate;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  // SplitMix64 finalizer (Stafford mix 13).
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace girsanov
