#pragma once

#include <cstdint>
#include <random>

namespace alq {

/// Seeded 64-bit random stream. Stream `index` under master `seed` is fully
/// determined by the pair, so parallel workers reproduce serial results.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive well-mixed stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace alq
