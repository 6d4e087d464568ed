#pragma once

#include <cstdint>
#include <random>

namespace avf {

/// SplitMix64 finalizer; used only to derive seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic pseudorandom stream backed by a 64-bit Mersenne Twister.
///
/// Streams for parallel work are derived with `RandomSource::stream(seed, i)`,
/// which seeds the generator from splitmix64 of (seed, i). Every realization
/// of an ensemble uses the stream of its own index, so results never depend
/// on how realizations are distributed over workers.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed);
  static RandomSource stream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, n), multiply-shift reduction (bias below n/2^64).
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace avf
