#pragma once

#include <cstdint>
#include <random>

namespace losstail {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent substream `stream` derived from `seed`.
///
/// substream(seed, i) = mix64(mix64(seed) ^ mix64(i + 1)). Every parallel
/// kernel in the library seeds replicate i with substream(seed, i), so results
/// do not depend on the number of threads or on scheduling.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 1));
}

/// 64-bit Mersenne twister with a portable open-interval uniform draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform on the open interval (0, 1); 52 random bits, never rounds to 0 or 1.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  std::uint64_t next() noexcept { return engine_(); }

  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace losstail
