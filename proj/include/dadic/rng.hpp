#pragma once

#include <cstdint>
#include <random>

namespace dadic {

/// Name recorded in run manifests. Changing the generator changes every output.
inline constexpr const char* kGeneratorName = "std::mt19937_64 (seeded by splitmix64 stream derivation)";

/// SplitMix64 output function (Steele, Lea, Flood 2014). A bijection on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed of the independent stream used by realization `index` of a run.
///
/// Computes splitmix64_mix((master ^ index * kGoldenGamma) + kGoldenGamma). For a
/// fixed master seed the map index -> seed is a bijection, so distinct
/// realizations never share a stream. (0, 0) maps to 0xE220A8397B1DCDAF, the
/// first output of a SplitMix64 generator seeded with zero.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t realization_index) noexcept {
  return splitmix64_mix((master_seed ^ (realization_index * kGoldenGamma)) + kGoldenGamma);
}

/// Thin wrapper over std::mt19937_64 with a platform-independent real conversion.
///
/// std::uniform_real_distribution is implementation-defined, so uniforms are
/// built directly from the top 53 bits of each draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability `p`; exact for p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dadic
