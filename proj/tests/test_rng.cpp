#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dadic/rng.hpp"

using namespace dadic;

namespace {

// Reference SplitMix64 generator, written independently of splitmix64_mix.
std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TEST(Rng, ZeroZeroIsFirstSplitMixOutput) {
  std::uint64_t state = 0;
  const std::uint64_t expected = splitmix64_next(state);
  EXPECT_EQ(derive_stream_seed(0, 0), expected);
  EXPECT_EQ(derive_stream_seed(0, 0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, MatchesSequentialSplitMixForMasterZero) {
  // With master 0, index k mixes (k+1) * gamma, the (k+1)-th SplitMix state.
  std::uint64_t state = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) EXPECT_EQ(derive_stream_seed(0, k), splitmix64_next(state));
}

TEST(Rng, Deterministic) {
  for (std::uint64_t s : {0ULL, 1ULL, 42ULL, ~0ULL}) EXPECT_EQ(derive_stream_seed(s, 17), derive_stream_seed(s, 17));
}

TEST(Rng, NoCollisionsOverMillionIndices) {
  for (std::uint64_t master : {0ULL, 7ULL, 0xDEADBEEFULL}) {
    std::vector<std::uint64_t> seeds(1'000'000);
    for (std::uint64_t k = 0; k < seeds.size(); ++k) seeds[k] = derive_stream_seed(master, k);
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end()) << "master " << master;
  }
}

TEST(Rng, AdjacentIndicesDiffer) {
  for (std::uint64_t s = 0; s < 1000; ++s) EXPECT_NE(derive_stream_seed(s, 0), derive_stream_seed(s, 1));
}

TEST(Rng, UniformRangeAndBernoulliEdges) {
  Rng rng(123);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_FALSE(rng.bernoulli(0.0));
    ASSERT_TRUE(rng.bernoulli(1.0));
  }
}

TEST(Rng, ReplaysFromSeed) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}
