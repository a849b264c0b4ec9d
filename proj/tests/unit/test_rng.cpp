#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "clickcast/rng.hpp"

namespace clickcast {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
  EXPECT_EQ(a, b);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformIndexCoversRangeEvenly) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) {
    // sd of a bin count is sqrt(n p (1-p)) ~ 92
    EXPECT_NEAR(c, n / 7.0, 5 * 92.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Rng, DeriveIsIndependentOfParentAndReproducible) {
  Rng parent(9);
  const Rng snapshot = parent;
  Rng a = Rng::derive(9, 1);
  Rng b = Rng::derive(9, 1);
  Rng c = Rng::derive(9, 2);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng::derive(9, 1).next_u64(), c.next_u64());
  EXPECT_EQ(parent, snapshot);
}

TEST(Rng, MixSeedSpreadsNeighbours) {
  EXPECT_NE(mix_seed(0), mix_seed(1));
  EXPECT_NE(mix_seed(1), mix_seed(2));
  EXPECT_EQ(mix_seed(12345), mix_seed(12345));
}

}  // namespace
}  // namespace clickcast
