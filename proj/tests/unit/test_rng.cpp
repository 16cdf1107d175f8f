#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ldbm/rng.hpp"

using ldbm::Philox4x32;
using ldbm::StreamKey;

// Known-answer vectors distributed with the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, SameKeySameStream) {
  Philox4x32 a(StreamKey{7, 3, 11});
  Philox4x32 b(StreamKey{7, 3, 11});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, DistinctKeysDiffer) {
  const StreamKey keys[] = {{7, 3, 11}, {8, 3, 11}, {7, 4, 11}, {7, 3, 12}};
  std::set<std::uint32_t> first;
  for (const auto& k : keys) {
    Philox4x32 g(k);
    first.insert(g());
  }
  EXPECT_EQ(first.size(), 4u);
}

TEST(Philox, UniformBuckets) {
  Philox4x32 g(StreamKey{1, 2, 3});
  constexpr int kBuckets = 16;
  constexpr int kDraws = 160000;
  int counts[kBuckets] = {};
  for (int i = 0; i < kDraws; ++i) ++counts[g() >> 28];
  double chi2 = 0.0;
  const double expected = static_cast<double>(kDraws) / kBuckets;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 15 degrees of freedom; the 0.999 quantile is 37.7.
  EXPECT_LT(chi2, 37.7);
}

TEST(StreamLabels, FamiliesDoNotOverlap) {
  EXPECT_NE(ldbm::streams::field_layer(0xFFFF), ldbm::streams::path(0));
  EXPECT_NE(ldbm::streams::path(0xFFFF), ldbm::streams::potential(0));
  EXPECT_NE(ldbm::streams::potential(0xFFFF), ldbm::streams::resolvent(0));
}
