#include "nilwb/weights.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nilwb;

namespace {

std::vector<Int> ints(std::initializer_list<long> xs) {
  std::vector<Int> v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

WeightVector random_weights(std::mt19937_64& rng, std::size_t c) {
  std::uniform_int_distribution<long> d(-9, 8);
  std::vector<Int> w;
  for (std::size_t i = 0; i + 3 < c; ++i) {
    long x = d(rng);
    w.emplace_back(x >= 0 ? x + 1 : x);  // skip zero
  }
  return WeightVector(c, w);
}

}  // namespace

TEST(WeightVectorTest, RejectsZeroWeight) {
  try {
    WeightVector(5, ints({2, 0}));
    FAIL() << "zero weight accepted";
  } catch (const WeightError& e) {
    EXPECT_EQ(e.kind(), WeightError::Kind::zero_weight);
    EXPECT_EQ(e.p(), 4u);
    EXPECT_EQ(e.q(), 5u);
  }
}

TEST(WeightVectorTest, RejectsSmallClassAndBadLength) {
  EXPECT_THROW(WeightVector(3, {}), WeightError);
  EXPECT_THROW(WeightVector(5, ints({1})), WeightError);
  EXPECT_EQ(WeightVector::of(ints({2, 3})).c(), 5u);
}

TEST(PascalTableTest, TwoThree) {
  const WeightTable t = pascal_table(WeightVector(5, ints({2, 3})));
  EXPECT_EQ(t.at(3, 4), 2);
  EXPECT_EQ(t.at(4, 5), 3);
  EXPECT_EQ(t.at(3, 5), 6);
  EXPECT_FALSE(t.pascal_violation());
}

TEST(PascalTableTest, NegativeWeights) {
  const WeightTable t = pascal_table(WeightVector(6, ints({-1, 2, -5})));
  EXPECT_EQ(t.at(3, 6), 10);
  EXPECT_EQ(t.at(4, 6), -10);
}

TEST(TemplateMatrixTest, TwoThree) {
  EXPECT_EQ(template_matrix(WeightVector(5, ints({2, 3}))), (UniMatrix{{1, 2, 6}, {0, 1, 3}, {0, 0, 1}}));
}

TEST(TemplateMatrixTest, ClassFourIsShear) {
  EXPECT_EQ(template_matrix(WeightVector(4, ints({7}))), (UniMatrix{{1, 7}, {0, 1}}));
}

TEST(ExtractWeightsTest, DegenerateWitness) {
  try {
    extract_weights(UniMatrix{{1, 0, 0}, {0, 1, 3}, {0, 0, 1}});
    FAIL();
  } catch (const WeightError& e) {
    EXPECT_EQ(e.kind(), WeightError::Kind::degenerate);
    EXPECT_EQ(e.p(), 1u);
    EXPECT_EQ(e.q(), 2u);
  }
}

TEST(ExtractWeightsTest, NotTemplatedWitness) {
  try {
    extract_weights(UniMatrix{{1, 2, 5}, {0, 1, 3}, {0, 0, 1}});
    FAIL();
  } catch (const WeightError& e) {
    EXPECT_EQ(e.kind(), WeightError::Kind::not_templated);
    EXPECT_EQ(e.p(), 1u);
    EXPECT_EQ(e.q(), 3u);
    EXPECT_NE(std::string(e.what()).find("expected 6"), std::string::npos);
  }
}

TEST(ActionWellDefinedTest, ProportionalTemplatesCommute) {
  const auto a = template_matrix(WeightVector(5, ints({2, 3})));
  const auto b = template_matrix(WeightVector(5, ints({4, 6})));
  EXPECT_FALSE(action_well_defined({a, b}));
}

TEST(ActionWellDefinedTest, ShearPairWitness) {
  const UniMatrix a{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  const UniMatrix b{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}};
  const auto w = action_well_defined({a, b});
  ASSERT_TRUE(w);
  EXPECT_EQ(w->row, 1u);
  EXPECT_EQ(w->col, 3u);
  EXPECT_EQ(w->lhs, 1);
  EXPECT_EQ(w->rhs, 0);
  EXPECT_EQ(w->str(), "A1A2 and A2A1 differ at entry (1,3): 1 vs 0");
}

TEST(ActionWellDefinedTest, SingleMatrixIsFine) {
  EXPECT_FALSE(action_well_defined({UniMatrix{{1, 5}, {0, 1}}}));
  EXPECT_FALSE(action_well_defined({}));
}

TEST(WeightProperties, PascalAndRoundTripFuzz) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> cd(4, 9);
  for (int n = 0; n < 1000; ++n) {
    const WeightVector w = random_weights(rng, cd(rng));
    const WeightTable t = pascal_table(w);
    for (std::size_t i = 3; i <= w.c(); ++i)
      for (std::size_t j = i + 1; j <= w.c(); ++j)
        for (std::size_t k = j + 1; k <= w.c(); ++k) ASSERT_EQ(t.at(i, j) * t.at(j, k), t.at(i, k));
    ASSERT_EQ(extract_weights(template_matrix(w)), w);
  }
}

TEST(WeightProperties, CommuteIffCrossProportional) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> cd(4, 7);
  std::uniform_int_distribution<long> scale(-3, 3);
  int commuting = 0, noncommuting = 0;
  for (int n = 0; n < 600; ++n) {
    const std::size_t c = cd(rng);
    const WeightVector a = random_weights(rng, c);
    WeightVector b = random_weights(rng, c);
    if (n % 3 == 0) {
      // force proportionality for a share of the corpus
      long s = scale(rng);
      if (s == 0) s = 2;
      std::vector<Int> w = a.weights();
      for (auto& x : w) x *= s;
      b = WeightVector(c, w);
    }
    const bool commute = !action_well_defined({template_matrix(a), template_matrix(b)});
    ASSERT_EQ(commute, cross_proportional(a, b)) << n;
    (commute ? commuting : noncommuting)++;
  }
  EXPECT_GT(commuting, 100);
  EXPECT_GT(noncommuting, 100);
}
