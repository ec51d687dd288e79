#include "nilwb/series.hpp"
#include "nilwb/split_group.hpp"
#include "nilwb/weights.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nilwb;

namespace {

IntVec iv(std::initializer_list<long> xs) {
  IntVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

SplitGroup heisenberg() { return SplitGroup::build(2, 1, {UniMatrix{{1, 1}, {0, 1}}}); }

SplitGroup template23() {
  return SplitGroup::build(3, 1, {template_matrix(WeightVector::of({Int(2), Int(3)}))});
}

SplitElement random_element(std::mt19937_64& rng, const SplitGroup& g, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  SplitElement x = g.identity();
  for (auto& c : x.v) c = d(rng);
  for (auto& c : x.eps) c = d(rng);
  return x;
}

// Small corpus: r = 1 and r = 2 with commuting actions (powers of one matrix).
std::vector<SplitGroup> fuzz_groups() {
  std::vector<SplitGroup> gs{heisenberg(), template23()};
  const UniMatrix a{{1, 1, 2, -1}, {0, 1, -1, 3}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  gs.push_back(SplitGroup::build(4, 1, {a}));
  gs.push_back(SplitGroup::build(4, 2, {a, a.pow(-2)}));
  gs.push_back(SplitGroup::build(2, 2, {UniMatrix{{1, 1}, {0, 1}}, UniMatrix::identity(2)}));
  return gs;
}

}  // namespace

TEST(SplitGroupTest, HeisenbergCommutatorOfGenerators) {
  const auto g = heisenberg();
  const auto gens = g.generators();
  // [(e2,0),(0,1)] = (Phi(-1) - I) e2 after conjugation: lands on -e1
  EXPECT_EQ(g.commutator(gens[1], gens[2]), (SplitElement{iv({-1, 0}), iv({0})}));
  EXPECT_TRUE(g.commute(gens[0], gens[2]));
  EXPECT_TRUE(g.commute(gens[0], gens[1]));
}

TEST(SplitGroupTest, MultiplicationFormula) {
  const auto g = template23();
  const SplitElement x{iv({1, 2, 3}), iv({1})};
  const SplitElement y{iv({0, 1, 1}), iv({2})};
  // (v,e)(b,f) = (v + A^e b, e + f); A (0,1,1) = (8,4,1)
  EXPECT_EQ(g.mul(x, y), (SplitElement{iv({9, 6, 4}), iv({3})}));
}

TEST(SplitGroupTest, RejectsNonCommutingAction) {
  const UniMatrix a{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  const UniMatrix b{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}};
  try {
    SplitGroup::build(3, 2, {a, b});
    FAIL();
  } catch (const NonCommutingActionError& e) {
    EXPECT_EQ(e.witness().row, 1u);
    EXPECT_EQ(e.witness().col, 3u);
    EXPECT_NE(std::string(e.what()).find("(1,3): 1 vs 0"), std::string::npos);
  }
}

TEST(SplitGroupTest, RejectsDimensionMismatch) {
  EXPECT_THROW(SplitGroup::build(3, 1, {UniMatrix{{1, 1}, {0, 1}}}), DimensionError);
  EXPECT_THROW(SplitGroup::build(2, 2, {UniMatrix{{1, 1}, {0, 1}}}), DimensionError);
}

TEST(AssociativityProbeTest, OrderedProductBreaksAssociativity) {
  const std::vector<UniMatrix> act{UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}},
                                   UniMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}};
  const auto w = associativity_probe(3, 2, act, 100, 1);
  ASSERT_TRUE(w);
  EXPECT_LT(w->sample, 100u);
  EXPECT_NE(w->left, w->right);
  EXPECT_EQ(w->defect.row, 1u);
  EXPECT_EQ(w->defect.col, 3u);
}

TEST(AssociativityProbeTest, DefectAtUnitVectors) {
  const std::vector<UniMatrix> act{UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}},
                                   UniMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}};
  const auto d = ordered_product_defect(act, iv({0, 1}), iv({1, 0}));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->row, 1u);
  EXPECT_EQ(d->col, 3u);
  EXPECT_EQ(d->sum_value, 1);
  EXPECT_EQ(d->product_value, 0);
}

TEST(AssociativityProbeTest, CommutingActionPasses) {
  const UniMatrix a = template_matrix(WeightVector::of({Int(2), Int(3)}));
  EXPECT_FALSE(associativity_probe(3, 1, {a}, 500, 3));
  EXPECT_FALSE(associativity_probe(3, 2, {a, a.pow(2)}, 500, 3));
}

TEST(SplitGroupTest, RootOfHeisenbergSquare) {
  const auto g = heisenberg();
  const SplitElement x{iv({3, -2}), iv({1})};
  const auto sq = g.pow(x, 2);
  EXPECT_EQ(g.root(sq, 2), x);
  // (1,0) generates gamma_2 and has no square root
  EXPECT_FALSE(g.root(SplitElement{iv({1, 0}), iv({0})}, 2));
  EXPECT_FALSE(g.root(SplitElement{iv({0, 0}), iv({1})}, 3));
}

TEST(SplitGroupTest, NegativeRoot) {
  const auto g = template23();
  const SplitElement x{iv({1, -4, 2}), iv({-1})};
  EXPECT_EQ(g.root(g.pow(x, -3), -3), x);
}

TEST(SplitGroupTest, LogOfFiberIsIdentity) {
  const auto g = template23();
  const RatVec l = g.log(SplitElement{iv({1, 2, 3}), iv({0})});
  EXPECT_EQ(l, (RatVec{Rat(1), Rat(2), Rat(3), Rat(0)}));
}

TEST(SplitGroupTest, BracketMatchesGroupCommutatorInClassTwo) {
  // in class 2, log[x,y] = [log x, log y]
  const auto g = heisenberg();
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto x = random_element(rng, g, 4);
    const auto y = random_element(rng, g, 4);
    ASSERT_EQ(g.log(g.commutator(x, y)), g.bracket(g.log(x), g.log(y)));
  }
}

TEST(SplitGroupTest, MatrixEmbeddingRoundTrip) {
  for (const auto& g : fuzz_groups()) {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 200; ++n) {
      const auto x = random_element(rng, g, 5);
      const auto y = random_element(rng, g, 5);
      ASSERT_EQ(g.from_matrix(g.to_matrix(x)), x);
      ASSERT_EQ(g.to_matrix(g.mul(x, y)), g.to_matrix(x) * g.to_matrix(y));
    }
  }
}

TEST(SplitGroupTest, KernelOfPhi) {
  const auto g = SplitGroup::build(2, 2, {UniMatrix{{1, 2}, {0, 1}}, UniMatrix{{1, 3}, {0, 1}}});
  EXPECT_EQ(g.kernel_of_phi(), hnf({iv({3, -2})}, 2));
  EXPECT_EQ(g.embedding_dim(), 7u);
  EXPECT_TRUE(heisenberg().kernel_of_phi().is_zero());
}

TEST(SplitProperties, GroupAxiomsFuzz) {
  std::mt19937_64 rng(11);
  for (const auto& g : fuzz_groups()) {
    for (int n = 0; n < 2000; ++n) {
      const auto x = random_element(rng, g, 3);
      const auto y = random_element(rng, g, 3);
      const auto z = random_element(rng, g, 3);
      ASSERT_EQ(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
      ASSERT_EQ(g.mul(x, g.identity()), x);
      ASSERT_EQ(g.mul(g.identity(), x), x);
      ASSERT_TRUE(g.mul(x, g.inv(x)).is_identity());
    }
  }
}

TEST(SplitProperties, CommutatorClosedFormFuzz) {
  std::mt19937_64 rng(13);
  for (const auto& g : fuzz_groups())
    for (int n = 0; n < 2000; ++n) {
      const auto x = random_element(rng, g, 4);
      const auto y = random_element(rng, g, 4);
      const auto c = g.commutator(x, y);
      ASSERT_EQ(c, g.commutator_literal(x, y));
      ASSERT_TRUE(c.in_fiber());
    }
}

TEST(SplitProperties, RootUniquenessFuzz) {
  std::mt19937_64 rng(17);
  for (const auto& g : fuzz_groups())
    for (int n = 0; n < 200; ++n) {
      const auto x = random_element(rng, g, 6);
      for (long k : {2L, 3L, 5L}) ASSERT_EQ(g.root(g.pow(x, k), k), x);
    }
}

TEST(SplitProperties, FiberConjugationFuzz) {
  std::mt19937_64 rng(19);
  for (const auto& g : fuzz_groups())
    for (int n = 0; n < 500; ++n) {
      const auto y = random_element(rng, g, 4);
      const auto x = g.fiber_element(random_element(rng, g, 4).v);
      ASSERT_EQ(g.conj(x, y), g.fiber_element(g.phi(-y.eps) * x.v));
    }
}

TEST(SplitProperties, PhiIsHomomorphism) {
  std::mt19937_64 rng(23);
  for (const auto& g : fuzz_groups())
    for (int n = 0; n < 300; ++n) {
      const auto e = random_element(rng, g, 4).eps;
      const auto f = random_element(rng, g, 4).eps;
      ASSERT_EQ(g.phi(e + f), g.phi(e) * g.phi(f));
    }
}
