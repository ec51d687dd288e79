#include "nilwb/centralizer.hpp"

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
SplitGroup z_times_heisenberg() {
  return SplitGroup::build(3, 1, {UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}});
}

// Membership through the description: divide off generator powers until the
// eps-part vanishes, then test the fiber lattice.
bool member(const SplitGroup& g, const CentralizerDescription& c, const SplitElement& x) {
  const auto coords = c.eps.coordinates(x.eps);
  if (!coords) return false;
  const auto gens = c.generators();
  SplitElement p = g.identity();
  for (std::size_t i = 0; i < coords->size(); ++i)
    p = g.mul(p, g.pow(gens[c.fiber.rank() + i], (*coords)[i]));
  const SplitElement rest = g.mul(g.inv(p), x);
  return rest.in_fiber() && c.fiber.contains(rest.v);
}

}  // namespace

TEST(CentralizerTest, HeisenbergBaseGenerator) {
  const auto g = heisenberg();
  const auto c = centralizer(g, g.base_element(iv({1})));
  EXPECT_EQ(c.method, "exact");
  EXPECT_EQ(c.rank(), 2u);
  EXPECT_EQ(c.fiber, hnf({iv({1, 0})}, 2));
  EXPECT_EQ(c.eps, hnf({iv({1})}, 1));
  EXPECT_EQ(c.lie_rank, 2u);
}

TEST(CentralizerTest, HeisenbergCenterIsEverything) {
  const auto g = heisenberg();
  const auto c = centralizer(g, g.fiber_element(iv({1, 0})));
  EXPECT_TRUE(c.fiber.is_full());
  EXPECT_TRUE(c.eps.is_full());
}

TEST(CentralizerTest, TemplateWitnessHasRankThree) {
  // C((0,1,0),0) is the whole fiber Z^3 while rk Z_1 + 1 = 2
  const auto g = template23();
  const auto c = centralizer(g, g.fiber_element(iv({0, 1, 0})));
  EXPECT_EQ(c.method, "exact");
  EXPECT_EQ(c.rank(), 3u);
  EXPECT_TRUE(c.fiber.is_full());
  EXPECT_TRUE(c.eps.is_zero());
}

TEST(CentralizerTest, GeneratorsCommuteWithTarget) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> d(-3, 3);
  for (const auto& g : {heisenberg(), template23(), z_times_heisenberg()})
    for (int n = 0; n < 40; ++n) {
      SplitElement y = g.identity();
      for (auto& x : y.v) x = d(rng);
      for (auto& x : y.eps) x = d(rng);
      const auto c = centralizer(g, y);
      for (const auto& gen : c.generators()) ASSERT_TRUE(g.commute(gen, y));
    }
}

TEST(CentralizerProperties, ExactAgreesWithBoxEnumeration) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> d(-2, 2);
  for (const auto& g : {heisenberg(), template23(), z_times_heisenberg()}) {
    const auto box = candidate_elements(g, 2);
    for (int n = 0; n < 15; ++n) {
      SplitElement y = g.identity();
      for (auto& x : y.v) x = d(rng);
      for (auto& x : y.eps) x = d(rng);
      const auto c = centralizer(g, y);
      ASSERT_EQ(c.method, "exact");
      for (const auto& x : box) ASSERT_EQ(member(g, c, x), g.commute(x, y)) << y.str() << " " << x.str();
    }
  }
}

TEST(CyclicSplitTest, HeisenbergBase) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  const auto h = g.base_element(iv({1}));
  const auto c = centralizer(g, h);
  const auto cs = cyclic_split(g, c.generators(), c.rank(), s.ucs.front(), h);
  ASSERT_TRUE(cs.ok) << cs.reason;
  ASSERT_TRUE(cs.u);
  EXPECT_EQ(cs.exponent(g, h), Int(1));
  EXPECT_TRUE(s.ucs.front().contains(g.mul(g.pow(*cs.u, -1), h)));
}

TEST(CyclicSplitTest, RankMismatchIsReported) {
  const auto g = template23();
  const auto s = compute_series(g);
  const auto h = g.fiber_element(iv({0, 1, 0}));
  const auto c = centralizer(g, h);
  const auto cs = cyclic_split(g, c.generators(), c.rank() + 1, s.ucs.front(), h);
  EXPECT_FALSE(cs.ok);
  EXPECT_NE(cs.reason.find("differs from rank(Z)+1"), std::string::npos);
}

TEST(FlTest, HeisenbergBoxFive) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  const auto r = fl_check(g, s, 5, 5);
  EXPECT_TRUE(r.fl);
  EXPECT_TRUE(r.all_exact);
  EXPECT_EQ(r.center_rank, 1u);
  EXPECT_GT(r.checked, 1000u);
}

TEST(FlTest, TemplateFailsWithWitness) {
  const auto g = template23();
  const auto s = compute_series(g);
  const auto r = fl_check(g, s, 1, 5);
  EXPECT_FALSE(r.fl);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->element, g.fiber_element(iv({0, 1, 0})));
  EXPECT_FALSE(r.witness->central);
  EXPECT_EQ(r.witness->centralizer.rank(), 3u);
}

TEST(FlTest, AbelianFails) {
  const auto g = SplitGroup::build(2, 1, {UniMatrix::identity(2)});
  const auto s = compute_series(g);
  const auto r = fl_check(g, s, 1, 5);
  EXPECT_FALSE(r.fl);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.witness->central);
}

TEST(CoCentralTest, HeisenbergBoxConsistent) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  std::vector<FlEntry> entries;
  const auto fl = fl_check(g, s, 3, 5, &entries);
  ASSERT_TRUE(fl.fl);
  const auto rep = co_centralization_box(g, s, entries);
  EXPECT_TRUE(rep.consistent);
  EXPECT_TRUE(rep.commuting_implies_equal);
  EXPECT_EQ(rep.pairs, entries.size() * entries.size());
  EXPECT_GT(rep.related_pairs, entries.size());
}

TEST(CoCentralTest, SinglePairAgreesWithBox) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  const SplitElement a{iv({0, 1}), iv({0})};
  const SplitElement b{iv({3, 2}), iv({0})};
  const auto r = co_centralization_check(g, s, a, b);
  EXPECT_TRUE(r.related);
  EXPECT_TRUE(r.centralizers_equal);
  EXPECT_THROW(co_centralization_check(g, s, g.fiber_element(iv({1, 0})), b), PreconditionError);
}

TEST(MalnormalTest, HeisenbergFailsModuloCenter) {
  // conjugating u by g0 multiplies it by a central element, so the
  // intersection is nontrivial even modulo Z_1
  const auto g = heisenberg();
  const auto s = compute_series(g);
  const auto h = g.base_element(iv({1}));
  const auto r = malnormality_check(g, s, h, 2);
  EXPECT_EQ(r.status, "fails");
  EXPECT_FALSE(r.holds_literal);
  ASSERT_TRUE(r.witness_conjugate);
  EXPECT_TRUE(g.commute(*r.witness_conjugate, h));
  EXPECT_FALSE(is_central(s, *r.witness_conjugate));
  EXPECT_FALSE(g.commute(*r.witness_g0, h));
  EXPECT_EQ(g.conj(*r.witness_t, *r.witness_g0), *r.witness_conjugate);
}

TEST(GrunTest, TemplateWitness) {
  const auto g = template23();
  const auto s = compute_series(g);
  const auto r = grun_check(g, s, 1);
  EXPECT_TRUE(r.applicable);
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(r.centralizer_fiber.is_full());
  EXPECT_TRUE(r.centralizer_eps.is_zero());
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(*r.witness, g.fiber_element(iv({1, 0, 0})));
}

TEST(GrunTest, ClassTwoNotApplicable) {
  const auto g = heisenberg();
  EXPECT_FALSE(grun_check(g, compute_series(g), 2).applicable);
}

TEST(LogTest, CentralInputFlagged) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  EXPECT_EQ(logarithm_check(g, s, g.fiber_element(iv({1, 0})), 2).status, "hypothesis_violated");
  EXPECT_THROW(logarithm_check(g, s, g.base_element(iv({1})), 2), PreconditionError);
}

TEST(LogTest, TemplateWitnessIsGenuine) {
  const auto g = template23();
  const auto s = compute_series(g);
  const auto a = g.fiber_element(iv({0, 3, 0}));
  const auto r = logarithm_check(g, s, a, 1);
  EXPECT_EQ(r.status, "fails");
  ASSERT_TRUE(r.witness);
  const auto& [x, y] = *r.witness;
  EXPECT_EQ(g.conj(a, x), g.conj(a, y));
  EXPECT_FALSE(is_derived(s, g.mul(x, g.inv(y))));
}

TEST(WeightedRootsTest, ClassThreeNotApplicable) {
  const auto g = template23();
  const auto ch = verify_weighted_roots(g, compute_series(g), g.base_element(iv({1})));
  EXPECT_EQ(ch.status, "not_applicable");
}

TEST(WeightedRootsTest, ChainInvariants) {
  const auto g = SplitGroup::build(4, 1, {template_matrix(WeightVector::of({Int(2), Int(3), Int(5)}))});
  const auto s = compute_series(g);
  ASSERT_EQ(s.nilpotency_class, 4u);
  const auto h = g.base_element(iv({1}));
  const auto ch = verify_weighted_roots(g, s, h);
  ASSERT_NE(ch.status, "chain_breakdown") << ch.breakdown_reason;
  for (const auto& p : ch.pairs) {
    ASSERT_TRUE(p.k);
    ASSERT_TRUE(p.z);
    const auto& ui = *ch.levels[p.i - 3].split.u;
    const auto& uj = *ch.levels[p.j - 3].split.u;
    EXPECT_EQ(g.mul(g.pow(ui, *p.k), *p.z), uj);
  }
  EXPECT_EQ(ch.consecutive_weights.size(), s.nilpotency_class - 3);
}

TEST(WeightedRootsTest, RankTwoBreaksDown) {
  // base elements commute, so the image of C(h) in Z^2 is never cyclic
  const auto g = SplitGroup::build(4, 2,
                                   {template_matrix(WeightVector::of({Int(2), Int(3), Int(5)})),
                                    template_matrix(WeightVector::of({Int(4), Int(6), Int(10)}))});
  const auto s = compute_series(g);
  const auto ch = verify_weighted_roots(g, s, g.base_element(iv({1, 1})));
  EXPECT_EQ(ch.status, "chain_breakdown");
  EXPECT_EQ(ch.breakdown_level, 4u);
}

TEST(MatrixAnalysesTest, Ut3) {
  const auto g = MatrixGroup::unitriangular(3);
  const Ball b(g, 3);
  const auto cc = matrix_co_centralization(g, b);
  EXPECT_TRUE(cc.consistent);
  const auto mal = matrix_malnormality(g, b, g.generators()[0]);
  EXPECT_FALSE(mal.holds_mod_center);
  const auto gr = matrix_grun_check(g, b);
  EXPECT_FALSE(gr.applicable);
}

TEST(MatrixAnalysesTest, Ut4Grun) {
  const auto g = MatrixGroup::unitriangular(4);
  const auto r = matrix_grun_check(g, Ball(g, 2));
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(r.derived_dim, 3u);
  EXPECT_EQ(r.centralizer_dim, 4u);
  EXPECT_FALSE(r.lie_holds);
}
