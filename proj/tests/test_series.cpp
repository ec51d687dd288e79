#include "nilwb/series.hpp"
#include "nilwb/weights.hpp"

#include <gtest/gtest.h>

using namespace nilwb;

namespace {

IntVec iv(std::initializer_list<long> xs) {
  IntVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

IntLattice lat(std::vector<IntVec> rows, std::size_t d) { return hnf(std::move(rows), d); }

SplitGroup heisenberg() { return SplitGroup::build(2, 1, {UniMatrix{{1, 1}, {0, 1}}}); }
SplitGroup template23() {
  return SplitGroup::build(3, 1, {template_matrix(WeightVector::of({Int(2), Int(3)}))});
}
SplitGroup z_times_heisenberg() {
  return SplitGroup::build(3, 1, {UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}});
}
SplitGroup abelian() { return SplitGroup::build(2, 1, {UniMatrix::identity(2)}); }
SplitGroup two_shears() {
  const UniMatrix a{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
  const UniMatrix c{{1, 0, 1}, {0, 1, 0}, {0, 0, 1}};
  return SplitGroup::build(3, 2, {a, c});
}

std::vector<SplitGroup> fixtures() {
  std::vector<SplitGroup> gs{heisenberg(), template23(), z_times_heisenberg(), abelian(), two_shears()};
  gs.push_back(SplitGroup::build(3, 2,
                                 {template_matrix(WeightVector::of({Int(2), Int(3)})),
                                  template_matrix(WeightVector::of({Int(4), Int(6)}))}));
  gs.push_back(SplitGroup::build(4, 1, {template_matrix(WeightVector::of({Int(2), Int(3), Int(5)}))}));
  const UniMatrix a{{1, 1, 2, -1}, {0, 1, -1, 3}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  gs.push_back(SplitGroup::build(4, 2, {a, a.pow(3)}));
  return gs;
}

}  // namespace

TEST(LcsTest, Heisenberg) {
  const auto s = compute_series(heisenberg());
  EXPECT_EQ(s.nilpotency_class, 2u);
  EXPECT_EQ(s.gamma(2), lat({iv({1, 0})}, 2));
  EXPECT_TRUE(s.gamma(3).is_zero());
}

TEST(LcsTest, TemplateTwoThree) {
  // frozen oracle values
  const auto s = compute_series(template23());
  EXPECT_EQ(s.nilpotency_class, 3u);
  EXPECT_EQ(s.gamma(2), lat({iv({2, 0, 0}), iv({0, 3, 0})}, 3));
  EXPECT_EQ(s.gamma(3), lat({iv({6, 0, 0})}, 3));
  EXPECT_TRUE(s.gamma(4).is_zero());
}

TEST(UcsTest, TemplateTwoThree) {
  const auto s = compute_series(template23());
  ASSERT_EQ(s.ucs.size(), 3u);
  EXPECT_EQ(s.ucs[0].fiber, lat({iv({1, 0, 0})}, 3));
  EXPECT_TRUE(s.ucs[0].eps.is_zero());
  EXPECT_EQ(s.ucs[1].fiber, lat({iv({1, 0, 0}), iv({0, 1, 0})}, 3));
  EXPECT_TRUE(s.ucs[1].eps.is_zero());
  EXPECT_TRUE(s.ucs[2].fiber.is_full());
  EXPECT_TRUE(s.ucs[2].eps.is_full());
  for (const auto& z : s.ucs) EXPECT_EQ(z.eps_status, "exact");
}

TEST(UcsTest, AbelianIsItsCenter) {
  const auto s = compute_series(abelian());
  EXPECT_EQ(s.nilpotency_class, 1u);
  ASSERT_EQ(s.ucs.size(), 1u);
  EXPECT_TRUE(s.ucs[0].fiber.is_full());
  EXPECT_TRUE(s.ucs[0].eps.is_full());
}

TEST(UcsTest, EpsPartFromKernelOfAction) {
  // A_1 A_2^{-1} = I, so (0,(1,1)) is central
  const UniMatrix a{{1, 1}, {0, 1}};
  const auto s = compute_series(SplitGroup::build(2, 2, {a, a}));
  EXPECT_EQ(s.ucs[0].eps, lat({iv({1, -1})}, 2));
  EXPECT_EQ(s.ucs[0].fiber, lat({iv({1, 0})}, 2));
}

TEST(CoincidingTest, HeisenbergCoincides) {
  const auto r = coinciding_check(heisenberg());
  EXPECT_TRUE(r.coincide);
  EXPECT_TRUE(r.gamma_c_in_center);
  EXPECT_TRUE(r.factors_torsion_free);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_EQ(r.levels[0].kind, "equal");
}

TEST(CoincidingTest, TemplateStrictIndexSix) {
  const auto r = coinciding_check(template23());
  EXPECT_FALSE(r.coincide);
  ASSERT_EQ(r.levels.size(), 2u);
  for (const auto& lv : r.levels) {
    EXPECT_EQ(lv.kind, "strict");
    EXPECT_FALSE(lv.index.infinite);
    EXPECT_EQ(lv.index.value, 6);
    ASSERT_TRUE(lv.witness);
  }
}

TEST(TightnessTest, Examples) {
  const auto h = tightness_check(heisenberg(), compute_series(heisenberg()));
  EXPECT_TRUE(h.tight);
  EXPECT_EQ(h.class_of_center, (std::vector<std::size_t>{1, 2}));
  const auto zh = z_times_heisenberg();
  const auto p = tightness_check(zh, compute_series(zh));
  EXPECT_TRUE(p.tight);
  EXPECT_EQ(p.class_of_center, (std::vector<std::size_t>{1, 2}));
  const auto a = tightness_check(abelian(), compute_series(abelian()));
  EXPECT_TRUE(a.tight);
  EXPECT_EQ(a.class_of_center, (std::vector<std::size_t>{1}));
}

TEST(CrossModelTest, HeisenbergAgainstUt3) {
  const auto g = heisenberg();
  const auto s = compute_series(g);
  // (e1,0) -> I+e13, (e2,0) -> I+e12 up to relabeling, (0,1) -> the shear
  std::vector<UniMatrix> gens;
  for (const auto& x : g.generators()) gens.push_back(g.to_matrix(x));
  const MatrixGroup mg(3, gens, {"v1", "v2", "t1"});
  const Ball b(mg, 4);
  const auto rep = cross_model_check(g, s, mg, b);
  EXPECT_TRUE(rep.class_agrees);
  EXPECT_TRUE(rep.all_agree);
  EXPECT_EQ(rep.lcs_agrees, (std::vector<bool>{true, true}));
  EXPECT_EQ(rep.ucs_agrees, (std::vector<bool>{true, true}));
}

TEST(CrossModelTest, EmbeddedGroupIsUt3) {
  // the embedding of the Heisenberg split model generates all of UT(3, Z)
  const auto g = heisenberg();
  std::vector<UniMatrix> gens;
  for (const auto& x : g.generators()) gens.push_back(g.to_matrix(x));
  const auto lie = MatrixGroup(3, gens).lie_algebra();
  EXPECT_EQ(lie.dim(), 3u);
  EXPECT_EQ(Ball(MatrixGroup::unitriangular(3), 4).size(), 135u);
}

TEST(SeriesProperties, ChainsAndBrackets) {
  for (const auto& g : fixtures()) {
    const auto r = coinciding_check(g);
    const auto& s = r.series;
    for (std::size_t i = 2; i <= s.nilpotency_class; ++i)
      EXPECT_TRUE(s.gamma(i).contains(s.gamma(i + 1)));
    for (std::size_t k = 1; k < s.ucs.size(); ++k) {
      EXPECT_TRUE(s.ucs[k].fiber.contains(s.ucs[k - 1].fiber));
      EXPECT_TRUE(s.ucs[k].eps.contains(s.ucs[k - 1].eps));
    }
    for (const auto& cc : r.containments) EXPECT_TRUE(cc.holds) << cc.i << "," << cc.j;
    EXPECT_TRUE(r.gamma_c_in_center);
    EXPECT_EQ(s.ucs.size(), s.nilpotency_class);
    EXPECT_TRUE(s.ucs.back().fiber.is_full());
    EXPECT_TRUE(s.ucs.back().eps.is_full());
  }
}

TEST(SeriesProperties, UcsLevelsAreCentralModuloPrevious) {
  for (const auto& g : fixtures()) {
    const auto s = compute_series(g);
    for (std::size_t k = 1; k <= s.ucs.size(); ++k) {
      const auto& z = s.ucs[k - 1];
      const auto prev = s.center(k - 1, g.d(), g.r());
      std::vector<SplitElement> zs;
      for (const auto& b : z.fiber.basis()) zs.push_back(g.fiber_element(b));
      for (const auto& e : z.eps.basis()) zs.push_back(g.base_element(e));
      for (const auto& x : zs)
        for (const auto& y : g.generators()) EXPECT_TRUE(prev.contains(g.commutator(x, y)));
    }
  }
}
