// Acceptance criteria 1-10: one PASS/FAIL line each.
//
// usage: acceptance <workbench-binary> [--known-unattainable N,M,...]
// Exit status is 0 iff the failing criteria are exactly the listed ones.

#include "nilwb/centralizer.hpp"
#include "nilwb/series.hpp"
#include "nilwb/spec_io.hpp"
#include "nilwb/split_group.hpp"
#include "nilwb/weights.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace nilwb;

namespace {

// Runtime limits in seconds; every other comparison is exact.
constexpr double kLimit1 = 5.0;
constexpr double kLimit2 = 5.0;
constexpr double kLimit3 = 2.0;
constexpr double kLimit4 = 60.0;
constexpr double kLimit5 = 30.0;

constexpr std::size_t kAssocSamples = 100;
constexpr int kWeightCorpus = 1000;
constexpr int kRootSamples = 200;
constexpr int kCommutatorPairs = 10000;

std::string g_workbench;
const std::filesystem::path kSpecs = std::filesystem::path(NILWB_SOURCE_DIR) / "specs";

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

IntVec iv(std::initializer_list<long> xs) {
  IntVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

int run_workbench(const std::string& args) {
  const std::string cmd = "\"" + g_workbench + "\" " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SplitGroup heisenberg() { return SplitGroup::build(2, 1, {UniMatrix{{1, 1}, {0, 1}}}); }
SplitGroup template_group(std::vector<long> w) {
  std::vector<Int> k(w.begin(), w.end());
  return SplitGroup::build(w.size() + 1, 1, {template_matrix(WeightVector::of(k))});
}

std::vector<SplitGroup> fixture_groups() {
  std::vector<SplitGroup> gs{heisenberg(), template_group({2, 3}), template_group({2, 3, 5}),
                             template_group({-1, 4, 2, 3})};
  gs.push_back(SplitGroup::build(3, 1, {UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}}));
  gs.push_back(SplitGroup::build(2, 1, {UniMatrix::identity(2)}));
  gs.push_back(SplitGroup::build(3, 2,
                                 {template_matrix(WeightVector::of({Int(2), Int(3)})),
                                  template_matrix(WeightVector::of({Int(4), Int(6)}))}));
  const UniMatrix a{{1, 1, 2, -1}, {0, 1, -1, 3}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  gs.push_back(SplitGroup::build(4, 2, {a, a.pow(3)}));
  gs.push_back(SplitGroup::build(2, 2, {UniMatrix{{1, 2}, {0, 1}}, UniMatrix{{1, 3}, {0, 1}}}));
  return gs;
}

SplitElement random_element(std::mt19937_64& rng, const SplitGroup& g, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  SplitElement x = g.identity();
  for (auto& c : x.v) c = d(rng);
  for (auto& c : x.eps) c = d(rng);
  return x;
}

Outcome criterion1() {
  Outcome o;
  const auto g = heisenberg();
  const auto s = compute_series(g);
  const IntLattice e1 = hnf({iv({1, 0})}, 2);
  o.require(s.nilpotency_class == 2, "class " + std::to_string(s.nilpotency_class));
  o.require(s.gamma(2) == e1, "gamma_2 = " + s.gamma(2).str());
  o.require(s.ucs.front().fiber == e1 && s.ucs.front().eps.is_zero(), "L_1 differs from Z(1,0)");
  std::vector<FlEntry> entries;
  const auto fl = fl_check(g, s, 5, 5, &entries);
  o.require(fl.fl && fl.all_exact, "fl_check: " + fl.scope());
  const auto cc = co_centralization_box(g, s, entries);
  o.require(cc.consistent, "co-centralization inconsistent");
  o.detail = o.pass ? std::to_string(fl.checked) + " non-derived elements, " + std::to_string(cc.pairs) + " pairs"
                    : o.detail;
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto g = template_group({2, 3});
  const auto cr = coinciding_check(g);
  const auto& s = cr.series;
  o.require(s.gamma(2) == hnf({iv({2, 0, 0}), iv({0, 3, 0})}, 3), "gamma_2 = " + s.gamma(2).str());
  o.require(s.gamma(3) == hnf({iv({6, 0, 0})}, 3), "gamma_3 = " + s.gamma(3).str());
  o.require(s.nilpotency_class == 3, "class " + std::to_string(s.nilpotency_class));
  o.require(s.ucs.size() >= 2 && s.ucs[1].fiber == hnf({iv({1, 0, 0}), iv({0, 1, 0})}, 3) && s.ucs[1].eps.is_zero(),
            "L_2 differs from {(x,y,0)}");
  bool strict6 = !cr.levels.empty();
  for (const auto& lv : cr.levels)
    strict6 = strict6 && lv.kind == "strict" && !lv.index.infinite && lv.index.value == 6;
  o.require(strict6, "coinciding verdict is not strict with index 6");
  const auto fl = fl_check(g, s, 2, 5);
  o.require(!fl.fl && fl.witness && fl.witness->element == g.fiber_element(iv({0, 1, 0})),
            "fl witness is not ((0,1,0),0)");
  const int rc = run_workbench("run \"" + (kSpecs / "template_2_3.json").string() + "\"");
  o.require(rc == 2, "workbench exit code " + std::to_string(rc));
  if (o.pass) o.detail = "strict, index 6; witness ((0,1,0),(0)); exit code 2";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const std::vector<UniMatrix> act{UniMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}},
                                   UniMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}}};
  bool rejected = false;
  try {
    SplitGroup::build(3, 2, act);
  } catch (const NonCommutingActionError& e) {
    rejected = e.witness().row == 1 && e.witness().col == 3;
    o.detail = e.what();
  }
  o.require(rejected, "build not rejected with a (1,3) witness");
  const auto w = associativity_probe(3, 2, act, kAssocSamples, 1);
  o.require(w.has_value(), "no failing triple in " + std::to_string(kAssocSamples) + " samples");
  if (o.pass) o.detail += "; failing triple at sample " + std::to_string(w->sample);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto g = embed_J(MatrixGroup::unitriangular(3), 4);
  const Ball b(g, 3);
  const auto bs = ball_series(g, b);
  o.require(!b.truncated(), "ball truncated");
  o.require(bs.coincide_in_ball, "ball LCS and UCS differ");
  const auto fl = matrix_fl_check(g, b);
  const bool witness = fl.ball_witness.has_value();
  o.require(witness, "no non-derived element has ball-centralizer rank above rk(Z_1)+1 = " +
                         std::to_string(fl.center_rank + 1) + " (max " + std::to_string(fl.max_ball_rank) +
                         " over " + std::to_string(fl.checked) + " elements; the embedded group is Heisenberg)");
  if (o.pass) o.detail = "ball size " + std::to_string(b.size());
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto g4 = MatrixGroup::unitriangular(4);
  const auto m4 = metabelian_check(g4, Ball(g4, 2));
  o.require(m4.holds, "UT(4) radius 2 has a non-commuting derived pair");
  const auto g5 = MatrixGroup::unitriangular(5);
  const auto m5 = metabelian_check(g5, Ball(g5, 2));
  o.require(!m5.holds && m5.witness.has_value(), "UT(5) radius 2 has no witness pair");
  if (m5.witness) {
    const UniMatrix c = commutator(m5.witness->first, m5.witness->second);
    o.require(c(0, 4) != 0, "witness commutator has zero (1,5) entry");
  }
  if (o.pass) o.detail = "UT(5) witness differs at entry (" + std::to_string(m5.row) + "," + std::to_string(m5.col) + ")";
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> cd(4, 9);
  std::uniform_int_distribution<long> wd(-9, 8);
  int bad = 0;
  for (int n = 0; n < kWeightCorpus; ++n) {
    const std::size_t c = cd(rng);
    std::vector<Int> w;
    for (std::size_t i = 0; i + 3 < c; ++i) {
      const long x = wd(rng);
      w.emplace_back(x >= 0 ? x + 1 : x);
    }
    const WeightVector wv(c, w);
    const WeightTable t = pascal_table(wv);
    for (std::size_t i = 3; i <= c; ++i)
      for (std::size_t j = i + 1; j <= c; ++j)
        for (std::size_t k = j + 1; k <= c; ++k)
          if (t.at(i, j) * t.at(j, k) != t.at(i, k)) ++bad;
    if (!(extract_weights(template_matrix(wv)) == wv)) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " failures");
  if (o.pass) o.detail = std::to_string(kWeightCorpus) + " weight vectors";
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  const auto gs = fixture_groups();
  int bad = 0;
  for (int n = 0; n < kRootSamples; ++n) {
    const auto& g = gs[static_cast<std::size_t>(n) % gs.size()];
    const auto x = random_element(rng, g, 6);
    for (long k : {2L, 3L, 5L})
      if (g.root(g.pow(x, k), k) != x) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " root mismatches");
  // per group: a derived element with no n-th root; x^n = (w,0) forces eps = 0
  // and v = w/n, so the box of radius max|w_i| holds every candidate
  std::size_t witnesses = 0;
  for (const auto& g : gs) {
    const auto s = compute_series(g);
    if (s.gamma(2).is_zero()) continue;
    const IntVec w = s.gamma(2).basis().front();
    const SplitElement target = g.fiber_element(w);
    long n = 2;
    while (g.root(target, n)) ++n;
    long box = 1;
    for (const auto& c : w) box = std::max(box, static_cast<long>(Int(abs(c)).get_si()));
    bool found = false;
    for (const auto& y : candidate_elements(g, box))
      if (g.pow(y, n) == target) found = true;
    o.require(!found, "box enumeration finds a root of " + target.str());
    ++witnesses;
  }
  if (o.pass)
    o.detail = std::to_string(kRootSamples) + " elements x 3 exponents; " + std::to_string(witnesses) +
               " non-power witnesses";
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::size_t checks = 0;
  for (const auto& g : fixture_groups()) {
    const auto cr = coinciding_check(g);
    for (const auto& c : cr.containments) {
      ++checks;
      o.require(c.holds, "[gamma_" + std::to_string(c.i) + ", gamma_" + std::to_string(c.j) + "] not inside");
    }
  }
  std::mt19937_64 rng(8);
  const auto gs = fixture_groups();
  int bad = 0;
  for (int n = 0; n < kCommutatorPairs; ++n) {
    const auto& g = gs[static_cast<std::size_t>(n) % gs.size()];
    const auto x = random_element(rng, g, 5);
    const auto y = random_element(rng, g, 5);
    if (g.commutator(x, y) != g.commutator_literal(x, y)) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " commutator mismatches");
  if (o.pass)
    o.detail = std::to_string(checks) + " containments; " + std::to_string(kCommutatorPairs) + " commutator pairs";
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto g = heisenberg();
  const auto s = compute_series(g);
  // (v, eps) <-> [[1, eps, v1], [0, 1, v2], [0, 0, 1]]
  const auto ut3 = MatrixGroup::unitriangular(3);
  const Ball b(ut3, 4);
  const auto rep = cross_model_check(g, s, ut3, b);
  o.require(rep.class_agrees, "class differs");
  o.require(rep.all_agree, "a level differs");
  if (o.pass) o.detail = "ball size " + std::to_string(b.size()) + ", class " + std::to_string(rep.split_class);
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto tmp = std::filesystem::temp_directory_path() / ("nilwb_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(tmp);
  for (const char* f : {"heisenberg.json", "template_2_3.json", "ut3_in_ut4.json"}) {
    const auto spec = (kSpecs / f).string();
    const auto a = tmp / "a.json", b = tmp / "b.json";
    run_workbench("run \"" + spec + "\" --seed 17 --out \"" + a.string() + "\"");
    run_workbench("run \"" + spec + "\" --seed 17 --out \"" + b.string() + "\"");
    const std::string ra = slurp(a), rb = slurp(b);
    o.require(!ra.empty() && ra == rb, std::string(f) + " reports differ");
  }
  std::filesystem::remove_all(tmp);
  if (o.pass) o.detail = "3 specs, byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <workbench-binary> [--known-unattainable N,...]\n";
    return 1;
  }
  g_workbench = argv[1];
  std::set<int> known;
  for (int i = 2; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--known-unattainable") {
      std::stringstream ss(argv[i + 1]);
      std::string tok;
      while (std::getline(ss, tok, ',')) known.insert(std::stoi(tok));
    }

  struct Criterion {
    int id;
    std::function<Outcome()> run;
    double limit;  // seconds, 0 when untimed
  };
  const std::vector<Criterion> all{{1, criterion1, kLimit1},  {2, criterion2, kLimit2}, {3, criterion3, kLimit3},
                                   {4, criterion4, kLimit4},  {5, criterion5, kLimit5}, {6, criterion6, 0},
                                   {7, criterion7, 0},        {8, criterion8, 0},       {9, criterion9, 0},
                                   {10, criterion10, 0}};
  std::set<int> failed;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs >= c.limit) {
      o.pass = false;
      o.detail += "; runtime over " + std::to_string(c.limit) + " s";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << timing;
    if (c.limit > 0) std::cout << " (limit " << c.limit << " s)";
    std::cout << "  " << o.detail << "\n";
    if (!o.pass) failed.insert(c.id);
  }
  std::cout << "summary: " << all.size() - failed.size() << "/" << all.size() << " pass";
  if (!known.empty()) {
    std::cout << "; known unattainable:";
    for (int k : known) std::cout << " " << k;
  }
  std::cout << "\n";
  if (failed != known) {
    std::cout << "unexpected outcome: failing set differs from the known-unattainable set\n";
    return 1;
  }
  return 0;
}
