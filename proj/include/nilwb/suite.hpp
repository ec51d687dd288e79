#pragma once

#include "nilwb/centralizer.hpp"
#include "nilwb/series.hpp"
#include "nilwb/spec_io.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef NILWB_VERSION
#define NILWB_VERSION "0.1.0"
#endif

namespace nilwb {

/// Check names in report order.
inline const std::vector<std::string>& all_checks() {
  static const std::vector<std::string> names{"cocentral",  "fl",     "grun",      "log",           "malnormal",
                                              "metabelian", "pascal", "series",    "tightness",     "weighted_roots"};
  return names;
}

struct SuiteOptions {
  std::optional<std::vector<std::string>> checks;  // none: all checks
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ball_radius;
  std::optional<long> eps_bound;
  bool timing = false;
};

struct Discrepancy {
  std::string check;
  std::string message;
};

struct Report {
  Json body;
  std::vector<Discrepancy> discrepancies;
  int exit_code() const { return discrepancies.empty() ? 0 : 2; }
};

namespace detail {

inline Json index_json(const LatticeIndex& i) { return i.infinite ? Json("infinite") : to_json(i.value); }

inline Json opt_json(const std::optional<SplitElement>& x) { return x ? to_json(*x) : Json(nullptr); }

inline Json description_json(const SplitGroup& g, const CentralizerDescription& c,
                             const CyclicSplit* split = nullptr) {
  Json gens = Json::array();
  for (const auto& x : c.generators()) {
    if (c.level == 0 && !g.commute(x, c.target))
      throw std::logic_error("centralizer generator " + x.str() + " does not commute with " + c.target.str());
    gens.push_back(to_json(x));
  }
  Json j{{"target", to_json(c.target)},
         {"rank", c.rank()},
         {"lie_rank", c.lie_rank},
         {"fiber", to_json(c.fiber)},
         {"eps", to_json(c.eps)},
         {"generators", gens},
         {"method", c.method},
         {"searched_box", c.searched_box}};
  j["offsets"] = Json::array();
  for (const auto& v : c.offsets) j["offsets"].push_back(to_json(v));
  if (c.eps.is_zero())
    j["image_direction"] = "zero";
  else if (auto dir = c.eps_image_direction())
    j["image_direction"] = to_json(*dir);
  else
    j["image_direction"] = "non-cyclic";
  if (c.level) j["modulo_center"] = c.level;
  if (split) {
    j["split_verified"] = split->ok;
    j["generator_u"] = split->u ? to_json(*split->u) : Json(nullptr);
    if (!split->ok) j["split_reason"] = split->reason;
  }
  return j;
}

inline std::string join_ints(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

/// Shared state for one run; expensive pieces are computed on first use.
class SuiteContext {
 public:
  SuiteContext(GroupSpec spec, const SuiteOptions& opt) : spec_(std::move(spec)) {
    if (opt.seed) spec_.seed = *opt.seed;
    if (opt.ball_radius) spec_.bounds.ball_radius = *opt.ball_radius;
    if (opt.eps_bound) spec_.bounds.eps_bound = *opt.eps_bound;
  }

  const GroupSpec& spec() const { return spec_; }
  bool split_model() const { return spec_.is_split_like(); }
  long eps() const { return spec_.bounds.eps_bound; }
  long box() const { return spec_.bounds.box_radius; }

  const SplitGroup& split() {
    if (!split_) split_ = std::make_unique<SplitGroup>(build_split(spec_));
    return *split_;
  }
  const CoincidingReport& coinciding() {
    if (!coinciding_) coinciding_ = std::make_unique<CoincidingReport>(coinciding_check(split(), eps()));
    return *coinciding_;
  }
  const SplitSeries& series() { return coinciding().series; }

  const FlReport& fl() {
    if (!fl_) {
      const long sample_bound = std::max<long>(10, 4 * box());
      auto cands = with_random_elements(split(), candidate_elements(split(), box()), spec_.bounds.samples,
                                        sample_bound, spec_.seed);
      fl_ = std::make_unique<FlReport>(fl_check(split(), series(), cands, eps(), &entries_));
      fl_->box = box();
    }
    return *fl_;
  }
  const std::vector<FlEntry>& entries() {
    fl();
    return entries_;
  }

  SplitElement h() {
    if (spec_.h) return *spec_.h;
    const SplitGroup& g = split();
    return g.r() ? g.base_element(unit_vector(g.r(), 0)) : g.fiber_element(unit_vector(g.d(), 0));
  }

  const MatrixGroup& matrix() {
    if (!matrix_) matrix_ = std::make_unique<MatrixGroup>(build_matrix(spec_));
    return *matrix_;
  }
  const Ball& ball() {
    if (!ball_)
      ball_ = std::make_unique<Ball>(matrix(), spec_.bounds.ball_radius, spec_.bounds.effective_ball_cap());
    return *ball_;
  }
  const MatrixFlReport& matrix_fl() {
    if (!mfl_) mfl_ = std::make_unique<MatrixFlReport>(matrix_fl_check(matrix(), ball()));
    return *mfl_;
  }

  /// FL verdict used to gate claims that assume FL-centralizers.
  bool fl_holds() { return split_model() ? fl().fl : matrix_fl().fl; }

  Json ball_scope() {
    return Json{{"radius", ball().radius()},
                {"size", ball().size()},
                {"cap", ball().cap()},
                {"truncated", ball().truncated()},
                {"semantics", ball().truncated() ? "approximate, lower bound" : "exact within ball"}};
  }

  std::string word(const UniMatrix& m) { return ball().contains(m) ? ball().word_str(matrix(), m) : ""; }

  Json matrix_json(const UniMatrix& m) {
    Json j{{"matrix", to_json(m)}};
    const std::string w = word(m);
    if (!w.empty()) j["word"] = w;
    return j;
  }

 private:
  GroupSpec spec_;
  std::unique_ptr<SplitGroup> split_;
  std::unique_ptr<CoincidingReport> coinciding_;
  std::unique_ptr<FlReport> fl_;
  std::vector<FlEntry> entries_;
  std::unique_ptr<MatrixGroup> matrix_;
  std::unique_ptr<Ball> ball_;
  std::unique_ptr<MatrixFlReport> mfl_;
};

struct CheckOutcome {
  Json json;
  std::vector<std::string> discrepancies;
};

inline CheckOutcome not_applicable(const std::string& reason) {
  return {Json{{"status", "not_applicable"}, {"summary", reason}, {"scope", Json{{"method", "none"}}}}, {}};
}

/// Failures of claims whose hypothesis (FL-centralizers) is not met are
/// reported but not counted as discrepancies.
inline void gate(CheckOutcome& out, bool failed, bool hypothesis, const std::string& message) {
  if (!failed) {
    out.json["status"] = "pass";
    return;
  }
  if (hypothesis) {
    out.json["status"] = "fail";
    out.discrepancies.push_back(message);
  } else {
    out.json["status"] = "fail_outside_hypothesis";
  }
}

// ---------------------------------------------------------------------------
// split-model checks

inline CheckOutcome split_series(SuiteContext& cx) {
  const auto& cr = cx.coinciding();
  const auto& s = cr.series;
  const SplitGroup& g = cx.split();
  CheckOutcome out;
  Json& j = out.json;
  j["class"] = s.nilpotency_class;
  j["lcs"] = Json::array();
  for (std::size_t i = 0; i < s.lcs.size(); ++i)
    j["lcs"].push_back(Json{{"i", i + 2}, {"basis", to_json(s.lcs[i])}, {"rank", s.lcs[i].rank()}});
  j["ucs"] = Json::array();
  for (std::size_t k = 0; k < s.ucs.size(); ++k) {
    const auto& z = s.ucs[k];
    j["ucs"].push_back(Json{{"k", k + 1},
                            {"fiber", to_json(z.fiber)},
                            {"eps", to_json(z.eps)},
                            {"rank", z.rank()},
                            {"eps_status", z.eps_status},
                            {"eps_box", z.eps_box}});
  }
  Json levels = Json::array();
  std::string strict;
  for (const auto& v : cr.levels) {
    Json l{{"i", v.i},
           {"kind", v.kind},
           {"gamma", to_json(v.gamma)},
           {"center_fiber", to_json(v.center_fiber)},
           {"center_level", s.nilpotency_class - v.i + 1},
           {"eps_rank", v.eps_rank}};
    if (v.kind != "incomparable") l["index"] = index_json(v.index);
    if (v.witness) l["witness"] = to_json(*v.witness);
    levels.push_back(l);
    if (v.kind == "strict") {
      const std::string idx = v.index.infinite ? "infinite" : v.index.value.get_str();
      out.discrepancies.push_back("gamma_" + std::to_string(v.i) + " is strictly inside Z_" +
                                  std::to_string(s.nilpotency_class - v.i + 1) + " (index " + idx +
                                  (v.eps_rank ? ", nonzero eps-part" : "") + ")");
      if (strict.empty()) strict = "strict at level " + std::to_string(v.i) + ", index " + idx;
    } else if (v.kind == "incomparable") {
      out.discrepancies.push_back("gamma_" + std::to_string(v.i) + " is not contained in Z_" +
                                  std::to_string(s.nilpotency_class - v.i + 1));
      if (strict.empty()) strict = "incomparable at level " + std::to_string(v.i);
    }
  }
  j["coinciding"] = Json{{"coincide", cr.coincide}, {"levels", levels}};
  Json cont = Json::array();
  for (const auto& c : cr.containments) {
    Json e{{"i", c.i}, {"j", c.j}, {"holds", c.holds}, {"bracket", to_json(c.bracket)}};
    if (c.witness) e["witness"] = to_json(*c.witness);
    cont.push_back(e);
    if (!c.holds)
      out.discrepancies.push_back("[gamma_" + std::to_string(c.i) + ", gamma_" + std::to_string(c.j) +
                                  "] is not inside gamma_" + std::to_string(c.i + c.j));
  }
  j["containments"] = cont;
  j["gamma_c_in_center"] = cr.gamma_c_in_center;
  j["factors_torsion_free"] = cr.factors_torsion_free;
  j["eps_status_exact"] = cr.eps_status_exact;
  j["scope"] = Json{{"method", "exact"}, {"eps_parts", cr.eps_status_exact ? "exact" : "bounded"},
                    {"eps_bound", cx.eps()}};
  if (!cr.gamma_c_in_center) out.discrepancies.push_back("gamma_c is not inside Z_1");
  if (!cr.factors_torsion_free) out.discrepancies.push_back("an upper central factor has torsion");
  (void)g;
  j["status"] = out.discrepancies.empty() ? "pass" : "fail";
  j["summary"] = "class " + std::to_string(s.nilpotency_class) + "; " +
                 (cr.coincide ? "gamma_i = Z_{c-i+1} at every level" : strict) +
                 (cr.eps_status_exact ? "" : "; eps-parts from bounded search");
  return out;
}

inline CheckOutcome split_fl(SuiteContext& cx) {
  const SplitGroup& g = cx.split();
  const auto& f = cx.fl();
  CheckOutcome out;
  Json& j = out.json;
  j["fl"] = f.fl;
  j["checked"] = f.checked;
  j["failures"] = f.failures;
  j["center_rank"] = f.center_rank;
  j["all_exact"] = f.all_exact;
  j["scope"] = Json{{"box_radius", f.box},
                    {"random_samples", cx.spec().bounds.samples},
                    {"eps_bound", cx.eps()},
                    {"statement", f.scope()}};
  auto failure_json = [&](const FlFailure& w) {
    return Json{{"element", to_json(w.element)},
                {"central", w.central},
                {"reason", w.reason},
                {"centralizer", description_json(g, w.centralizer)}};
  };
  if (f.witness) j["witness"] = failure_json(*f.witness);
  if (f.central_witness && f.witness && f.central_witness->element != f.witness->element)
    j["central_witness"] = failure_json(*f.central_witness);
  Json gens = Json::array();
  for (const auto& e : cx.entries()) {
    bool is_gen = false;
    for (const auto& x : g.generators()) is_gen = is_gen || x == e.element;
    if (is_gen) gens.push_back(description_json(g, e.centralizer, &e.split));
  }
  j["generator_centralizers"] = gens;
  if (!f.fl) out.discrepancies.push_back("FL fails at " + f.witness->element.str() + ": " + f.witness->reason);
  j["status"] = f.fl ? "pass" : "fail";
  j["summary"] = f.fl ? f.scope() : f.scope() + "; witness " + f.witness->element.str() + " (centralizer rank " +
                                        std::to_string(f.witness->centralizer.rank()) + ")";
  return out;
}

inline Json cocentral_json(const CoCentralReport& r) {
  return Json{{"pairs", r.pairs},
              {"related_pairs", r.related_pairs},
              {"equal_pairs", r.equal_pairs},
              {"related_not_equal", r.related_not_equal},
              {"equal_not_related", r.equal_not_related},
              {"consistent", r.consistent},
              {"commuting_implies_equal", r.commuting_implies_equal}};
}

inline CheckOutcome split_cocentral(SuiteContext& cx) {
  const auto r = co_centralization_box(cx.split(), cx.series(), cx.entries());
  CheckOutcome out;
  out.json = cocentral_json(r);
  out.json["scope"] = Json{{"box_radius", cx.box()}, {"random_samples", cx.spec().bounds.samples}};
  if (r.witness) out.json["witness"] = Json::array({to_json(r.witness->first), to_json(r.witness->second)});
  gate(out, !r.consistent, cx.fl_holds(),
       "co-centralization inconsistent: " + std::to_string(r.related_not_equal) + " related pairs with different "
       "centralizers, " + std::to_string(r.equal_not_related) + " equal-centralizer pairs not related");
  out.json["summary"] = std::to_string(r.pairs) + " ordered pairs; " +
                        (r.consistent ? "a:b iff C(a) = C(b) throughout"
                                      : std::to_string(r.related_not_equal) + " related but unequal, " +
                                            std::to_string(r.equal_not_related) + " equal but unrelated");
  return out;
}

inline CheckOutcome split_malnormal(SuiteContext& cx) {
  const SplitElement h = cx.h();
  if (is_derived(cx.series(), h)) return not_applicable("h = " + h.str() + " lies in the derived subgroup");
  const auto r = malnormality_check(cx.split(), cx.series(), h, cx.box(), cx.eps());
  CheckOutcome out;
  Json& j = out.json;
  j["h"] = to_json(h);
  j["conjugators"] = r.conjugators;
  j["holds_mod_center"] = r.holds_mod_center;
  j["holds_literal"] = r.holds_literal;
  j["resolution"] = r.status;
  j["scope"] = Json{{"box_radius", cx.box()}, {"tested_modulo", "Z_1"}};
  if (r.witness_g0)
    j["witness"] = Json{{"g0", to_json(*r.witness_g0)},
                        {"t", to_json(*r.witness_t)},
                        {"conjugate", to_json(*r.witness_conjugate)}};
  gate(out, !r.holds_mod_center, cx.fl_holds(),
       "C(h) is not malnormal modulo Z_1: conjugating by " + (r.witness_g0 ? r.witness_g0->str() : "") +
           " gives the non-central element " + (r.witness_conjugate ? r.witness_conjugate->str() : "") +
           " of C(h)");
  j["summary"] = r.holds_mod_center
                     ? "g^-1 C(h) g cap C(h) lies in Z_1 for " + std::to_string(r.conjugators) + " conjugators"
                     : "witness g0 = " + r.witness_g0->str() + " for h = " + h.str();
  return out;
}

inline CheckOutcome split_grun(SuiteContext& cx) {
  const auto r = grun_check(cx.split(), cx.series(), cx.box());
  if (!r.applicable) return not_applicable("class " + std::to_string(cx.series().nilpotency_class) + " < 3");
  CheckOutcome out;
  Json& j = out.json;
  j["centralizer_of_z2"] = Json{{"fiber", to_json(r.centralizer_fiber)}, {"eps", to_json(r.centralizer_eps)}};
  j["gamma2"] = to_json(r.gamma2);
  j["holds"] = r.holds;
  j["witness"] = opt_json(r.witness);
  j["kernel_samples"] = r.kernel_samples;
  j["kernel_claim_holds"] = r.kernel_claim_holds;
  if (r.kernel_witness)
    j["kernel_witness"] = Json{{"a", to_json(r.kernel_witness->first)}, {"x", to_json(r.kernel_witness->second)}};
  j["scope"] = Json{{"centralizer", "exact"}, {"kernel_box_radius", cx.box()}};
  if (!r.holds) out.discrepancies.push_back("C(Z_2) differs from gamma_2; witness " + r.witness->str());
  if (!r.kernel_claim_holds)
    out.discrepancies.push_back("ker(x -> [a,x]) differs from gamma_2 for a = " + r.kernel_witness->first.str());
  j["status"] = out.discrepancies.empty() ? "pass" : "fail";
  j["summary"] = r.holds ? "C(Z_2) = gamma_2" : "C(Z_2) strictly larger than gamma_2; witness " + r.witness->str();
  return out;
}

inline CheckOutcome split_log(SuiteContext& cx) {
  const auto& s = cx.series();
  const IntLattice g2 = s.gamma(2);
  if (g2.is_zero()) return not_applicable("gamma_2 is trivial");
  std::optional<SplitElement> a;
  for (const auto& b : g2.basis())
    if (!is_central(s, cx.split().fiber_element(b))) {
      a = cx.split().fiber_element(b);
      break;
    }
  if (!a) {
    CheckOutcome out = not_applicable("hypothesis violated: a central");
    out.json["a"] = to_json(cx.split().fiber_element(g2.basis().front()));
    return out;
  }
  const auto r = logarithm_check(cx.split(), s, *a, cx.box());
  CheckOutcome out;
  Json& j = out.json;
  j["a"] = to_json(*a);
  j["pairs_compared"] = r.pairs_compared;
  j["conjugacy_values"] = r.classes;
  j["scope"] = Json{{"box_radius", cx.box()}};
  if (r.witness) j["witness"] = Json::array({to_json(r.witness->first), to_json(r.witness->second)});
  gate(out, r.witness.has_value(), cx.fl_holds(),
       "a^x = a^y with x, y distinct modulo gamma_2 for a = " + a->str());
  j["summary"] = r.witness ? "a = " + a->str() + ": " + r.witness->first.str() + " and " + r.witness->second.str() +
                                 " conjugate a equally but differ modulo gamma_2"
                           : "a = " + a->str() + ": equal conjugates imply equal classes modulo gamma_2";
  return out;
}

inline CheckOutcome split_weighted_roots(SuiteContext& cx) {
  const auto& s = cx.series();
  if (s.nilpotency_class <= 3)
    return not_applicable("class " + std::to_string(s.nilpotency_class) + " <= 3");
  const SplitElement h = cx.h();
  if (is_derived(s, h)) return not_applicable("h = " + h.str() + " lies in the derived subgroup");
  const SplitGroup& g = cx.split();
  const auto ch = verify_weighted_roots(g, s, h, cx.eps());
  CheckOutcome out;
  Json& j = out.json;
  j["h"] = to_json(h);
  j["class"] = ch.nilpotency_class;
  j["chain_status"] = ch.status;
  Json levels = Json::array();
  for (const auto& lv : ch.levels)
    levels.push_back(Json{{"j", lv.j},
                          {"modulo_center", lv.centralizer.level},
                          {"u", lv.split.u ? to_json(*lv.split.u) : Json(nullptr)},
                          {"centralizer", description_json(g, lv.centralizer, &lv.split)}});
  j["levels"] = levels;
  if (ch.breakdown_level) {
    j["breakdown"] = Json{{"level", *ch.breakdown_level}, {"reason", ch.breakdown_reason}};
    out.discrepancies.push_back("chain breakdown at level " + std::to_string(*ch.breakdown_level) + ": " +
                                ch.breakdown_reason);
  }
  Json pairs = Json::array();
  for (const auto& p : ch.pairs)
    pairs.push_back(Json{{"i", p.i},
                         {"j", p.j},
                         {"k", p.k ? to_json(*p.k) : Json(nullptr)},
                         {"z", opt_json(p.z)},
                         {"z_in_center", p.z_in_center},
                         {"center_level", ch.nilpotency_class - p.i + 2}});
  j["pairs"] = pairs;
  Json weights = Json::array();
  for (const auto& k : ch.consecutive_weights) weights.push_back(to_json(k));
  j["consecutive_weights"] = weights;
  // k_ij k_jt = k_it against the Pascal table of the extracted consecutive weights
  bool nonzero = !ch.consecutive_weights.empty();
  for (const auto& k : ch.consecutive_weights) nonzero = nonzero && k != 0;
  if (ch.status != "chain_breakdown" && nonzero) {
    const WeightTable t = pascal_table(WeightVector(ch.nilpotency_class, ch.consecutive_weights));
    bool agrees = true;
    for (const auto& p : ch.pairs)
      if (p.k && t.at(p.i, p.j) != *p.k) agrees = false;
    j["pascal_table_agrees"] = agrees;
    if (!agrees) out.discrepancies.push_back("extracted k_ij differ from the Pascal table of consecutive weights");
  }
  if (cx.spec().model == "template" && cx.spec().r == 1) {
    j["input_weights"] = to_json(cx.spec().weights.front());
    if (cx.spec().weights.front().size() == ch.consecutive_weights.size())
      j["matches_input_weights"] = cx.spec().weights.front() == ch.consecutive_weights;
  }
  for (const auto& d : ch.discrepancies) out.discrepancies.push_back(d);
  j["discrepancies"] = ch.discrepancies;
  bool exact = true;
  for (const auto& lv : ch.levels) exact = exact && lv.centralizer.method == "exact";
  j["scope"] = Json{{"method", exact ? "exact" : "bounded"}, {"eps_bound", cx.eps()}};
  j["status"] = out.discrepancies.empty() ? "pass" : "fail";
  if (!out.discrepancies.empty() && !cx.fl_holds()) {
    j["status"] = "fail_outside_hypothesis";
    j["failures"] = out.discrepancies;
    out.discrepancies.clear();
  }
  std::string ks;
  for (std::size_t i = 0; i < ch.consecutive_weights.size(); ++i)
    ks += (i ? "," : "") + ch.consecutive_weights[i].get_str();
  j["summary"] = ch.breakdown_level ? "chain breakdown at level " + std::to_string(*ch.breakdown_level)
                                    : "consecutive weights (" + ks + "); " + std::to_string(ch.discrepancies.size()) +
                                          " relation failures";
  return out;
}

inline Json tightness_json(const TightnessReport& t) {
  Json j{{"class_of_center", t.class_of_center}, {"tight", t.tight}, {"method", t.method}};
  if (t.witness_level) j["witness_level"] = *t.witness_level;
  return j;
}

/// Expected: an FL group of class >= 3 is not tight.
inline CheckOutcome tightness_outcome(const TightnessReport& t, bool fl, std::size_t cls) {
  CheckOutcome out;
  out.json = tightness_json(t);
  out.json["scope"] = Json{{"method", t.method == "lie" ? "exact (Mal'cev algebra)" : "exact"}};
  if (fl && cls >= 3 && t.tight) {
    out.json["status"] = "fail";
    out.discrepancies.push_back("FL group of class " + std::to_string(cls) + " is tight");
  } else {
    out.json["status"] = "pass";
  }
  out.json["summary"] = std::string(t.tight ? "tight" : "not tight (level " + std::to_string(*t.witness_level) + ")") +
                        "; class(Z_k) = " + join_ints(t.class_of_center);
  return out;
}

/// Weight extraction on every action matrix, Pascal tables, round trips and
/// the commutation criterion.
inline CheckOutcome pascal_outcome(const std::vector<UniMatrix>& mats) {
  CheckOutcome out;
  Json& j = out.json;
  std::vector<WeightVector> ws;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    try {
      ws.push_back(extract_weights(mats[i]));
    } catch (const WeightError& e) {
      return not_applicable("matrix " + std::to_string(i + 1) + " is not weight-templated: " + e.what());
    } catch (const PreconditionError& e) {
      return not_applicable("matrix " + std::to_string(i + 1) + " is not weight-templated: " + e.what());
    }
  }
  if (ws.empty()) return not_applicable("no action matrices");
  Json per = Json::array();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const WeightTable t = pascal_table(ws[i]);
    Json table = Json::object();
    for (const auto& [ij, k] : t.entries())
      table[std::to_string(ij.first) + "," + std::to_string(ij.second)] = to_json(k);
    const bool round_trip = extract_weights(template_matrix(ws[i])) == ws[i] && template_matrix(ws[i]) == mats[i];
    const auto viol = t.pascal_violation();
    per.push_back(Json{{"weights", to_json(ws[i].weights())},
                       {"c", ws[i].c()},
                       {"table", table},
                       {"pascal_relation", !viol.has_value()},
                       {"round_trip", round_trip}});
    if (viol)
      out.discrepancies.push_back("Pascal relation fails for generator " + std::to_string(i + 1) + " at (" +
                                  std::to_string((*viol)[0]) + "," + std::to_string((*viol)[1]) + "," +
                                  std::to_string((*viol)[2]) + ")");
    if (!round_trip) out.discrepancies.push_back("weight round trip fails for generator " + std::to_string(i + 1));
  }
  j["generators"] = per;
  const auto w = action_well_defined(mats);
  j["action_well_defined"] = !w.has_value();
  if (w) j["commutation_witness"] = w->str();
  bool criterion = true;
  for (std::size_t a = 0; a < ws.size(); ++a)
    for (std::size_t b = a + 1; b < ws.size(); ++b)
      if (cross_proportional(ws[a], ws[b]) != (mats[a] * mats[b] == mats[b] * mats[a])) criterion = false;
  j["cross_proportionality_matches_commutation"] = criterion;
  if (!criterion) out.discrepancies.push_back("cross-proportionality disagrees with commutation");
  j["scope"] = Json{{"method", "exact"}};
  j["status"] = out.discrepancies.empty() ? "pass" : "fail";
  j["summary"] = std::to_string(ws.size()) + " weight-templated matrices; Pascal relations " +
                 (out.discrepancies.empty() ? "hold" : "fail");
  return out;
}

// ---------------------------------------------------------------------------
// matrix-model checks

inline CheckOutcome matrix_series(SuiteContext& cx) {
  const MatrixGroup& g = cx.matrix();
  const auto lie = g.lie_algebra();
  const auto lcs = lie.lower_central_series();
  const auto ucs = lie.upper_central_series();
  const std::size_t c = lie.nilpotency_class();
  CheckOutcome out;
  Json& j = out.json;
  j["class"] = c;
  std::vector<std::size_t> ld, ud;
  for (const auto& x : lcs) ld.push_back(x.dim());
  for (const auto& x : ucs) ud.push_back(x.dim());
  bool lie_coincide = true;
  for (std::size_t i = 1; i <= c; ++i)
    if (!(lcs[i - 1] == ucs[c - i + 1])) lie_coincide = false;
  j["lie"] = Json{{"lcs_dims", ld}, {"ucs_dims", ud}, {"coincide", lie_coincide}};
  const auto bs = ball_series(g, cx.ball());
  Json levels = Json::array();
  for (const auto& l : bs.levels) {
    Json e{{"i", l.i}, {"lcs_size", l.lcs_size}, {"ucs_size", l.ucs_size}, {"equal", l.equal}};
    if (l.witness) e["witness"] = cx.matrix_json(*l.witness);
    levels.push_back(e);
  }
  j["ball"] = Json{{"levels", levels}, {"coincide_in_ball", bs.coincide_in_ball}};
  j["scope"] = cx.ball_scope();
  gate(out, !lie_coincide, cx.fl_holds(), "central series do not coincide in the Mal'cev algebra");
  j["summary"] = "class " + std::to_string(c) + "; series " + (lie_coincide ? "coincide" : "differ") +
                 " (Mal'cev); " + (bs.coincide_in_ball ? "coincide" : "differ") + " within ball of " +
                 std::to_string(cx.ball().size());
  return out;
}

inline CheckOutcome matrix_fl_outcome(SuiteContext& cx) {
  const auto& f = cx.matrix_fl();
  CheckOutcome out;
  Json& j = out.json;
  j["fl"] = f.fl;
  j["checked"] = f.checked;
  j["center_rank"] = f.center_rank;
  j["max_ball_centralizer_rank"] = f.max_ball_rank;
  j["scope"] = cx.ball_scope();
  j["scope"]["non_derived_test"] = "log outside [g,g]";
  auto entry = [&](const MatrixFlEntry& e) {
    Json w = cx.matrix_json(e.element);
    w["lie_centralizer_rank"] = e.lie_rank;
    w["lie_centralizer_abelian"] = e.lie_abelian;
    w["ball_centralizer_rank"] = e.ball_rank;
    return w;
  };
  if (f.witness) j["witness"] = entry(*f.witness);
  if (f.ball_witness) j["ball_witness"] = entry(*f.ball_witness);
  if (!f.fl) out.discrepancies.push_back("FL fails; centralizer rank exceeds rk(Z_1)+1 = " +
                                         std::to_string(f.center_rank + 1));
  j["status"] = f.fl ? "pass" : "fail";
  j["summary"] = f.fl ? "no counterexample found among " + std::to_string(f.checked) + " non-derived ball elements"
                      : "witness with centralizer rank " + std::to_string(f.witness->lie_rank) + " > " +
                            std::to_string(f.center_rank + 1);
  return out;
}

inline CheckOutcome matrix_cocentral(SuiteContext& cx) {
  const auto r = matrix_co_centralization(cx.matrix(), cx.ball());
  CheckOutcome out;
  out.json = cocentral_json(r);
  out.json["scope"] = cx.ball_scope();
  gate(out, !r.consistent, cx.fl_holds(), "co-centralization inconsistent within the ball");
  out.json["summary"] = std::to_string(r.pairs) + " ordered pairs; " +
                        (r.consistent ? "a:b iff C(a) = C(b) throughout" : "inconsistent");
  return out;
}

inline CheckOutcome matrix_malnormal(SuiteContext& cx) {
  const UniMatrix h = cx.matrix().generators().front();
  const auto r = matrix_malnormality(cx.matrix(), cx.ball(), h);
  CheckOutcome out;
  Json& j = out.json;
  j["h"] = cx.matrix_json(h);
  j["conjugators"] = r.conjugators;
  j["tested_elements"] = r.tested;
  j["holds_mod_center"] = r.holds_mod_center;
  j["scope"] = cx.ball_scope();
  if (r.witness_g0)
    j["witness"] = Json{{"g0", cx.matrix_json(*r.witness_g0)},
                        {"t", cx.matrix_json(*r.witness_t)},
                        {"conjugate", to_json(*r.witness_conjugate)}};
  gate(out, !r.holds_mod_center, cx.fl_holds(), "C(h) is not malnormal modulo Z_1 within the ball");
  j["summary"] = r.holds_mod_center ? "no non-central intersection found" : "non-central intersection found";
  return out;
}

inline CheckOutcome matrix_grun(SuiteContext& cx) {
  const auto r = matrix_grun_check(cx.matrix(), cx.ball());
  if (!r.applicable) return not_applicable("class < 3");
  CheckOutcome out;
  Json& j = out.json;
  j["centralizer_dim"] = r.centralizer_dim;
  j["derived_dim"] = r.derived_dim;
  j["lie_holds"] = r.lie_holds;
  j["ball_holds"] = r.ball_holds;
  if (r.witness) j["witness"] = cx.matrix_json(*r.witness);
  j["scope"] = cx.ball_scope();
  if (!r.lie_holds || !r.ball_holds) out.discrepancies.push_back("C(Z_2) differs from gamma_2");
  j["status"] = out.discrepancies.empty() ? "pass" : "fail";
  j["summary"] = out.discrepancies.empty() ? "C(Z_2) = gamma_2 (Mal'cev and ball)" : "C(Z_2) differs from gamma_2";
  return out;
}

inline CheckOutcome matrix_log(SuiteContext& cx) {
  const auto r = matrix_logarithm(cx.matrix(), cx.ball());
  if (r.status == "not_applicable") return not_applicable("no derived elements in the ball");
  if (r.status == "hypothesis_violated") return not_applicable("hypothesis violated: a central");
  CheckOutcome out;
  Json& j = out.json;
  j["a"] = cx.matrix_json(*r.a);
  j["pairs_compared"] = r.pairs_compared;
  j["conjugacy_values"] = r.classes;
  j["scope"] = cx.ball_scope();
  j["scope"]["modulo"] = "isolator of gamma_2";
  if (r.witness) j["witness"] = Json::array({cx.matrix_json(r.witness->first), cx.matrix_json(r.witness->second)});
  gate(out, r.witness.has_value(), cx.fl_holds(), "equal conjugates of a from elements distinct modulo gamma_2");
  j["summary"] = r.witness ? "witness pair found" : "equal conjugates imply equal classes modulo gamma_2";
  return out;
}

inline CheckOutcome matrix_metabelian(SuiteContext& cx) {
  const auto r = metabelian_check(cx.matrix(), cx.ball());
  CheckOutcome out;
  Json& j = out.json;
  j["method"] = r.method;
  j["holds"] = r.holds;
  j["lie_holds"] = r.lie_holds;
  j["derived_elements"] = r.derived_elements;
  j["scope"] = cx.ball_scope();
  if (r.witness)
    j["witness"] = Json{{"p", to_json(r.witness->first)},
                        {"q", to_json(r.witness->second)},
                        {"entry", Json::array({r.row, r.col})}};
  // reported as a discrepancy whatever the FL verdict, like the Grun check
  j["fl_holds"] = cx.fl_holds();
  gate(out, !r.holds || !r.lie_holds, true, "derived subgroup is not abelian");
  j["summary"] = r.holds ? "derived elements of the ball commute"
                         : "non-commuting derived pair, first difference at (" + std::to_string(r.row) + "," +
                               std::to_string(r.col) + ")";
  return out;
}

inline CheckOutcome run_check(SuiteContext& cx, const std::string& name) {
  if (cx.split_model()) {
    if (name == "series") return split_series(cx);
    if (name == "fl") return split_fl(cx);
    if (name == "cocentral") return split_cocentral(cx);
    if (name == "malnormal") return split_malnormal(cx);
    if (name == "grun") return split_grun(cx);
    if (name == "log") return split_log(cx);
    if (name == "metabelian") {
      CheckOutcome out{Json{{"status", "pass"},
                            {"method", "structural"},
                            {"holds", true},
                            {"scope", Json{{"method", "exact"}}},
                            {"summary", "derived subgroup lies in the abelian fiber"}},
                       {}};
      return out;
    }
    if (name == "weighted_roots") return split_weighted_roots(cx);
    if (name == "tightness")
      return tightness_outcome(tightness_check(cx.split(), cx.series()), cx.fl_holds(), cx.series().nilpotency_class);
    if (name == "pascal") return pascal_outcome(cx.split().action());
  } else {
    if (name == "series") return matrix_series(cx);
    if (name == "fl") return matrix_fl_outcome(cx);
    if (name == "cocentral") return matrix_cocentral(cx);
    if (name == "malnormal") return matrix_malnormal(cx);
    if (name == "grun") return matrix_grun(cx);
    if (name == "log") return matrix_log(cx);
    if (name == "metabelian") return matrix_metabelian(cx);
    if (name == "weighted_roots") return not_applicable("weighted roots are extracted in split models only");
    if (name == "tightness")
      return tightness_outcome(tightness_check(cx.matrix()), cx.fl_holds(),
                               cx.matrix().lie_algebra().nilpotency_class());
    if (name == "pascal") return pascal_outcome(cx.matrix().generators());
  }
  throw std::invalid_argument("unknown check \"" + name + "\"");
}

}  // namespace detail

/// Validates and orders check names; unknown names are rejected.
inline std::vector<std::string> normalize_checks(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (std::find(all_checks().begin(), all_checks().end(), n) == all_checks().end())
      throw std::invalid_argument("unknown check \"" + n + "\"");
  }
  for (const auto& n : all_checks())
    if (std::find(names.begin(), names.end(), n) != names.end()) out.push_back(n);
  return out;
}

inline Report run_suite(const GroupSpec& spec, const SuiteOptions& opt = {}) {
  const auto checks = normalize_checks(opt.checks ? *opt.checks : all_checks());
  detail::SuiteContext cx(spec, opt);
  Report rep;
  Json checks_json = Json::object();
  Json timing = Json::object();
  for (const auto& name : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::CheckOutcome o = detail::run_check(cx, name);
    const auto t1 = std::chrono::steady_clock::now();
    timing[name] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    for (const auto& d : o.discrepancies) rep.discrepancies.push_back({name, d});
    checks_json[name] = std::move(o.json);
  }
  Json disc = Json::array();
  for (const auto& d : rep.discrepancies) disc.push_back(Json{{"check", d.check}, {"message", d.message}});
  rep.body = Json{{"tool", Json{{"name", "workbench"}, {"version", NILWB_VERSION}}},
                  {"spec", emit_spec(cx.spec())},
                  {"seed", cx.spec().seed},
                  {"checks_run", checks},
                  {"checks", checks_json},
                  {"discrepancies", disc},
                  {"exit_code", rep.exit_code()}};
  if (opt.timing) rep.body["timing_ms"] = timing;
  return rep;
}

inline std::string emit_report(const Report& r, const std::string& format = "json") {
  if (format == "json") return r.body.dump(2) + "\n";
  if (format != "text") throw std::invalid_argument("unknown format \"" + format + "\" (json, text)");
  std::ostringstream os;
  const Json& spec = r.body["spec"];
  os << "workbench " << r.body["tool"]["version"].get<std::string>() << "  model "
     << spec["model"].get<std::string>();
  if (spec.contains("name")) os << "  name " << spec["name"].get<std::string>();
  os << "  seed " << r.body["seed"].get<std::uint64_t>() << "\n";
  for (const auto& name : r.body["checks_run"]) {
    const Json& c = r.body["checks"][name.get<std::string>()];
    os << name.get<std::string>() << ": " << c["status"].get<std::string>();
    if (c.contains("summary")) os << "  " << c["summary"].get<std::string>();
    os << "\n";
  }
  os << "discrepancies: " << r.discrepancies.size() << "\n";
  for (const auto& d : r.discrepancies) os << "  [" << d.check << "] " << d.message << "\n";
  os << "exit code: " << r.exit_code() << "\n";
  return os.str();
}

}  // namespace nilwb
