#pragma once

#include "nilwb/lattice.hpp"
#include "nilwb/malcev.hpp"
#include "nilwb/matrix_group.hpp"
#include "nilwb/series.hpp"
#include "nilwb/split_group.hpp"
#include "nilwb/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace nilwb {

/// Exact description of {x : [x, y] in L x 0} as a set: x = (v, eps) with
/// eps in `eps` and v in offset(eps) + fiber. With L = 0 this is C_G(y).
struct CentralizerDescription {
  SplitElement target;
  std::size_t level = 0;            // commutators are taken modulo Z_level
  IntLattice fiber;                 // eps = 0 part
  IntLattice eps;                   // projection to Z^r
  std::vector<IntVec> offsets;      // one per eps basis vector, reduced modulo fiber
  IntLattice eps_envelope;          // saturated Q-projection from the Mal'cev algebra
  std::size_t lie_rank = 0;         // Hirsch length from the Mal'cev algebra
  std::string method;               // exact | bounded
  long searched_box = 0;
  std::size_t coset_candidates = 0;

  std::size_t rank() const { return fiber.rank() + eps.rank(); }

  std::vector<SplitElement> generators() const {
    std::vector<SplitElement> g;
    for (const auto& k : fiber.basis()) g.push_back({k, IntVec(eps.ambient())});
    for (std::size_t i = 0; i < eps.rank(); ++i) g.push_back({offsets[i], eps.basis()[i]});
    return g;
  }

  /// Primitive generator of the eps-projection when it is cyclic.
  std::optional<IntVec> eps_image_direction() const {
    if (eps.rank() != 1) return std::nullopt;
    return eps.basis().front();
  }

  /// Same subset of G (descriptions are canonical).
  friend bool operator==(const CentralizerDescription& a, const CentralizerDescription& b) {
    return a.fiber == b.fiber && a.eps == b.eps && a.offsets == b.offsets;
  }
};

namespace detail {

/// Some v with M v - w in L, or none.
inline std::optional<IntVec> solve_modulo(const IntMatrix& m, const IntLattice& l, const IntVec& w) {
  const std::size_t d = m.rows();
  IntMatrix aug(d, m.cols() + l.rank());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    for (std::size_t t = 0; t < l.rank(); ++t) aug(i, m.cols() + t) = l.basis()[t][i];
  }
  auto sol = solve_integer(aug, w);
  if (!sol) return std::nullopt;
  sol->resize(m.cols());
  return sol;
}

inline long effective_box(std::size_t r, long bound, std::size_t budget = 4096) {
  long b = bound;
  while (b > 0 && std::pow(2.0 * static_cast<double>(b) + 1.0, static_cast<double>(r)) > static_cast<double>(budget)) --b;
  return b;
}

}  // namespace detail

/// {x : [x, y] in L x 0} for a Phi-invariant saturated fiber lattice L.
/// `known_eps` lists eps-vectors already known to lie in the projection
/// (e.g. the eps-part of the next upper central term).
inline CentralizerDescription relative_centralizer(const SplitGroup& g, const SplitElement& y,
                                                   const IntLattice& l, const IntLattice& known_eps,
                                                   std::size_t level, long eps_bound) {
  g.check(y);
  const std::size_t d = g.d(), r = g.r();
  CentralizerDescription out;
  out.target = y;
  out.level = level;
  const IntMatrix pd = g.phi(-y.eps).matrix();
  const IntMatrix id = IntMatrix::identity(d);
  const IntMatrix m = pd - id;
  const IntVec pdb = pd * y.v;
  out.fiber = preimage_lattice(m, l);

  auto solve = [&](const IntVec& e) -> std::optional<IntVec> {
    const IntVec w = (id - g.phi(e).matrix()) * pdb;
    return detail::solve_modulo(m, l, w);
  };

  // Mal'cev side: (a, eps) with K (X(eps) w - X(delta) a) = 0, K annihilating L.
  const RatVec ly = g.log(y);
  const RatVec wl(ly.begin(), ly.begin() + static_cast<std::ptrdiff_t>(d));
  const auto ann = detail::annihilator_rows(l);
  const RatMatrix xd = g.x_of(y.eps);
  std::vector<RatVec> rows;
  for (const auto& kr : ann) {
    const RatVec k = to_rational(kr);
    RatVec row(d + r);
    for (std::size_t a = 0; a < d; ++a) {
      Rat s = 0;
      for (std::size_t i = 0; i < d; ++i)
        if (k[i] != 0) s += k[i] * xd(i, a);
      row[a] = -s;
    }
    for (std::size_t j = 0; j < r; ++j) {
      const RatVec xw = g.action_logs()[j] * wl;
      Rat s = 0;
      for (std::size_t i = 0; i < d; ++i) s += k[i] * xw[i];
      row[d + j] = s;
    }
    rows.push_back(std::move(row));
  }
  const auto ker = rational_kernel(RatMatrix::from_rows(rows, d + r));
  out.lie_rank = ker.size();
  std::vector<IntVec> proj;
  for (const auto& v : ker) {
    RatVec e(v.begin() + static_cast<std::ptrdiff_t>(d), v.end());
    if (!is_zero(e)) proj.push_back(clear_denominators(e));
  }
  const IntLattice u = saturate(hnf(proj, r));
  out.eps_envelope = u;

  // lower bound: delta, known eps, ker Phi, then a box and multiples of U's basis
  std::vector<IntVec> found{y.eps};
  for (const auto& b : known_eps.basis()) found.push_back(b);
  for (const auto& b : g.kernel_of_phi().basis()) found.push_back(b);
  IntLattice e_found = hnf(found, r);
  const long box = detail::effective_box(r, eps_bound);
  out.searched_box = box;
  for_each_in_box(r, box, [&](const IntVec& e) {
    if (!u.contains(e) || e_found.contains(e)) return;
    if (solve(e)) e_found = e_found + hnf({e}, r);
  });
  const long max_multiple = std::max<long>(64, eps_bound * eps_bound);
  for (const auto& b : u.basis()) {
    for (long t = 1; t <= max_multiple; ++t) {
      const IntVec e = Int(t) * b;
      if (e_found.contains(e)) break;
      if (solve(e)) {
        e_found = e_found + hnf({e}, r);
        break;
      }
    }
  }

  out.method = "bounded";
  if (e_found.rank() == u.rank()) {
    // E lies between e_found and U with finite index: test one vector per coset
    std::vector<IntVec> coords;
    for (const auto& b : e_found.basis()) coords.push_back(*u.coordinates(b));
    const IntLattice t = hnf(coords, u.rank());
    Int count = 1;
    for (std::size_t i = 0; i < t.rank(); ++i) count *= t.basis()[i][t.pivots()[i]];
    if (count <= 100000) {
      const std::size_t k = u.rank();
      std::vector<Int> c(k, Int(0));
      out.coset_candidates = count.get_ui();
      std::vector<IntVec> extra;
      for (std::size_t n = 0; n < out.coset_candidates; ++n) {
        IntVec e(r);
        for (std::size_t i = 0; i < k; ++i)
          if (c[i] != 0) e = e + c[i] * u.basis()[i];
        if (!e_found.contains(e) && solve(e)) extra.push_back(e);
        for (std::size_t i = 0; i < k; ++i) {  // odometer over the pivot box
          c[i] += 1;
          if (c[i] < t.basis()[i][t.pivots()[i]]) break;
          c[i] = 0;
        }
      }
      for (const auto& e : extra) found.push_back(e);
      for (const auto& b : e_found.basis()) found.push_back(b);
      e_found = hnf(found, r);
      out.method = "exact";
    }
  }
  out.eps = e_found;
  for (const auto& b : out.eps.basis()) {
    auto v = solve(b);
    if (!v) throw std::logic_error("centralizer: eps basis vector without a fiber solution");
    out.offsets.push_back(out.fiber.reduce(*v));
  }
  return out;
}

inline CentralizerDescription centralizer(const SplitGroup& g, const SplitElement& y, long eps_bound = 5) {
  return relative_centralizer(g, y, IntLattice::zero(g.d()), IntLattice::zero(g.r()), 0, eps_bound);
}

/// H = <u> x Z for a subgroup H of rank rank(Z) + 1 containing Z.
struct CyclicSplit {
  bool ok = false;
  std::string reason;
  std::optional<SplitElement> u;
  RatVec functional;  // f with f(log z) = 0 on Z
  Rat unit;           // f(log u)
  /// exponent m with x = u^m z, z in Z
  std::optional<Int> exponent(const SplitGroup& g, const SplitElement& x) const {
    const Rat q = dot(g.log(x)) / unit;
    if (q.get_den() != 1) return std::nullopt;
    return Int(q.get_num());
  }
  Rat dot(const RatVec& v) const {
    Rat s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (functional[i] != 0) s += functional[i] * v[i];
    return s;
  }
};

/// Builds u from a Bezout combination of the generators, then verifies every
/// generator is u^m z with z in Z. The sign of u is fixed by h = u^m z, m > 0.
inline CyclicSplit cyclic_split(const SplitGroup& g, const std::vector<SplitElement>& gens, std::size_t rank,
                                const CentralLevel& z, const SplitElement& h) {
  CyclicSplit cs;
  if (rank != z.rank() + 1) {
    cs.reason = "rank " + std::to_string(rank) + " differs from rank(Z)+1 = " + std::to_string(z.rank() + 1);
    return cs;
  }
  const std::size_t d = g.d(), r = g.r();
  // annihilator of log Z = (L tensor Q) + (E tensor Q) in Q^{d+r}
  std::vector<IntVec> zrows;
  for (const auto& b : z.fiber.basis()) {
    IntVec v = b;
    v.resize(d + r);
    zrows.push_back(std::move(v));
  }
  for (const auto& b : z.eps.basis()) {
    IntVec v(d);
    v.insert(v.end(), b.begin(), b.end());
    zrows.push_back(std::move(v));
  }
  const auto ann = detail::annihilator_rows(hnf(zrows, d + r));
  std::vector<RatVec> logs;
  for (const auto& x : gens) logs.push_back(g.log(x));
  for (const auto& a : ann) {
    const RatVec f = to_rational(a);
    bool nonzero = false;
    for (const auto& lg : logs) {
      Rat s = 0;
      for (std::size_t i = 0; i < lg.size(); ++i) s += f[i] * lg[i];
      if (s != 0) nonzero = true;
    }
    if (nonzero) {
      cs.functional = f;
      break;
    }
  }
  if (cs.functional.empty()) {
    cs.reason = "no generator outside Z";
    return cs;
  }
  std::vector<Rat> q;
  for (const auto& lg : logs) q.push_back(cs.dot(lg));
  Int den = 1;
  for (const auto& x : q) den = lcm(den, Int(x.get_den()));
  // extended gcd over the scaled integer values
  Int gacc = 0;
  std::vector<Int> coeff(q.size(), Int(0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Int ni = q[i].get_num() * (den / q[i].get_den());
    if (ni == 0) continue;
    Int gg, s, t;
    mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), gacc.get_mpz_t(), ni.get_mpz_t());
    for (std::size_t k = 0; k < i; ++k) coeff[k] *= s;
    coeff[i] = t;
    gacc = gg;
  }
  SplitElement u = g.identity();
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (coeff[i] != 0) u = g.mul(u, g.pow(gens[i], coeff[i]));
  cs.unit = cs.dot(g.log(u));
  if (cs.unit == 0) {
    cs.reason = "Bezout combination has zero image; subgroup is not abelian modulo Z";
    return cs;
  }
  const Rat hq = cs.dot(g.log(h));
  if (hq < 0) {
    u = g.inv(u);
    cs.unit = -cs.unit;
  }
  cs.u = u;
  for (const auto& x : gens) {
    const auto m = cs.exponent(g, x);
    if (!m) {
      cs.reason = "generator " + x.str() + " is not u^m z for an integer m";
      return cs;
    }
    const SplitElement rest = g.mul(g.pow(u, -*m), x);
    if (!z.contains(rest)) {
      cs.reason = "generator " + x.str() + " leaves a remainder outside Z";
      return cs;
    }
  }
  cs.ok = true;
  return cs;
}

inline bool is_derived(const SplitSeries& s, const SplitElement& x) {
  return x.in_fiber() && s.gamma(2).contains(x.v);
}

inline bool is_central(const SplitSeries& s, const SplitElement& x) { return s.ucs.front().contains(x); }

/// Generators first, then every element of the coordinate box in lexicographic order.
inline std::vector<SplitElement> candidate_elements(const SplitGroup& g, long box) {
  std::vector<SplitElement> out = g.generators();
  std::set<SplitElement> seen(out.begin(), out.end());
  for_each_in_box(g.d() + g.r(), box, [&](const IntVec& c) {
    SplitElement x{IntVec(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(g.d())),
                   IntVec(c.begin() + static_cast<std::ptrdiff_t>(g.d()), c.end())};
    if (seen.insert(x).second) out.push_back(std::move(x));
  });
  return out;
}

struct FlFailure {
  SplitElement element;
  CentralizerDescription centralizer;
  bool central = false;
  std::string reason;
};

struct FlReport {
  bool fl = true;
  std::size_t checked = 0;
  std::size_t center_rank = 0;
  long box = 0;
  bool all_exact = true;
  std::optional<FlFailure> witness;          // first non-central failure, else first failure
  std::optional<FlFailure> central_witness;  // first failure at a central element
  std::size_t failures = 0;
  std::string scope() const {
    return fl ? "no counterexample found among " + std::to_string(checked) + " non-derived elements"
              : std::to_string(failures) + " of " + std::to_string(checked) + " non-derived elements fail";
  }
};

struct FlEntry {
  SplitElement element;
  CentralizerDescription centralizer;
  CyclicSplit split;
  bool passes = false;
};

inline FlEntry fl_entry(const SplitGroup& g, const SplitSeries& s, const SplitElement& x, long eps_bound) {
  FlEntry e{x, centralizer(g, x, eps_bound), {}, false};
  e.split = cyclic_split(g, e.centralizer.generators(), e.centralizer.rank(), s.ucs.front(), x);
  e.passes = e.centralizer.method == "exact" && e.split.ok;
  return e;
}

inline FlReport fl_check(const SplitGroup& g, const SplitSeries& s, const std::vector<SplitElement>& candidates,
                         long eps_bound, std::vector<FlEntry>* entries = nullptr) {
  FlReport rep;
  rep.center_rank = s.ucs.front().rank();
  for (const auto& x : candidates) {
    if (is_derived(s, x)) continue;
    ++rep.checked;
    FlEntry e = fl_entry(g, s, x, eps_bound);
    if (e.centralizer.method != "exact") rep.all_exact = false;
    if (!e.passes) {
      ++rep.failures;
      rep.fl = false;
      FlFailure f{x, e.centralizer, is_central(s, x),
                  e.centralizer.method != "exact" ? "centralizer not fully resolved" : e.split.reason};
      if (f.central && !rep.central_witness) rep.central_witness = f;
      if (!rep.witness || (rep.witness->central && !f.central)) rep.witness = f;
    }
    if (entries) entries->push_back(std::move(e));
  }
  return rep;
}

inline FlReport fl_check(const SplitGroup& g, const SplitSeries& s, long box, long eps_bound,
                         std::vector<FlEntry>* entries = nullptr) {
  FlReport rep = fl_check(g, s, candidate_elements(g, box), eps_bound, entries);
  rep.box = box;
  return rep;
}

/// Seeded elements with coordinates in [-bound, bound], appended after `base`
/// without repeats. Uses the raw engine output so the sequence is portable.
inline std::vector<SplitElement> with_random_elements(const SplitGroup& g, std::vector<SplitElement> base,
                                                      std::size_t count, long bound, std::uint64_t seed) {
  std::set<SplitElement> seen(base.begin(), base.end());
  std::mt19937_64 rng(seed);
  const auto width = static_cast<std::uint64_t>(2 * bound + 1);
  for (std::size_t k = 0; k < count; ++k) {
    SplitElement x = g.identity();
    for (auto& c : x.v) c = static_cast<long>(rng() % width) - bound;
    for (auto& c : x.eps) c = static_cast<long>(rng() % width) - bound;
    if (seen.insert(x).second) base.push_back(std::move(x));
  }
  return base;
}

struct CoCentralResult {
  bool related = false;
  bool centralizers_equal = false;
  bool consistent = false;
  SplitElement c;  // a^-1 b
};

inline CoCentralResult co_centralization(const SplitGroup& g, const SplitSeries& s, const SplitElement& a,
                                         const SplitElement& b, const CentralizerDescription& ca,
                                         const CentralizerDescription& cb) {
  if (is_derived(s, a) || is_derived(s, b)) throw PreconditionError("co-centralization needs non-derived elements");
  CoCentralResult r;
  r.c = g.mul(g.inv(a), b);
  r.related = g.commute(r.c, b);
  r.centralizers_equal = ca == cb;
  r.consistent = r.related == r.centralizers_equal;
  return r;
}

inline CoCentralResult co_centralization_check(const SplitGroup& g, const SplitSeries& s, const SplitElement& a,
                                               const SplitElement& b, long eps_bound = 5) {
  if (is_derived(s, a) || is_derived(s, b)) throw PreconditionError("co-centralization needs non-derived elements");
  return co_centralization(g, s, a, b, centralizer(g, a, eps_bound), centralizer(g, b, eps_bound));
}

struct CoCentralReport {
  std::size_t pairs = 0;
  std::size_t related_pairs = 0, equal_pairs = 0;
  std::size_t related_not_equal = 0, equal_not_related = 0;
  bool consistent = true;
  bool commuting_implies_equal = true;
  std::optional<std::pair<SplitElement, SplitElement>> witness;
};

/// All ordered pairs of non-derived elements in the box. With c = a^-1 b,
/// [c, b] = 1 iff [a, b] = 1, which for split elements reads
/// (Phi(eps_a) - I) v_b = (Phi(eps_b) - I) v_a; a sample of pairs is also
/// checked with the literal definition.
inline CoCentralReport co_centralization_box(const SplitGroup& g, const SplitSeries& s,
                                             const std::vector<FlEntry>& entries,
                                             std::size_t literal_samples = 2000) {
  CoCentralReport rep;
  const std::size_t n = entries.size();
  std::vector<IntMatrix> p;
  std::vector<std::size_t> cls;
  std::map<std::tuple<IntLattice, IntLattice, std::vector<IntVec>>, std::size_t> ids;
  for (const auto& e : entries) {
    p.push_back(minus_identity(g.phi(e.element.eps)));
    const auto& c = e.centralizer;
    cls.push_back(ids.emplace(std::make_tuple(c.fiber, c.eps, c.offsets), ids.size()).first->second);
  }
  std::vector<std::vector<IntVec>> pv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pv[i].push_back(p[i] * entries[j].element.v);
  std::size_t literal = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool related = pv[i][j] == pv[j][i];
      if (literal < literal_samples && (i * n + j) % std::max<std::size_t>(1, n * n / literal_samples) == 0) {
        ++literal;
        const auto& a = entries[i].element;
        const auto& b = entries[j].element;
        if (g.commute(g.mul(g.inv(a), b), b) != related)
          throw std::logic_error("co-centralization: literal relation disagrees with commutation test");
      }
      const bool equal = cls[i] == cls[j];
      ++rep.pairs;
      if (related) ++rep.related_pairs;
      if (equal) ++rep.equal_pairs;
      if (related && !equal) ++rep.related_not_equal;
      if (equal && !related) ++rep.equal_not_related;
      if (related != equal) {
        rep.consistent = false;
        if (!rep.witness) rep.witness = std::make_pair(entries[i].element, entries[j].element);
      }
      if (related && !equal) rep.commuting_implies_equal = false;
    }
  (void)s;
  return rep;
}

struct MalnormalReport {
  bool holds_mod_center = true;
  bool holds_literal = true;
  SplitElement h;
  std::size_t conjugators = 0;
  std::optional<SplitElement> witness_g0, witness_t, witness_conjugate;
  std::string status;  // holds | fails | inconclusive
};

/// g0^-1 C(h) g0 cap C(h) for g0 outside C(h), tested on generators of C(h),
/// u, and their pairwise products.
inline MalnormalReport malnormality_check(const SplitGroup& g, const SplitSeries& s, const SplitElement& h,
                                          long conj_box, long eps_bound = 5) {
  MalnormalReport rep;
  rep.h = h;
  const auto ch = centralizer(g, h, eps_bound);
  std::vector<SplitElement> tests = ch.generators();
  const auto split = cyclic_split(g, tests, ch.rank(), s.ucs.front(), h);
  if (split.u) tests.push_back(*split.u);
  const std::size_t base = tests.size();
  for (std::size_t i = 0; i < base; ++i)
    for (std::size_t j = i + 1; j < base; ++j) tests.push_back(g.mul(tests[i], tests[j]));
  for (const auto& g0 : candidate_elements(g, conj_box)) {
    if (g.commute(g0, h)) continue;
    ++rep.conjugators;
    for (const auto& t : tests) {
      const SplitElement tc = g.conj(t, g0);
      if (!g.commute(tc, h) || tc.is_identity()) continue;
      rep.holds_literal = false;
      if (!is_central(s, tc) && rep.holds_mod_center) {
        rep.holds_mod_center = false;
        rep.witness_g0 = g0;
        rep.witness_t = t;
        rep.witness_conjugate = tc;
      }
    }
    if (!rep.holds_mod_center) break;
  }
  rep.status = ch.method != "exact" ? "inconclusive" : (rep.holds_mod_center ? "holds" : "fails");
  return rep;
}

struct GrunReport {
  bool applicable = false;
  bool holds = false;
  IntLattice centralizer_fiber, centralizer_eps;  // C(Z_2) = fiber x eps
  IntLattice gamma2;
  std::optional<SplitElement> witness;
  std::size_t kernel_samples = 0;
  std::optional<std::pair<SplitElement, SplitElement>> kernel_witness;  // (a, x)
  bool kernel_claim_holds = true;
};

/// C(Z_2) is the product K' x E' with K' = {v : (Phi(e) - I) v = 0, e in E_2}
/// and E' = {eps : X(eps) L_2 = 0}; compared with gamma_2 x 0.
inline GrunReport grun_check(const SplitGroup& g, const SplitSeries& s, long box) {
  GrunReport rep;
  if (s.nilpotency_class < 3) return rep;
  rep.applicable = true;
  const auto& z2 = s.ucs[1];
  const auto& z1 = s.ucs[0];
  IntLattice kf = IntLattice::full(g.d());
  for (const auto& e : z2.eps.basis()) kf = kf.intersect(integer_kernel(minus_identity(g.phi(e))));
  std::vector<IntVec> rows;
  for (const auto& l : z2.fiber.basis()) {
    const RatVec lq = to_rational(l);
    for (std::size_t i = 0; i < g.d(); ++i) {
      RatVec row(g.r());
      for (std::size_t j = 0; j < g.r(); ++j) {
        const RatVec xl = g.action_logs()[j] * lq;
        row[j] = xl[i];
      }
      if (!is_zero(row)) rows.push_back(clear_denominators(row));
    }
  }
  rep.centralizer_fiber = kf;
  rep.centralizer_eps = integer_kernel(IntMatrix::from_rows(rows, g.r()));
  rep.gamma2 = s.gamma(2);
  rep.holds = rep.centralizer_fiber == rep.gamma2 && rep.centralizer_eps.is_zero();
  if (!rep.holds) {
    for (const auto& b : rep.centralizer_fiber.basis())
      if (!rep.gamma2.contains(b)) {
        rep.witness = g.fiber_element(b);
        break;
      }
    if (!rep.witness && !rep.centralizer_eps.is_zero())
      rep.witness = g.base_element(rep.centralizer_eps.basis().front());
  }
  // kernel of x -> [a, x] versus gamma_2 for a in Z_2 \ Z_1
  std::vector<SplitElement> as;
  for (const auto& l : z2.fiber.basis())
    if (!z1.fiber.contains(l)) as.push_back(g.fiber_element(l));
  for (const auto& e : z2.eps.basis())
    if (!z1.eps.contains(e)) as.push_back(g.base_element(e));
  const auto xs = candidate_elements(g, box);
  for (const auto& a : as)
    for (const auto& x : xs) {
      ++rep.kernel_samples;
      const bool in_kernel = g.commute(a, x);
      if (in_kernel != is_derived(s, x)) {
        rep.kernel_claim_holds = false;
        if (!rep.kernel_witness) rep.kernel_witness = std::make_pair(a, x);
      }
    }
  return rep;
}

struct LogReport {
  std::string status;  // holds | fails | hypothesis_violated
  SplitElement a;
  std::size_t pairs_compared = 0;
  std::size_t classes = 0;
  std::optional<std::pair<SplitElement, SplitElement>> witness;
};

/// a^x = a^y implies x = y mod gamma_2, scanned over the coordinate box.
inline LogReport logarithm_check(const SplitGroup& g, const SplitSeries& s, const SplitElement& a, long box) {
  if (!is_derived(s, a)) throw PreconditionError("logarithm check needs a derived element a");
  LogReport rep;
  rep.a = a;
  if (is_central(s, a)) {
    rep.status = "hypothesis_violated";
    return rep;
  }
  const IntLattice& g2 = s.gamma(2);
  std::map<SplitElement, std::pair<SplitElement, SplitElement>> first;  // conjugate -> (key, x)
  for (const auto& x : candidate_elements(g, box)) {
    const SplitElement c = g.conj(a, x);
    const SplitElement key{g2.reduce(x.v), x.eps};
    auto it = first.find(c);
    if (it == first.end()) {
      first.emplace(c, std::make_pair(key, x));
      continue;
    }
    ++rep.pairs_compared;
    if (it->second.first != key && !rep.witness) rep.witness = std::make_pair(it->second.second, x);
  }
  rep.classes = first.size();
  rep.status = rep.witness ? "fails" : "holds";
  return rep;
}

/// Weighted-root chain for h: per level j = 3..c the centralizer of h modulo
/// Z_{c-j+1}, its generator u_j over Z_{c-j+2}, and k_ij, z_ij = u_i^{-k_ij} u_j.
struct ChainLevel {
  std::size_t j = 0;
  CentralizerDescription centralizer;
  CyclicSplit split;
};

struct WeightedPair {
  std::size_t i = 0, j = 0;
  std::optional<Int> k;
  std::optional<SplitElement> z;
  bool z_in_center = false;  // z_ij in Z_{c-i+2}
  bool k_nonzero = false;
};

struct WeightedChain {
  std::string status;  // ok | discrepancies | not_applicable | chain_breakdown
  std::optional<std::size_t> breakdown_level;
  std::string breakdown_reason;
  SplitElement h;
  std::size_t nilpotency_class = 0;
  std::vector<ChainLevel> levels;
  std::vector<WeightedPair> pairs;
  std::vector<std::string> discrepancies;
  std::vector<Int> consecutive_weights;  // k_{j,j+1}

  const WeightedPair* pair(std::size_t i, std::size_t j) const {
    for (const auto& p : pairs)
      if (p.i == i && p.j == j) return &p;
    return nullptr;
  }
};

inline WeightedChain verify_weighted_roots(const SplitGroup& g, const SplitSeries& s, const SplitElement& h,
                                           long eps_bound = 5) {
  WeightedChain ch;
  ch.h = h;
  const std::size_t c = s.nilpotency_class;
  ch.nilpotency_class = c;
  if (c <= 3) {
    ch.status = "not_applicable";
    return ch;
  }
  if (is_derived(s, h)) throw PreconditionError("weighted roots need a non-derived element h");
  for (std::size_t j = 3; j <= c; ++j) {
    const CentralLevel lower = s.center(c - j + 1, g.d(), g.r());
    const CentralLevel upper = s.center(c - j + 2, g.d(), g.r());
    ChainLevel lv;
    lv.j = j;
    lv.centralizer = relative_centralizer(g, h, lower.fiber, upper.eps, c - j + 1, eps_bound);
    lv.split = cyclic_split(g, lv.centralizer.generators(), lv.centralizer.rank(), upper, h);
    const bool ok = lv.split.ok && lv.centralizer.method == "exact";
    const std::string why = lv.centralizer.method != "exact" ? "centralizer not fully resolved" : lv.split.reason;
    ch.levels.push_back(std::move(lv));
    if (!ok) {
      ch.status = "chain_breakdown";
      ch.breakdown_level = j;
      ch.breakdown_reason = why;
      return ch;
    }
  }
  auto level = [&](std::size_t j) -> const ChainLevel& { return ch.levels[j - 3]; };
  for (std::size_t i = 3; i <= c; ++i)
    for (std::size_t j = i + 1; j <= c; ++j) {
      WeightedPair p;
      p.i = i;
      p.j = j;
      const SplitElement& ui = *level(i).split.u;
      const SplitElement& uj = *level(j).split.u;
      p.k = level(i).split.exponent(g, uj);
      if (p.k) {
        p.k_nonzero = *p.k != 0;
        p.z = g.mul(g.pow(ui, -*p.k), uj);
        p.z_in_center = s.center(c - i + 2, g.d(), g.r()).contains(*p.z);
      }
      if (!p.k)
        ch.discrepancies.push_back("u_" + std::to_string(j) + " is not u_" + std::to_string(i) + "^k z");
      else {
        if (!p.k_nonzero) ch.discrepancies.push_back("k_" + std::to_string(i) + std::to_string(j) + " = 0");
        if (!p.z_in_center)
          ch.discrepancies.push_back("z_" + std::to_string(i) + std::to_string(j) + " not in Z_" +
                                     std::to_string(c - i + 2));
      }
      ch.pairs.push_back(std::move(p));
    }
  for (std::size_t i = 3; i <= c; ++i)
    for (std::size_t j = i + 1; j <= c; ++j)
      for (std::size_t t = j + 1; t <= c; ++t) {
        const auto *ij = ch.pair(i, j), *jt = ch.pair(j, t), *it = ch.pair(i, t);
        if (!ij->k || !jt->k || !it->k) continue;
        const std::string tag = std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(t);
        if (*ij->k * *jt->k != *it->k) ch.discrepancies.push_back("k_ij k_jt = k_it fails at " + tag);
        const SplitElement lhs = g.mul(g.pow(*ij->z, *jt->k), *jt->z);
        if (lhs != *it->z) ch.discrepancies.push_back("z_ij^k_jt z_jt = z_it fails at " + tag);
      }
  for (std::size_t j = 3; j < c; ++j) {
    const auto* p = ch.pair(j, j + 1);
    if (p && p->k) ch.consecutive_weights.push_back(*p->k);
  }
  ch.status = ch.discrepancies.empty() ? "ok" : "discrepancies";
  return ch;
}

// ---------------------------------------------------------------------------
// Matrix-model analyses: exact ranks from the Mal'cev algebra, one-sided
// evidence from the word ball.

inline RatVec log_coords(const UniMatrix& x) { return unipotent_log(x).coords(); }

/// Sound but not complete: x is certainly outside [G, G] when log x is
/// outside the derived algebra.
inline bool certainly_non_derived(const RatSpan& derived, const UniMatrix& x) {
  return !derived.contains(log_coords(x));
}

/// Hirsch length of the subgroup generated by a set of matrices.
inline std::size_t hirsch_length(std::size_t n, const std::vector<UniMatrix>& xs) {
  return NilpotentLieAlgebra::of_group(n, xs).dim();
}

struct MatrixFlEntry {
  UniMatrix element;
  std::size_t lie_rank = 0;
  bool lie_abelian = true;
  std::size_t ball_rank = 0;
};

struct MatrixFlReport {
  bool fl = true;
  std::size_t center_rank = 0;
  std::size_t checked = 0;
  std::size_t ball_size = 0;
  bool truncated = false;
  std::optional<MatrixFlEntry> witness;       // first element failing on either measure
  std::optional<MatrixFlEntry> ball_witness;  // first element whose ball rank exceeds rk(Z_1)+1
  std::size_t max_ball_rank = 0;
};

inline MatrixFlReport matrix_fl_check(const MatrixGroup& g, const Ball& b, std::size_t sample_limit = 400) {
  MatrixFlReport rep;
  const auto lie = g.lie_algebra();
  const auto derived = lie.derived();
  rep.center_rank = lie.center().dim();
  rep.ball_size = b.size();
  rep.truncated = b.truncated();
  std::vector<UniMatrix> cands = g.generators();
  for (const auto& m : b.elements())
    if (std::find(cands.begin(), cands.end(), m) == cands.end()) cands.push_back(m);
  for (const auto& x : cands) {
    if (rep.checked >= sample_limit) break;
    if (!certainly_non_derived(derived, x)) continue;
    ++rep.checked;
    MatrixFlEntry e{x, 0, true, 0};
    const auto cent = lie.centralizer(log_coords(x));
    e.lie_rank = cent.dim();
    e.lie_abelian = lie.is_abelian(cent);
    e.ball_rank = hirsch_length(g.n(), probe_centralizer(b, x).elements);
    rep.max_ball_rank = std::max(rep.max_ball_rank, e.ball_rank);
    const bool lie_fail = e.lie_rank != rep.center_rank + 1 || !e.lie_abelian;
    const bool ball_fail = e.ball_rank > rep.center_rank + 1;
    if (lie_fail || ball_fail) {
      rep.fl = false;
      if (!rep.witness) rep.witness = e;
    }
    if (ball_fail && !rep.ball_witness) rep.ball_witness = e;
  }
  return rep;
}

struct MetabelianReport {
  bool holds = true;
  std::string method;  // structural | ball
  std::size_t derived_elements = 0;
  bool lie_holds = true;
  std::optional<std::pair<UniMatrix, UniMatrix>> witness;
  std::size_t row = 0, col = 0;  // 1-based first entry where pq and qp differ
};

inline MetabelianReport metabelian_check(const SplitGroup&) {
  MetabelianReport r;
  r.method = "structural";
  return r;
}

inline MetabelianReport metabelian_check(const MatrixGroup& g, const Ball& b) {
  MetabelianReport r;
  r.method = "ball";
  const auto d = probe_derived_set(b);
  r.derived_elements = d.elements.size();
  for (std::size_t i = 0; i < d.elements.size() && r.holds; ++i)
    for (std::size_t j = i + 1; j < d.elements.size(); ++j) {
      const UniMatrix pq = d.elements[i] * d.elements[j];
      const UniMatrix qp = d.elements[j] * d.elements[i];
      if (pq != qp) {
        r.holds = false;
        r.witness = std::make_pair(d.elements[i], d.elements[j]);
        const auto at = first_difference(pq.matrix(), qp.matrix());
        r.row = at->first + 1;
        r.col = at->second + 1;
        break;
      }
    }
  const auto lie = g.lie_algebra();
  const auto der = lie.derived();
  r.lie_holds = lie.is_abelian(der);
  return r;
}

struct MatrixGrunReport {
  bool applicable = false;
  bool lie_holds = false;  // c(z_2) = [g, g]
  std::size_t centralizer_dim = 0, derived_dim = 0;
  bool ball_holds = true;  // within the ball, commuting with Z_2 matches log in [g, g]
  std::optional<UniMatrix> witness;
};

inline MatrixGrunReport matrix_grun_check(const MatrixGroup& g, const Ball& b) {
  MatrixGrunReport r;
  const auto lie = g.lie_algebra();
  if (lie.nilpotency_class() < 3) return r;
  r.applicable = true;
  const auto ucs = lie.upper_central_series();
  const auto cz2 = lie.centralizer(ucs[2].basis());
  const auto der = lie.derived();
  r.centralizer_dim = cz2.dim();
  r.derived_dim = der.dim();
  r.lie_holds = cz2.dim() == der.dim() && cz2.contains(der);
  for (const auto& x : b.elements()) {
    const RatVec lx = log_coords(x);
    if (cz2.contains(lx) != der.contains(lx)) {
      r.ball_holds = false;
      if (!r.witness) r.witness = x;
    }
  }
  return r;
}

inline bool is_central(const MatrixGroup& g, const UniMatrix& x) {
  for (const auto& a : g.generators())
    if (!commute(x, a)) return false;
  return true;
}

/// Non-derived ball elements (Mal'cev test), generators first, up to `limit`.
inline std::vector<UniMatrix> non_derived_sample(const MatrixGroup& g, const Ball& b, const RatSpan& derived,
                                                 std::size_t limit) {
  std::vector<UniMatrix> out;
  std::set<UniMatrix> seen;
  auto take = [&](const UniMatrix& m) {
    if (out.size() < limit && certainly_non_derived(derived, m) && seen.insert(m).second) out.push_back(m);
  };
  for (const auto& a : g.generators()) take(a);
  for (const auto& m : b.elements()) take(m);
  return out;
}

/// C(a) = C(b) is decided exactly: both centralizers are lattices in
/// exp(c(log a)) and exp(c(log b)).
inline CoCentralReport matrix_co_centralization(const MatrixGroup& g, const Ball& b, std::size_t limit = 150) {
  CoCentralReport rep;
  const auto lie = g.lie_algebra();
  const auto xs = non_derived_sample(g, b, lie.derived(), limit);
  std::vector<RatSpan> cents;
  for (const auto& x : xs) cents.push_back(lie.centralizer(log_coords(x)));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const UniMatrix c = xs[i].inverse() * xs[j];
      const bool related = commute(c, xs[j]);
      const bool equal = cents[i] == cents[j];
      ++rep.pairs;
      if (related) ++rep.related_pairs;
      if (equal) ++rep.equal_pairs;
      if (related && !equal) ++rep.related_not_equal;
      if (equal && !related) ++rep.equal_not_related;
      if (related != equal) rep.consistent = false;
      if (related && !equal) rep.commuting_implies_equal = false;
    }
  return rep;
}

struct MatrixMalnormalReport {
  bool holds_mod_center = true;
  UniMatrix h;
  std::size_t conjugators = 0, tested = 0;
  std::optional<UniMatrix> witness_g0, witness_t, witness_conjugate;
};

/// Conjugates of C(h) cap B by ball elements outside C(h).
inline MatrixMalnormalReport matrix_malnormality(const MatrixGroup& g, const Ball& b, const UniMatrix& h) {
  MatrixMalnormalReport rep;
  rep.h = h;
  std::vector<UniMatrix> ts;
  for (const auto& m : probe_centralizer(b, h).elements)
    if (!is_central(g, m)) ts.push_back(m);
  rep.tested = ts.size();
  for (const auto& g0 : b.elements()) {
    if (commute(g0, h)) continue;
    ++rep.conjugators;
    const UniMatrix gi = g0.inverse();
    for (const auto& t : ts) {
      const UniMatrix tc = gi * t * g0;
      if (commute(tc, h) && !is_central(g, tc)) {
        rep.holds_mod_center = false;
        rep.witness_g0 = g0;
        rep.witness_t = t;
        rep.witness_conjugate = tc;
        return rep;
      }
    }
  }
  return rep;
}

struct MatrixLogReport {
  std::string status;  // holds | fails | hypothesis_violated | not_applicable
  std::optional<UniMatrix> a;
  std::size_t pairs_compared = 0, classes = 0;
  std::optional<std::pair<UniMatrix, UniMatrix>> witness;
};

/// a is the first non-central element of the derived probe inside the ball.
/// x y^-1 outside gamma_2 is certified by log(x y^-1) outside [g, g]; pairs
/// inside the isolator of gamma_2 are accepted.
inline MatrixLogReport matrix_logarithm(const MatrixGroup& g, const Ball& b) {
  MatrixLogReport rep;
  const auto lie = g.lie_algebra();
  const auto derived = lie.derived();
  const auto lcs = probe_lcs(b, 2);
  for (const auto& m : lcs[1].elements)
    if (!m.is_identity() && !is_central(g, m)) {
      rep.a = m;
      break;
    }
  if (!rep.a) {
    rep.status = lcs[1].elements.size() > 1 ? "hypothesis_violated" : "not_applicable";
    return rep;
  }
  std::map<UniMatrix, UniMatrix> first;
  for (const auto& x : b.elements()) {
    const UniMatrix c = x.inverse() * *rep.a * x;
    auto it = first.find(c);
    if (it == first.end()) {
      first.emplace(c, x);
      continue;
    }
    ++rep.pairs_compared;
    if (!rep.witness && derived.contains(log_coords(it->second * x.inverse())) == false)
      rep.witness = std::make_pair(it->second, x);
  }
  rep.classes = first.size();
  rep.status = rep.witness ? "fails" : "holds";
  return rep;
}

}  // namespace nilwb
