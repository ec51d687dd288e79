#pragma once

#include "nilwb/lattice.hpp"
#include "nilwb/matrix_group.hpp"
#include "nilwb/split_group.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilwb {

inline IntMatrix minus_identity(const UniMatrix& a) { return a.nilpotent_part(); }

/// Z_k = fiber x eps as a product set.
struct CentralLevel {
  IntLattice fiber;
  IntLattice eps;
  std::string eps_status = "exact";
  std::size_t eps_box = 0;  // half-width of the bounded cross-check box
  bool cross_check_agrees = true;

  std::size_t rank() const { return fiber.rank() + eps.rank(); }
  bool contains(const SplitElement& x) const { return fiber.contains(x.v) && eps.contains(x.eps); }
};

struct SplitSeries {
  std::vector<IntLattice> lcs;     // gamma_2, gamma_3, ..., first zero term
  std::vector<CentralLevel> ucs;   // Z_1, ..., Z_c = G
  std::size_t nilpotency_class = 1;

  /// gamma_i for i >= 2 (zero beyond the computed terms).
  IntLattice gamma(std::size_t i) const {
    if (i < 2) throw std::out_of_range("gamma(i) is a fiber lattice only for i >= 2");
    return i - 2 < lcs.size() ? lcs[i - 2] : IntLattice::zero(lcs.front().ambient());
  }
  /// Z_k for k >= 0.
  CentralLevel center(std::size_t k, std::size_t d, std::size_t r) const {
    if (k == 0) return {IntLattice::zero(d), IntLattice::zero(r)};
    return k - 1 < ucs.size() ? ucs[k - 1] : ucs.back();
  }
};

namespace detail {

/// Smallest lattice containing l and stable under every A_j^{+-1}.
inline IntLattice phi_closure(const SplitGroup& g, IntLattice l) {
  for (std::size_t it = 0; it < g.d() + 2; ++it) {
    std::vector<IntVec> rows = l.basis();
    for (const auto& a : g.action()) {
      const UniMatrix ai = a.inverse();
      for (const auto& b : l.basis()) {
        rows.push_back(a * b);
        rows.push_back(ai * b);
      }
    }
    IntLattice next = hnf(std::move(rows), g.d());
    if (next == l) return l;
    l = std::move(next);
  }
  throw std::logic_error("phi-closure did not stabilize within d+2 rounds");
}

/// Integer rows spanning the annihilator of l tensor Q.
inline std::vector<IntVec> annihilator_rows(const IntLattice& l) {
  const std::size_t d = l.ambient();
  std::vector<IntVec> out;
  if (l.is_zero()) {
    for (std::size_t i = 0; i < d; ++i) out.push_back(unit_vector(d, i));
    return out;
  }
  for (const auto& k : rational_kernel(to_rational(l.basis_matrix()))) out.push_back(clear_denominators(k));
  return out;
}

}  // namespace detail

/// Lower central series of the subgroup fiber x span(eps_gens) (a normal
/// product set), as fiber lattices gamma_2, gamma_3, ..., first zero.
inline std::vector<IntLattice> lcs_of(const SplitGroup& g, const IntLattice& fiber,
                                      const std::vector<IntVec>& eps_gens) {
  std::vector<IntVec> rows;
  for (const auto& e : eps_gens) {
    const IntMatrix m = minus_identity(g.phi(-e));
    for (const auto& b : fiber.basis()) rows.push_back(m * b);
  }
  std::vector<IntLattice> out{hnf(rows, g.d())};
  for (std::size_t it = 0; !out.back().is_zero(); ++it) {
    if (it > g.d() + 2) throw std::logic_error("lower central series did not terminate within d+2 steps");
    rows.clear();
    for (const auto& e : eps_gens) {
      const IntMatrix m = minus_identity(g.phi(-e));
      for (const auto& b : out.back().basis()) rows.push_back(m * b);
    }
    out.push_back(hnf(std::move(rows), g.d()));
  }
  return out;
}

/// gamma_2 as the phi-closure of the commutators of generators, then
/// gamma_{i+1} = sum_j (A_j^-1 - I) gamma_i.
inline std::vector<IntLattice> lcs(const SplitGroup& g) {
  std::vector<IntVec> rows;
  for (const auto& a : g.action()) {
    const IntMatrix m = minus_identity(a.inverse());
    for (std::size_t k = 0; k < g.d(); ++k) rows.push_back(m * unit_vector(g.d(), k));
  }
  std::vector<IntLattice> out{detail::phi_closure(g, hnf(std::move(rows), g.d()))};
  for (std::size_t it = 0; !out.back().is_zero(); ++it) {
    if (it > g.d() + 2) throw std::logic_error("lower central series did not terminate within d+2 steps");
    std::vector<IntVec> next;
    for (const auto& a : g.action()) {
      const IntMatrix m = minus_identity(a.inverse());
      for (const auto& b : out.back().basis()) next.push_back(m * b);
    }
    out.push_back(hnf(std::move(next), g.d()));
  }
  return out;
}

/// {eps : (Phi(eps) - I) Z^d is contained in l}, for saturated Phi-invariant l.
/// Since Phi(eps) - I = X(eps) * (invertible, commuting), this is the integer
/// kernel of the linear map eps -> K X(eps), K annihilating l.
inline IntLattice eps_level(const SplitGroup& g, const IntLattice& l) {
  const auto k = detail::annihilator_rows(l);
  std::vector<IntVec> rows;
  for (const auto& kr : k) {
    const RatVec kq = to_rational(kr);
    for (std::size_t m = 0; m < g.d(); ++m) {
      RatVec row(g.r());
      for (std::size_t j = 0; j < g.r(); ++j)
        for (std::size_t i = 0; i < g.d(); ++i)
          if (kq[i] != 0) row[j] += kq[i] * g.action_logs()[j](i, m);
      if (!is_zero(row)) rows.push_back(clear_denominators(row));
    }
  }
  return integer_kernel(IntMatrix::from_rows(rows, g.r()));
}

/// Direct test of (Phi(eps) - I) Z^d in l.
inline bool eps_condition(const SplitGroup& g, const IntVec& eps, const IntLattice& l) {
  const IntMatrix m = minus_identity(g.phi(eps));
  for (std::size_t k = 0; k < g.d(); ++k)
    if (!l.contains(m.col(k))) return false;
  return true;
}

/// Calls f on every vector of [-bound, bound]^n in lexicographic order.
template <class F>
void for_each_in_box(std::size_t n, long bound, F&& f) {
  IntVec v(n, Int(-bound));
  if (n == 0) {
    f(v);
    return;
  }
  while (true) {
    f(v);
    std::size_t i = n;
    while (i-- > 0) {
      if (v[i] < bound) {
        v[i] += 1;
        break;
      }
      v[i] = -bound;
      if (i == 0) return;
    }
  }
}

/// Upper central series Z_k = L_k x E_k with L_{k+1} = {v : (A_j^-1 - I) v in L_k for all j}
/// and E_{k+1} = eps_level(L_k); each E_k is cross-checked on a box of half-width eps_bound.
inline std::vector<CentralLevel> ucs_tower(const SplitGroup& g, long eps_bound = 5) {
  std::vector<CentralLevel> out;
  IntLattice prev = IntLattice::zero(g.d());
  for (std::size_t k = 1; k <= g.d() + g.r() + 2; ++k) {
    CentralLevel z;
    z.fiber = IntLattice::full(g.d());
    for (const auto& a : g.action()) z.fiber = z.fiber.intersect(preimage_lattice(minus_identity(a.inverse()), prev));
    z.eps = eps_level(g, prev);
    z.eps_box = static_cast<std::size_t>(eps_bound);
    for_each_in_box(g.r(), eps_bound, [&](const IntVec& e) {
      if (z.eps.contains(e) != eps_condition(g, e, prev)) z.cross_check_agrees = false;
    });
    if (!z.cross_check_agrees) z.eps_status = "bounded-search";
    prev = z.fiber;
    const bool done = z.fiber.is_full() && z.eps.is_full();
    out.push_back(std::move(z));
    if (done) return out;
  }
  throw std::logic_error("upper central series did not reach the whole group");
}

inline SplitSeries compute_series(const SplitGroup& g, long eps_bound = 5) {
  SplitSeries s;
  s.lcs = lcs(g);
  s.ucs = ucs_tower(g, eps_bound);
  s.nilpotency_class = s.lcs.size();
  return s;
}

/// gamma_i versus Z_{c-i+1}.
struct LevelVerdict {
  std::size_t i = 0;
  std::string kind;  // equal | strict | incomparable
  LatticeIndex index;
  std::size_t eps_rank = 0;  // rank of the eps-part of Z_{c-i+1}
  IntLattice gamma, center_fiber;
  std::optional<IntVec> witness;  // in Z_{c-i+1} fiber but not in gamma_i
};

struct ContainmentCheck {
  std::size_t i = 0, j = 0;
  bool holds = true;
  IntLattice bracket;  // [gamma_i, gamma_j]
  std::optional<IntVec> witness;
};

struct CoincidingReport {
  SplitSeries series;
  std::vector<LevelVerdict> levels;
  std::vector<ContainmentCheck> containments;
  bool coincide = true;
  bool gamma_c_in_center = true;
  bool factors_torsion_free = true;
  bool eps_status_exact = true;
};

/// Fiber parts of commutators of two generating sets, closed under the action.
inline IntLattice commutator_lattice(const SplitGroup& g, const std::vector<SplitElement>& a,
                                     const std::vector<SplitElement>& b) {
  std::vector<IntVec> rows;
  for (const auto& x : a)
    for (const auto& y : b) rows.push_back(g.commutator(x, y).v);
  return detail::phi_closure(g, hnf(std::move(rows), g.d()));
}

inline std::vector<SplitElement> lattice_elements(const SplitGroup& g, const IntLattice& l) {
  std::vector<SplitElement> out;
  for (const auto& b : l.basis()) out.push_back(g.fiber_element(b));
  return out;
}

inline CoincidingReport coinciding_check(const SplitGroup& g, long eps_bound = 5) {
  CoincidingReport rep;
  rep.series = compute_series(g, eps_bound);
  const auto& s = rep.series;
  const std::size_t c = s.nilpotency_class;
  for (const auto& z : s.ucs) {
    if (!z.cross_check_agrees) rep.eps_status_exact = false;
  }
  for (std::size_t i = 2; i <= c; ++i) {
    LevelVerdict v;
    v.i = i;
    v.gamma = s.gamma(i);
    const CentralLevel z = s.center(c - i + 1, g.d(), g.r());
    v.center_fiber = z.fiber;
    v.eps_rank = z.eps.rank();
    if (!z.fiber.contains(v.gamma)) {
      v.kind = "incomparable";
      rep.coincide = false;
    } else {
      v.index = index(v.gamma, z.fiber);
      v.kind = (v.index.value == 1 && !v.index.infinite && v.eps_rank == 0) ? "equal" : "strict";
      if (v.kind != "equal") rep.coincide = false;
      for (const auto& b : z.fiber.basis())
        if (!v.gamma.contains(b)) {
          v.witness = b;
          break;
        }
    }
    rep.levels.push_back(std::move(v));
  }
  // [gamma_i, gamma_j] <= gamma_{i+j}
  std::vector<std::vector<SplitElement>> gens{{}, g.generators()};
  for (std::size_t i = 2; i <= c; ++i) gens.push_back(lattice_elements(g, s.gamma(i)));
  for (std::size_t i = 1; i <= c; ++i)
    for (std::size_t j = i; i + j <= c + 1; ++j) {
      ContainmentCheck cc;
      cc.i = i;
      cc.j = j;
      cc.bracket = commutator_lattice(g, gens[i], gens[j]);
      const IntLattice target = s.gamma(i + j);
      for (const auto& b : cc.bracket.basis())
        if (!target.contains(b)) {
          cc.holds = false;
          cc.witness = b;
          break;
        }
      rep.containments.push_back(std::move(cc));
    }
  if (c >= 2) rep.gamma_c_in_center = s.ucs.front().fiber.contains(s.gamma(c));
  for (std::size_t k = 0; k + 1 < s.ucs.size(); ++k) {
    if (!quotient_torsion_free(s.ucs[k].fiber, s.ucs[k + 1].fiber)) rep.factors_torsion_free = false;
    if (!quotient_torsion_free(s.ucs[k].eps, s.ucs[k + 1].eps)) rep.factors_torsion_free = false;
  }
  if (!s.ucs.empty() && (!is_saturated(s.ucs.front().fiber) || !is_saturated(s.ucs.front().eps)))
    rep.factors_torsion_free = false;
  return rep;
}

struct TightnessReport {
  std::vector<std::size_t> class_of_center;  // entry k-1: class of Z_k
  bool tight = true;
  std::optional<std::size_t> witness_level;
  std::string method;  // exact | lie
};

inline TightnessReport tightness_check(const SplitGroup& g, const SplitSeries& s) {
  TightnessReport t;
  t.method = "exact";
  for (std::size_t k = 1; k <= s.ucs.size(); ++k) {
    const auto& z = s.ucs[k - 1];
    const auto terms = lcs_of(g, z.fiber, z.eps.basis());
    // a nontrivial abelian group has class 1; terms counts gamma_2 .. first zero
    std::size_t cls = terms.size();
    if (z.rank() == 0) cls = 0;
    t.class_of_center.push_back(cls);
    if (cls != k && t.tight) {
      t.tight = false;
      t.witness_level = k;
    }
  }
  return t;
}

/// Tightness for matrix groups through the Mal'cev algebra: class of z_k.
inline TightnessReport tightness_check(const MatrixGroup& g) {
  TightnessReport t;
  t.method = "lie";
  const auto lie = g.lie_algebra();
  const auto ucs = lie.upper_central_series();
  for (std::size_t k = 1; k < ucs.size(); ++k) {
    const std::size_t cls = lie.nilpotency_class(ucs[k]);
    t.class_of_center.push_back(cls);
    if (cls != k && t.tight) {
      t.tight = false;
      t.witness_level = k;
    }
  }
  return t;
}

/// Ball-level comparison of P_i (commutator probes) with Z_{c-i+1} in the ball.
struct BallLevel {
  std::size_t i = 0;
  std::size_t lcs_size = 0, ucs_size = 0;
  bool equal = false;
  std::optional<UniMatrix> witness;  // in Z_{c-i+1} cap B but not in P_i
};

struct BallSeriesReport {
  std::size_t nilpotency_class = 0;  // from the Mal'cev algebra
  std::size_t ball_size = 0;
  bool truncated = false;
  std::vector<BallLevel> levels;
  bool coincide_in_ball = true;
  std::vector<BallProbe> lcs, ucs;
};

inline BallSeriesReport ball_series(const MatrixGroup& g, const Ball& b) {
  BallSeriesReport rep;
  rep.nilpotency_class = g.lie_algebra().nilpotency_class();
  rep.ball_size = b.size();
  rep.truncated = b.truncated();
  const std::size_t c = rep.nilpotency_class;
  rep.lcs = probe_lcs(b, c);
  rep.ucs = probe_ucs(g, b, c);
  for (std::size_t i = 1; i <= c; ++i) {
    BallLevel lv;
    lv.i = i;
    const auto& p = rep.lcs[i - 1].elements;
    const auto& z = rep.ucs[c - i].elements;
    lv.lcs_size = p.size();
    lv.ucs_size = z.size();
    lv.equal = p == z;
    if (!lv.equal) {
      rep.coincide_in_ball = false;
      for (const auto& m : z)
        if (!std::binary_search(p.begin(), p.end(), m)) {
          lv.witness = m;
          break;
        }
    }
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

/// Level-by-level agreement between a split model and a matrix group whose
/// ball elements lie in the image of the split model's affine embedding.
struct CrossModelReport {
  bool class_agrees = false;
  std::size_t split_class = 0, matrix_class = 0;
  std::vector<bool> lcs_agrees;  // entry i-1: gamma_i
  std::vector<bool> ucs_agrees;  // entry k-1: Z_k
  bool all_agree = false;
  std::optional<UniMatrix> witness;
};

inline CrossModelReport cross_model_check(const SplitGroup& sg, const SplitSeries& s, const MatrixGroup& mg,
                                          const Ball& b) {
  CrossModelReport rep;
  const BallSeriesReport bs = ball_series(mg, b);
  rep.split_class = s.nilpotency_class;
  rep.matrix_class = bs.nilpotency_class;
  rep.class_agrees = rep.split_class == rep.matrix_class;
  rep.all_agree = rep.class_agrees;
  if (!rep.class_agrees) return rep;
  const std::size_t c = rep.split_class;
  std::vector<SplitElement> pre;
  for (const auto& m : b.elements()) {
    auto x = sg.from_matrix(m);
    if (!x) {
      rep.all_agree = false;
      rep.witness = m;
      return rep;
    }
    pre.push_back(*x);
  }
  auto in_set = [](const std::vector<UniMatrix>& v, const UniMatrix& m) {
    return std::binary_search(v.begin(), v.end(), m);
  };
  for (std::size_t i = 1; i <= c; ++i) {
    bool ok = true;
    for (std::size_t t = 0; t < pre.size(); ++t) {
      const bool split_in = i == 1 ? true : (pre[t].in_fiber() && s.gamma(i).contains(pre[t].v));
      if (split_in != in_set(bs.lcs[i - 1].elements, b.elements()[t])) {
        ok = false;
        if (!rep.witness) rep.witness = b.elements()[t];
      }
    }
    rep.lcs_agrees.push_back(ok);
    rep.all_agree = rep.all_agree && ok;
  }
  for (std::size_t k = 1; k <= c; ++k) {
    bool ok = true;
    const CentralLevel z = s.center(k, sg.d(), sg.r());
    for (std::size_t t = 0; t < pre.size(); ++t)
      if (z.contains(pre[t]) != in_set(bs.ucs[k - 1].elements, b.elements()[t])) {
        ok = false;
        if (!rep.witness) rep.witness = b.elements()[t];
      }
    rep.ucs_agrees.push_back(ok);
    rep.all_agree = rep.all_agree && ok;
  }
  return rep;
}

}  // namespace nilwb
