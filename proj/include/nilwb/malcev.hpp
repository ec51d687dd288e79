#pragma once

#include "nilwb/rational_span.hpp"
#include "nilwb/uni_matrix.hpp"
#include "nilwb/unipotent_log.hpp"

#include <cstddef>
#include <vector>

namespace nilwb {

/// Rational Lie subalgebra of strictly upper triangular n x n matrices, stored
/// as a reduced echelon basis of coordinate vectors (see RationalNilMatrix::coords).
///
/// For a finitely generated subgroup G of UT(n, Z), the Lie closure of the
/// logarithms of its generators is the rational Mal'cev algebra of G; ranks of
/// centralizers, centers and central series of G equal the dimensions of the
/// corresponding subspaces here.
class NilpotentLieAlgebra {
 public:
  NilpotentLieAlgebra() = default;

  /// Lie closure of the given elements.
  static NilpotentLieAlgebra generated_by(std::size_t n, const std::vector<RationalNilMatrix>& gens) {
    NilpotentLieAlgebra g(n);
    for (const auto& x : gens) g.span_.insert(x.coords());
    // closure: bracket every basis element with every other until stable
    bool grown = true;
    while (grown) {
      grown = false;
      const auto basis = g.span_.basis();
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
          if (g.span_.insert(g.bracket(basis[i], basis[j]))) grown = true;
    }
    return g;
  }

  static NilpotentLieAlgebra of_group(std::size_t n, const std::vector<UniMatrix>& gens) {
    std::vector<RationalNilMatrix> logs;
    for (const auto& a : gens) logs.push_back(unipotent_log(a));
    return generated_by(n, logs);
  }

  std::size_t n() const { return n_; }
  std::size_t width() const { return n_ * (n_ - 1) / 2; }
  std::size_t dim() const { return span_.dim(); }
  const std::vector<RatVec>& basis() const { return span_.basis(); }
  const RatSpan& span() const { return span_; }
  bool contains(const RatVec& x) const { return span_.contains(x); }
  bool contains(const RationalNilMatrix& x) const { return span_.contains(x.coords()); }

  RatVec bracket(const RatVec& a, const RatVec& b) const {
    const RatMatrix x = RationalNilMatrix::from_coords(n_, a).matrix();
    const RatMatrix y = RationalNilMatrix::from_coords(n_, b).matrix();
    return RationalNilMatrix(x * y - y * x).coords();
  }

  RatSpan make_span(const std::vector<RatVec>& vs) const {
    RatSpan s(width());
    for (const auto& v : vs) s.insert(v);
    return s;
  }

  /// {x in g : [x, s] = 0 for all s in S}.
  RatSpan centralizer(const std::vector<RatVec>& s) const { return relative_centralizer(s, RatSpan(width())); }
  RatSpan centralizer(const RatVec& x) const { return centralizer(std::vector<RatVec>{x}); }

  /// {x in g : [x, s] in W for all s in S}; W must be a subspace of g.
  RatSpan relative_centralizer(const std::vector<RatVec>& s, const RatSpan& w) const {
    const auto ann = annihilator(w);
    const auto& b = basis();
    std::vector<RatVec> rows;
    for (const auto& sv : s) {
      std::vector<RatVec> cols;
      for (const auto& bi : b) cols.push_back(bracket(bi, sv));
      for (const auto& a : ann) {
        RatVec row(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) row[i] = dot(a, cols[i]);
        rows.push_back(std::move(row));
      }
    }
    return combine(kernel_of_rows(rows, b.size()));
  }

  RatSpan center() const { return centralizer(basis()); }

  RatSpan derived() const {
    RatSpan s(width());
    const auto& b = basis();
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) s.insert(bracket(b[i], b[j]));
    return s;
  }

  /// [S, T] spanned by brackets of basis vectors.
  RatSpan bracket_span(const RatSpan& s, const RatSpan& t) const {
    RatSpan out(width());
    for (const auto& x : s.basis())
      for (const auto& y : t.basis()) out.insert(bracket(x, y));
    return out;
  }

  /// gamma_1 = g, gamma_{k+1} = [gamma_k, g], ending with the first zero term.
  std::vector<RatSpan> lower_central_series() const { return lower_central_series(span_); }

  /// Lower central series of the subalgebra S (which must be closed under brackets).
  std::vector<RatSpan> lower_central_series(const RatSpan& s) const {
    std::vector<RatSpan> out{s};
    while (out.back().dim() > 0) {
      RatSpan next = bracket_span(out.back(), s);
      if (next.dim() == out.back().dim()) break;  // cannot happen for nilpotent input
      out.push_back(std::move(next));
    }
    return out;
  }

  /// z_0 = 0, z_{k+1} = {x : [x, g] in z_k}, ending with g.
  std::vector<RatSpan> upper_central_series() const {
    std::vector<RatSpan> out{RatSpan(width())};
    while (out.back().dim() < dim()) {
      RatSpan next = relative_centralizer(basis(), out.back());
      if (next.dim() == out.back().dim()) break;
      out.push_back(std::move(next));
    }
    return out;
  }

  /// Nilpotency class of the subalgebra S (0 for the zero algebra).
  std::size_t nilpotency_class(const RatSpan& s) const { return lower_central_series(s).size() - 1; }
  std::size_t nilpotency_class() const { return nilpotency_class(span_); }

  bool is_abelian(const RatSpan& s) const { return bracket_span(s, s).dim() == 0; }

 private:
  explicit NilpotentLieAlgebra(std::size_t n) : n_(n), span_(n * (n - 1) / 2) {}

  static Rat dot(const RatVec& a, const RatVec& b) {
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
  }

  /// Rows spanning the orthogonal complement of W.
  std::vector<RatVec> annihilator(const RatSpan& w) const {
    if (w.dim() == 0) {
      std::vector<RatVec> id;
      for (std::size_t i = 0; i < width(); ++i) {
        RatVec e(width());
        e[i] = 1;
        id.push_back(std::move(e));
      }
      return id;
    }
    return rational_kernel(RatMatrix::from_rows(w.basis(), width()));
  }

  static std::vector<RatVec> kernel_of_rows(const std::vector<RatVec>& rows, std::size_t cols) {
    return rational_kernel(RatMatrix::from_rows(rows, cols));
  }

  RatSpan combine(const std::vector<RatVec>& coeffs) const {
    RatSpan out(width());
    const auto& b = basis();
    for (const auto& c : coeffs) {
      RatVec x(width());
      for (std::size_t i = 0; i < b.size(); ++i)
        if (c[i] != 0)
          for (std::size_t k = 0; k < width(); ++k) x[k] += c[i] * b[i][k];
      out.insert(x);
    }
    return out;
  }

  std::size_t n_ = 0;
  RatSpan span_;
};

}  // namespace nilwb
