#pragma once

#include "nilwb/dense_matrix.hpp"

#include <cstddef>
#include <vector>

namespace nilwb {

/// Incrementally maintained Q-subspace of Q^n in reduced row echelon form.
class RatSpan {
 public:
  RatSpan() = default;
  explicit RatSpan(std::size_t n) : n_(n) {}

  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<RatVec>& basis() const { return rows_; }

  /// Residue of v after elimination against the current basis.
  RatVec residue(RatVec v) const {
    if (v.size() != n_) throw DimensionError("RatSpan: vector length mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rat c = v[pivots_[i]];
      if (c == 0) continue;
      for (std::size_t k = 0; k < n_; ++k)
        if (rows_[i][k] != 0) v[k] -= c * rows_[i][k];
    }
    return v;
  }

  bool contains(const RatVec& v) const { return nilwb::is_zero(residue(v)); }

  /// Adds v; returns true iff the dimension grew.
  bool insert(const RatVec& v) {
    RatVec r = residue(v);
    std::size_t p = 0;
    while (p < n_ && r[p] == 0) ++p;
    if (p == n_) return false;
    const Rat lead = r[p];
    for (auto& x : r) x /= lead;
    for (auto& row : rows_) {
      const Rat c = row[p];
      if (c == 0) continue;
      for (std::size_t k = 0; k < n_; ++k)
        if (r[k] != 0) row[k] -= c * r[k];
    }
    // keep rows sorted by pivot column
    std::size_t at = 0;
    while (at < pivots_.size() && pivots_[at] < p) ++at;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), std::move(r));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), p);
    return true;
  }

  bool insert(const IntVec& v) { return insert(to_rational(v)); }

  bool contains(const RatSpan& other) const {
    for (const auto& b : other.rows_)
      if (!contains(b)) return false;
    return true;
  }
  friend bool operator==(const RatSpan& a, const RatSpan& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<RatVec> rows_;
  std::vector<std::size_t> pivots_;
};

/// Basis of {x in Q^cols : M x = 0}.
inline std::vector<RatVec> rational_kernel(const RatMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  RatMatrix a = m;
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(p, j));
    const Rat lead = a(r, c);
    for (std::size_t j = 0; j < cols; ++j) a(r, j) /= lead;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) continue;
      const Rat f = a(i, c);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<RatVec> out;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RatVec x(cols);
    x[free] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) x[pivot_cols[i]] = -a(i, free);
    out.push_back(std::move(x));
  }
  return out;
}

inline std::size_t rational_rank(const RatMatrix& m) {
  return m.cols() - rational_kernel(m).size();
}

/// Solves an upper triangular system with nonzero diagonal over Q.
inline RatVec solve_upper_triangular(const RatMatrix& u, const RatVec& b) {
  const std::size_t n = u.rows();
  if (!u.is_square() || b.size() != n) throw DimensionError("triangular solve: shape mismatch");
  RatVec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Rat s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= u(ii, k) * x[k];
    if (u(ii, ii) == 0) throw PreconditionError("triangular solve: zero diagonal");
    x[ii] = s / u(ii, ii);
  }
  return x;
}

}  // namespace nilwb
