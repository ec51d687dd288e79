#pragma once

#include "nilwb/dense_matrix.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilwb {

/// Raised when an index [M : L] is requested but L is not contained in M.
class ContainmentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void floor_reduce(IntVec& target, const IntVec& pivot_row, std::size_t col) {
  if (target[col] == 0) return;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), target[col].get_mpz_t(), pivot_row[col].get_mpz_t());
  if (q == 0) return;
  for (std::size_t k = col; k < target.size(); ++k) target[k] -= q * pivot_row[k];
}

/// Row-style Hermite normal form in place over the first `width` columns of
/// each row. Zero rows are dropped; returns the pivot column of each kept row.
/// Rows may be longer than `width`; trailing entries are carried along.
inline std::vector<std::size_t> hnf_in_place(std::vector<IntVec>& a, std::size_t width) {
  std::vector<std::size_t> pivots;
  const std::size_t m = a.size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < width && r < m; ++col) {
    for (std::size_t i = r + 1; i < m; ++i) {
      if (a[i][col] == 0) continue;
      if (a[r][col] == 0) {
        std::swap(a[r], a[i]);
        continue;
      }
      if (mpz_divisible_p(a[i][col].get_mpz_t(), a[r][col].get_mpz_t())) {
        const Int q = a[i][col] / a[r][col];
        for (std::size_t k = col; k < a[i].size(); ++k) a[i][k] -= q * a[r][k];
        continue;
      }
      Int g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[r][col].get_mpz_t(),
                 a[i][col].get_mpz_t());
      const Int p = a[r][col] / g;
      const Int q = a[i][col] / g;
      for (std::size_t k = col; k < a[r].size(); ++k) {
        const Int x = a[r][k];
        const Int y = a[i][k];
        a[r][k] = s * x + t * y;
        a[i][k] = p * y - q * x;
      }
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (std::size_t k = col; k < a[r].size(); ++k) a[r][k] = -a[r][k];
    for (std::size_t k = 0; k < r; ++k) floor_reduce(a[k], a[r], col);
    pivots.push_back(col);
    ++r;
  }
  // rows left below r are zero on the first `width` columns
  a.resize(r);
  return pivots;
}

}  // namespace detail

/// Sublattice of Z^a stored by its canonical row-style Hermite basis:
/// positive pivots, entries above each pivot reduced into [0, pivot).
/// Two lattices are equal iff their stored bases are identical.
class IntLattice {
 public:
  IntLattice() = default;
  explicit IntLattice(std::size_t ambient) : ambient_(ambient) {}

  /// hnf: canonical basis of the Z-span of `rows`.
  static IntLattice span(std::vector<IntVec> rows, std::size_t ambient) {
    for (const auto& r : rows)
      if (r.size() != ambient) throw DimensionError("lattice generator has wrong length");
    IntLattice out(ambient);
    out.pivots_ = detail::hnf_in_place(rows, ambient);
    out.basis_ = std::move(rows);
    return out;
  }
  static IntLattice zero(std::size_t ambient) { return IntLattice(ambient); }
  static IntLattice full(std::size_t ambient) {
    std::vector<IntVec> rows;
    for (std::size_t i = 0; i < ambient; ++i) rows.push_back(unit_vector(ambient, i));
    return span(std::move(rows), ambient);
  }

  std::size_t ambient() const { return ambient_; }
  std::size_t rank() const { return basis_.size(); }
  const std::vector<IntVec>& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  bool is_zero() const { return basis_.empty(); }
  bool is_full() const {
    if (rank() != ambient_) return false;
    for (std::size_t i = 0; i < rank(); ++i)
      if (basis_[i][pivots_[i]] != 1) return false;
    return true;
  }

  /// Basis as a (rank x ambient) matrix.
  IntMatrix basis_matrix() const { return IntMatrix::from_rows(basis_, ambient_); }

  /// Integer coefficients c with v = sum c_i basis_i, if v lies in the lattice.
  std::optional<IntVec> coordinates(IntVec v) const {
    check(v);
    IntVec c(rank());
    for (std::size_t i = 0; i < rank(); ++i) {
      const std::size_t p = pivots_[i];
      if (!mpz_divisible_p(v[p].get_mpz_t(), basis_[i][p].get_mpz_t())) return std::nullopt;
      c[i] = v[p] / basis_[i][p];
      if (c[i] != 0)
        for (std::size_t k = p; k < ambient_; ++k) v[k] -= c[i] * basis_[i][k];
    }
    if (!nilwb::is_zero(v)) return std::nullopt;
    return c;
  }

  bool contains(const IntVec& v) const { return coordinates(v).has_value(); }
  bool contains(const IntLattice& other) const {
    check(other);
    for (const auto& b : other.basis_)
      if (!contains(b)) return false;
    return true;
  }

  /// Canonical coset representative of v modulo this lattice.
  IntVec reduce(IntVec v) const {
    check(v);
    for (std::size_t i = 0; i < rank(); ++i) detail::floor_reduce(v, basis_[i], pivots_[i]);
    return v;
  }

  IntLattice operator+(const IntLattice& other) const {
    check(other);
    std::vector<IntVec> rows = basis_;
    rows.insert(rows.end(), other.basis_.begin(), other.basis_.end());
    return span(std::move(rows), ambient_);
  }

  IntLattice intersect(const IntLattice& other) const;

  friend bool operator==(const IntLattice& a, const IntLattice& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }
  friend bool operator!=(const IntLattice& a, const IntLattice& b) { return !(a == b); }
  friend bool operator<(const IntLattice& a, const IntLattice& b) {
    if (a.ambient_ != b.ambient_) return a.ambient_ < b.ambient_;
    return a.basis_ < b.basis_;
  }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < rank(); ++i) s += (i ? "," : "") + vec_str(basis_[i]);
    return s + "}";
  }

 private:
  void check(const IntVec& v) const {
    if (v.size() != ambient_) throw DimensionError("vector length differs from lattice ambient");
  }
  void check(const IntLattice& o) const {
    if (o.ambient_ != ambient_) throw DimensionError("lattice ambient dimensions differ");
  }

  std::size_t ambient_ = 0;
  std::vector<IntVec> basis_;
  std::vector<std::size_t> pivots_;
};

inline IntLattice hnf(std::vector<IntVec> rows, std::size_t ambient) {
  return IntLattice::span(std::move(rows), ambient);
}

/// {y in Z^m : sum_i y_i rows_i = 0} for m rows of length `width`.
inline IntLattice left_kernel(const std::vector<IntVec>& rows, std::size_t width) {
  const std::size_t m = rows.size();
  std::vector<IntVec> aug;
  aug.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != width) throw DimensionError("left_kernel: ragged rows");
    IntVec r = rows[i];
    r.resize(width + m);
    r[width + i] = 1;
    aug.push_back(std::move(r));
  }
  const auto piv = detail::hnf_in_place(aug, width + m);
  std::vector<IntVec> kern;
  for (std::size_t i = 0; i < aug.size(); ++i)
    if (piv[i] >= width) kern.emplace_back(aug[i].begin() + static_cast<std::ptrdiff_t>(width), aug[i].end());
  return hnf(std::move(kern), m);
}

/// Lattice of all integer v with M v = 0.
inline IntLattice integer_kernel(const IntMatrix& m) {
  return left_kernel(m.transpose().to_rows(), m.rows());
}

/// Column span of M, a sublattice of Z^{rows(M)}.
inline IntLattice image_lattice(const IntMatrix& m) {
  return hnf(m.transpose().to_rows(), m.rows());
}

/// M L = {M v : v in L}.
inline IntLattice apply(const IntMatrix& m, const IntLattice& l) {
  if (m.cols() != l.ambient()) throw DimensionError("apply: matrix columns differ from lattice ambient");
  std::vector<IntVec> rows;
  for (const auto& b : l.basis()) rows.push_back(m * b);
  return hnf(std::move(rows), m.rows());
}

/// {v : M v in L}.
inline IntLattice preimage_lattice(const IntMatrix& m, const IntLattice& l) {
  if (m.rows() != l.ambient()) throw DimensionError("preimage: matrix rows differ from lattice ambient");
  const std::size_t q = m.cols();
  const std::size_t k = l.rank();
  // kernel of [M | -B^T] projected onto the first q coordinates
  IntMatrix aug(m.rows(), q + k);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < q; ++j) aug(i, j) = m(i, j);
    for (std::size_t j = 0; j < k; ++j) aug(i, q + j) = -l.basis()[j][i];
  }
  const IntLattice ker = integer_kernel(aug);
  std::vector<IntVec> proj;
  for (const auto& b : ker.basis()) proj.emplace_back(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(q));
  return hnf(std::move(proj), q);
}

/// Some integer solution of M v = rhs, if one exists.
inline std::optional<IntVec> solve_integer(const IntMatrix& m, const IntVec& rhs) {
  if (rhs.size() != m.rows()) throw DimensionError("solve_integer: rhs length mismatch");
  // kernel of [-rhs | M] on (t, v); solvable iff t = 1 is attained
  IntMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    aug(i, 0) = -rhs[i];
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j + 1) = m(i, j);
  }
  const IntLattice ker = integer_kernel(aug);
  if (ker.rank() == 0 || ker.pivots()[0] != 0 || ker.basis()[0][0] != 1) return std::nullopt;
  const IntVec& row = ker.basis()[0];
  return IntVec(row.begin() + 1, row.end());
}

inline IntLattice IntLattice::intersect(const IntLattice& other) const {
  check(other);
  std::vector<IntVec> stacked = basis_;
  stacked.insert(stacked.end(), other.basis_.begin(), other.basis_.end());
  const IntLattice ker = left_kernel(stacked, ambient_);
  std::vector<IntVec> rows;
  for (const auto& y : ker.basis()) {
    IntVec v(ambient_);
    for (std::size_t i = 0; i < rank(); ++i)
      if (y[i] != 0)
        for (std::size_t k = 0; k < ambient_; ++k) v[k] += y[i] * basis_[i][k];
    rows.push_back(std::move(v));
  }
  return hnf(std::move(rows), ambient_);
}

/// Smallest saturated lattice containing L: (L tensor Q) intersected with Z^a.
inline IntLattice saturate(const IntLattice& l) {
  if (l.rank() == 0) return l;
  const IntLattice perp = integer_kernel(l.basis_matrix());
  if (perp.rank() == 0) return IntLattice::full(l.ambient());
  return integer_kernel(perp.basis_matrix());
}

inline bool is_saturated(const IntLattice& l) { return saturate(l) == l; }

/// Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.
inline std::vector<Int> smith_invariants(IntMatrix a) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<Int> diag;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block moves to (t, t)
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (a(i, j) != 0 && (!best || abs(a(i, j)) < abs(a(best->first, best->second))))
            best = std::make_pair(i, j);
      if (!best) return diag;
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(t, j), a(best->first, j));
      for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, t), a(i, best->second));

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
        for (std::size_t j = t; j < cols; ++j) a(i, j) -= q * a(t, j);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
        for (std::size_t i = t; i < rows; ++i) a(i, j) -= q * a(i, t);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility condition on the remaining block
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
            for (std::size_t k = t; k < cols; ++k) a(t, k) += a(i, k);
            divides = false;
            break;
          }
      if (divides) break;
    }
    diag.push_back(abs(a(t, t)));
  }
  return diag;
}

/// Index [M : L] of L inside M; `infinite` is set when the ranks differ.
struct LatticeIndex {
  bool infinite = false;
  Int value = 1;

  std::string str() const { return infinite ? std::string("infinite") : value.get_str(); }
  friend bool operator==(const LatticeIndex& a, const LatticeIndex& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

inline LatticeIndex index(const IntLattice& sub, const IntLattice& super) {
  if (!super.contains(sub)) throw ContainmentError("index: lattice is not contained in the larger one");
  if (sub.rank() != super.rank()) return {true, 0};
  Int num = 1, den = 1;
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    num *= sub.basis()[i][sub.pivots()[i]];
    den *= super.basis()[i][super.pivots()[i]];
  }
  return {false, num / den};
}

/// Invariant factors of the quotient super/sub restricted to torsion: the
/// Smith invariants of sub's basis written in super's coordinates.
inline std::vector<Int> relative_invariants(const IntLattice& sub, const IntLattice& super) {
  if (!super.contains(sub)) throw ContainmentError("relative_invariants: not a sublattice");
  if (sub.rank() == 0) return {};
  IntMatrix coords(sub.rank(), super.rank());
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    const IntVec c = *super.coordinates(sub.basis()[i]);
    for (std::size_t j = 0; j < super.rank(); ++j) coords(i, j) = c[j];
  }
  return smith_invariants(coords);
}

/// True iff super/sub is torsion-free.
inline bool quotient_torsion_free(const IntLattice& sub, const IntLattice& super) {
  for (const auto& d : relative_invariants(sub, super))
    if (d != 1) return false;
  return true;
}

}  // namespace nilwb
