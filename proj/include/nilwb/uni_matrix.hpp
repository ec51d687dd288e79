#pragma once

#include "nilwb/dense_matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace nilwb {

/// Unit upper triangular integer matrix: an element of UT(n, Z).
///
/// The invariant (ones on the diagonal, zeros below) is checked on
/// construction and preserved by every operation below.
class UniMatrix {
 public:
  UniMatrix() : m_(IntMatrix::identity(1)) {}
  explicit UniMatrix(IntMatrix m) : m_(std::move(m)) {
    if (!is_unitriangular(m_)) throw PreconditionError("matrix is not unit upper triangular");
  }
  UniMatrix(std::initializer_list<std::initializer_list<Int>> rows)
      : UniMatrix(IntMatrix(rows)) {}

  static UniMatrix identity(std::size_t n) { return UniMatrix(IntMatrix::identity(n), Trusted{}); }

  /// I + value * E_{ij}, 0-based, i < j.
  static UniMatrix elementary(std::size_t n, std::size_t i, std::size_t j, const Int& value = 1) {
    if (i >= j || j >= n) throw DimensionError("elementary matrix needs i < j < n");
    IntMatrix m = IntMatrix::identity(n);
    m(i, j) = value;
    return UniMatrix(std::move(m), Trusted{});
  }

  static bool is_unitriangular(const IntMatrix& m) {
    if (!m.is_square() || m.rows() == 0) return false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, i) != 1) return false;
      for (std::size_t j = 0; j < i; ++j)
        if (m(i, j) != 0) return false;
    }
    return true;
  }

  std::size_t dim() const { return m_.rows(); }
  const Int& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const IntMatrix& matrix() const { return m_; }
  bool is_identity() const { return m_ == IntMatrix::identity(dim()); }

  /// Strictly upper part N = U - I.
  IntMatrix nilpotent_part() const { return m_ - IntMatrix::identity(dim()); }

  friend UniMatrix operator*(const UniMatrix& a, const UniMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("UT product: dimension mismatch");
    const std::size_t n = a.dim();
    IntMatrix c = IntMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Int s = 0;
        for (std::size_t k = i; k <= j; ++k) s += a(i, k) * b(k, j);
        c(i, j) = s;
      }
    return UniMatrix(std::move(c), Trusted{});
  }

  friend IntVec operator*(const UniMatrix& a, const IntVec& v) { return a.m_ * v; }

  UniMatrix inverse() const {
    const std::size_t n = dim();
    IntMatrix x = IntMatrix::identity(n);
    // back substitution column by column: U X = I
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t ii = j; ii-- > 0;) {
        Int s = 0;
        for (std::size_t k = ii + 1; k <= j; ++k) s += m_(ii, k) * x(k, j);
        x(ii, j) = -s;
      }
    return UniMatrix(std::move(x), Trusted{});
  }

  UniMatrix pow(const Int& e) const {
    UniMatrix base = e < 0 ? inverse() : *this;
    Int k = abs(e);
    UniMatrix acc = identity(dim());
    const std::size_t bits = k == 0 ? 0 : mpz_sizeinbase(k.get_mpz_t(), 2);
    for (std::size_t b = bits; b-- > 0;) {
      acc = acc * acc;
      if (mpz_tstbit(k.get_mpz_t(), b)) acc = acc * base;
    }
    return acc;
  }
  UniMatrix pow(long e) const { return pow(Int(e)); }

  friend bool operator==(const UniMatrix& a, const UniMatrix& b) { return a.m_ == b.m_; }
  friend bool operator!=(const UniMatrix& a, const UniMatrix& b) { return !(a == b); }
  /// Lexicographic on (dimension, row-major entries).
  friend bool operator<(const UniMatrix& a, const UniMatrix& b) { return a.m_ < b.m_; }

  std::string str() const { return m_.str(); }

 private:
  struct Trusted {};
  UniMatrix(IntMatrix m, Trusted) : m_(std::move(m)) {}

  IntMatrix m_;
};

inline UniMatrix mul(const UniMatrix& a, const UniMatrix& b) { return a * b; }
inline UniMatrix inv(const UniMatrix& a) { return a.inverse(); }
inline UniMatrix pow(const UniMatrix& a, const Int& e) { return a.pow(e); }

/// [a, b] = a^-1 b^-1 a b.
inline UniMatrix commutator(const UniMatrix& a, const UniMatrix& b) {
  return a.inverse() * b.inverse() * a * b;
}

inline bool commute(const UniMatrix& a, const UniMatrix& b) { return a * b == b * a; }

/// First entry (row-major, 0-based) where two equal-size matrices differ.
inline std::optional<std::pair<std::size_t, std::size_t>> first_difference(const IntMatrix& a,
                                                                          const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shapes differ");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return std::make_pair(i, j);
  return std::nullopt;
}

}  // namespace nilwb
