#pragma once

#include "nilwb/dense_matrix.hpp"
#include "nilwb/uni_matrix.hpp"

#include <cstddef>
#include <optional>
#include <utility>

namespace nilwb {

/// Strictly upper triangular rational matrix; nilpotent by shape.
class RationalNilMatrix {
 public:
  explicit RationalNilMatrix(std::size_t n) : m_(n, n) {}
  explicit RationalNilMatrix(RatMatrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw DimensionError("nilpotent matrix must be square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        if (m_(i, j) != 0) throw PreconditionError("matrix is not strictly upper triangular");
  }

  std::size_t dim() const { return m_.rows(); }
  const RatMatrix& matrix() const { return m_; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  bool is_zero() const { return m_.is_zero(); }

  friend RationalNilMatrix operator+(const RationalNilMatrix& a, const RationalNilMatrix& b) {
    return RationalNilMatrix(a.m_ + b.m_, Trusted{});
  }
  friend RationalNilMatrix operator*(const Rat& s, const RationalNilMatrix& a) {
    return RationalNilMatrix(s * a.m_, Trusted{});
  }
  /// Lie bracket XY - YX.
  friend RationalNilMatrix bracket(const RationalNilMatrix& a, const RationalNilMatrix& b) {
    return RationalNilMatrix(a.m_ * b.m_ - b.m_ * a.m_, Trusted{});
  }
  friend bool operator==(const RationalNilMatrix& a, const RationalNilMatrix& b) {
    return a.m_ == b.m_;
  }

  /// Strictly-upper entries in row-major order: coordinates in the Lie
  /// algebra of strictly upper triangular matrices.
  RatVec coords() const {
    RatVec out;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = i + 1; j < dim(); ++j) out.push_back(m_(i, j));
    return out;
  }
  static RationalNilMatrix from_coords(std::size_t n, const RatVec& c) {
    if (c.size() != n * (n - 1) / 2) throw DimensionError("coordinate vector length mismatch");
    RatMatrix m(n, n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m(i, j) = c[k++];
    return RationalNilMatrix(std::move(m), Trusted{});
  }

 private:
  struct Trusted {};
  RationalNilMatrix(RatMatrix m, Trusted) : m_(std::move(m)) {}
  RatMatrix m_;
};

/// log(I + N) = N - N^2/2 + N^3/3 - ...; the series stops before N^n.
inline RationalNilMatrix unipotent_log(const RatMatrix& u) {
  const std::size_t n = u.rows();
  const RatMatrix nil = u - RatMatrix::identity(n);
  RatMatrix acc(n, n);
  RatMatrix power = nil;
  for (std::size_t k = 1; k < n && !power.is_zero(); ++k) {
    const Rat coeff(k % 2 == 1 ? 1 : -1, static_cast<unsigned long>(k));
    acc = acc + coeff * power;
    power = power * nil;
  }
  return RationalNilMatrix(std::move(acc));
}

inline RationalNilMatrix unipotent_log(const UniMatrix& u) { return unipotent_log(to_rational(u.matrix())); }

/// exp(X) = sum X^k / k!; finite for nilpotent X.
inline RatMatrix unipotent_exp(const RationalNilMatrix& x) {
  const std::size_t n = x.dim();
  RatMatrix acc = RatMatrix::identity(n);
  RatMatrix term = RatMatrix::identity(n);
  for (std::size_t k = 1; k < n; ++k) {
    term = Rat(1, static_cast<unsigned long>(k)) * (term * x.matrix());
    if (term.is_zero()) break;
    acc = acc + term;
  }
  return acc;
}

/// exp(X) as an integer matrix, when every entry is integral.
inline std::optional<UniMatrix> unipotent_exp_integral(const RationalNilMatrix& x) {
  const RatMatrix e = unipotent_exp(x);
  IntMatrix out(e.rows(), e.cols());
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j) {
      if (e(i, j).get_den() != 1) return std::nullopt;
      out(i, j) = e(i, j).get_num();
    }
  return UniMatrix(std::move(out));
}

}  // namespace nilwb
