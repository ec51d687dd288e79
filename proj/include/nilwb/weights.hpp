#pragma once

#include "nilwb/dense_matrix.hpp"
#include "nilwb/uni_matrix.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilwb {

class WeightError : public std::invalid_argument {
 public:
  enum class Kind { zero_weight, bad_class, degenerate, not_templated };

  WeightError(Kind kind, std::string what, std::size_t p = 0, std::size_t q = 0)
      : std::invalid_argument(std::move(what)), kind_(kind), p_(p), q_(q) {}

  Kind kind() const { return kind_; }
  /// 1-based entry (p, q) that triggered the error, when meaningful.
  std::size_t p() const { return p_; }
  std::size_t q() const { return q_; }

 private:
  Kind kind_;
  std::size_t p_, q_;
};

/// Consecutive weights (k_{34}, k_{45}, ..., k_{c-1,c}) for one generator.
class WeightVector {
 public:
  WeightVector(std::size_t c, std::vector<Int> weights) : c_(c), w_(std::move(weights)) {
    if (c_ < 4) throw WeightError(WeightError::Kind::bad_class, "class parameter c must be at least 4");
    if (w_.size() != c_ - 3)
      throw WeightError(WeightError::Kind::bad_class, "weight vector must have exactly c-3 entries");
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] == 0)
        throw WeightError(WeightError::Kind::zero_weight, "weights must be nonzero", i + 3, i + 4);
  }

  /// Length c-3 determines c.
  static WeightVector of(std::vector<Int> weights) {
    const std::size_t c = weights.size() + 3;
    return WeightVector(c, std::move(weights));
  }

  std::size_t c() const { return c_; }
  const std::vector<Int>& weights() const { return w_; }
  /// k_{i,i+1} for 3 <= i < c.
  const Int& consecutive(std::size_t i) const { return w_.at(i - 3); }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.c_ == b.c_ && a.w_ == b.w_;
  }

 private:
  std::size_t c_;
  std::vector<Int> w_;
};

/// Full table k_{ij}, 3 <= i < j <= c.
class WeightTable {
 public:
  std::size_t c() const { return c_; }
  const Int& at(std::size_t i, std::size_t j) const { return table_.at({i, j}); }
  const std::map<std::pair<std::size_t, std::size_t>, Int>& entries() const { return table_; }

  /// First triple (i, j, t) with k_{ij} k_{jt} != k_{it}.
  std::optional<std::array<std::size_t, 3>> pascal_violation() const {
    for (std::size_t i = 3; i <= c_; ++i)
      for (std::size_t j = i + 1; j <= c_; ++j)
        for (std::size_t t = j + 1; t <= c_; ++t)
          if (at(i, j) * at(j, t) != at(i, t)) return std::array<std::size_t, 3>{i, j, t};
    return std::nullopt;
  }

  friend WeightTable pascal_table(const WeightVector& w);

 private:
  std::size_t c_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, Int> table_;
};

inline WeightTable pascal_table(const WeightVector& w) {
  WeightTable t;
  t.c_ = w.c();
  for (std::size_t i = 3; i <= w.c(); ++i) {
    Int acc = 1;
    for (std::size_t j = i + 1; j <= w.c(); ++j) {
      acc *= w.consecutive(j - 1);
      t.table_[{i, j}] = acc;
    }
  }
  if (auto v = t.pascal_violation())
    throw std::logic_error("pascal_table: k_ij k_jt != k_it in a product table");
  return t;
}

/// (c-2)x(c-2) unitriangular matrix whose (p, q) entry is the product of the
/// consecutive weights between rows p and q.
inline UniMatrix template_matrix(const WeightVector& w) {
  const std::size_t n = w.c() - 2;
  IntMatrix m = IntMatrix::identity(n);
  for (std::size_t p = 0; p < n; ++p) {
    Int acc = 1;
    for (std::size_t q = p + 1; q < n; ++q) {
      acc *= w.weights()[q - 1];
      m(p, q) = acc;
    }
  }
  return UniMatrix(std::move(m));
}

/// Inverse of template_matrix; throws WeightError with a 1-based witness.
inline WeightVector extract_weights(const UniMatrix& m) {
  const std::size_t n = m.dim();
  if (n < 2) throw WeightError(WeightError::Kind::bad_class, "template matrices have dimension at least 2");
  std::vector<Int> w;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    if (m(p, p + 1) == 0)
      throw WeightError(WeightError::Kind::degenerate, "degenerate weight: zero superdiagonal entry", p + 1,
                        p + 2);
    w.push_back(m(p, p + 1));
  }
  for (std::size_t p = 0; p < n; ++p) {
    Int acc = 1;
    for (std::size_t q = p + 1; q < n; ++q) {
      acc *= w[q - 1];
      if (m(p, q) != acc)
        throw WeightError(WeightError::Kind::not_templated,
                          "not weight-templated: entry (" + std::to_string(p + 1) + "," +
                              std::to_string(q + 1) + ") is " + m(p, q).get_str() + ", expected " +
                              acc.get_str(),
                          p + 1, q + 1);
    }
  }
  return WeightVector::of(std::move(w));
}

/// First non-commuting pair among a list of action matrices.
struct CommutationWitness {
  std::size_t i = 0, j = 0;    // 0-based matrix indices, i < j
  std::size_t row = 0, col = 0;  // 1-based entry where A_i A_j and A_j A_i differ
  Int lhs, rhs;                  // (A_i A_j)(row,col) and (A_j A_i)(row,col)
  IntMatrix product_ij, product_ji;

  std::string str() const {
    return "A" + std::to_string(i + 1) + "A" + std::to_string(j + 1) + " and A" + std::to_string(j + 1) +
           "A" + std::to_string(i + 1) + " differ at entry (" + std::to_string(row) + "," +
           std::to_string(col) + "): " + lhs.get_str() + " vs " + rhs.get_str();
  }
};

inline std::optional<CommutationWitness> action_well_defined(const std::vector<UniMatrix>& mats) {
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) {
      if (mats[i].dim() != mats[j].dim()) throw DimensionError("action matrices differ in dimension");
      const UniMatrix ab = mats[i] * mats[j];
      const UniMatrix ba = mats[j] * mats[i];
      if (auto at = first_difference(ab.matrix(), ba.matrix())) {
        CommutationWitness w;
        w.i = i;
        w.j = j;
        w.row = at->first + 1;
        w.col = at->second + 1;
        w.lhs = ab(at->first, at->second);
        w.rhs = ba(at->first, at->second);
        w.product_ij = ab.matrix();
        w.product_ji = ba.matrix();
        return w;
      }
    }
  return std::nullopt;
}

/// Cross-proportionality of two weight vectors of equal length.
inline bool cross_proportional(const WeightVector& a, const WeightVector& b) {
  if (a.c() != b.c()) throw DimensionError("weight vectors have different class parameters");
  const auto& x = a.weights();
  const auto& y = b.weights();
  for (std::size_t p = 0; p < x.size(); ++p)
    for (std::size_t q = p + 1; q < x.size(); ++q)
      if (x[p] * y[q] != y[p] * x[q]) return false;
  return true;
}

}  // namespace nilwb
