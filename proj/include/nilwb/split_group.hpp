#pragma once

#include "nilwb/lattice.hpp"
#include "nilwb/rational_span.hpp"
#include "nilwb/uni_matrix.hpp"
#include "nilwb/unipotent_log.hpp"
#include "nilwb/weights.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilwb {

/// Element (v, eps) of Z^d x| Z^r.
struct SplitElement {
  IntVec v;
  IntVec eps;

  bool is_identity() const { return nilwb::is_zero(v) && nilwb::is_zero(eps); }
  bool in_fiber() const { return nilwb::is_zero(eps); }

  friend bool operator==(const SplitElement& a, const SplitElement& b) {
    return a.v == b.v && a.eps == b.eps;
  }
  friend bool operator!=(const SplitElement& a, const SplitElement& b) { return !(a == b); }
  friend bool operator<(const SplitElement& a, const SplitElement& b) {
    if (a.v != b.v) return a.v < b.v;
    return a.eps < b.eps;
  }

  /// Rendered as ((v),(eps)).
  std::string str() const { return "(" + vec_str(v) + "," + vec_str(eps) + ")"; }
};

class NonCommutingActionError : public PreconditionError {
 public:
  explicit NonCommutingActionError(CommutationWitness w)
      : PreconditionError("action matrices do not commute: " + w.str()), witness_(std::move(w)) {}
  const CommutationWitness& witness() const { return witness_; }

 private:
  CommutationWitness witness_;
};

/// The split group Z^d x|_Phi Z^r with Phi(eps) = A_1^{eps_1} ... A_r^{eps_r}
/// for pairwise commuting unitriangular A_j.
class SplitGroup {
 public:
  static SplitGroup build(std::size_t d, std::size_t r, std::vector<UniMatrix> action) {
    if (d == 0) throw DimensionError("fiber rank d must be positive");
    if (action.size() != r) throw DimensionError("expected r action matrices");
    for (const auto& a : action)
      if (a.dim() != d) throw DimensionError("action matrix dimension differs from d");
    if (auto w = action_well_defined(action)) throw NonCommutingActionError(*w);
    return SplitGroup(d, r, std::move(action));
  }

  std::size_t d() const { return d_; }
  std::size_t r() const { return r_; }
  const std::vector<UniMatrix>& action() const { return a_; }
  /// log A_j.
  const std::vector<RatMatrix>& action_logs() const { return x_; }

  UniMatrix phi(const IntVec& eps) const {
    check_base(eps);
    UniMatrix acc = UniMatrix::identity(d_);
    for (std::size_t j = 0; j < r_; ++j)
      if (eps[j] != 0) acc = acc * a_[j].pow(eps[j]);
    return acc;
  }

  /// X(eps) = sum eps_j log A_j, so Phi(eps) = exp X(eps).
  RatMatrix x_of(const IntVec& eps) const { return x_of(to_rational(eps)); }
  RatMatrix x_of(const RatVec& eps) const {
    RatMatrix acc(d_, d_);
    for (std::size_t j = 0; j < r_; ++j)
      if (eps[j] != 0) acc = acc + eps[j] * x_[j];
    return acc;
  }

  /// {eps : Phi(eps) = I}, computed from the linear dependencies among the logs.
  const IntLattice& kernel_of_phi() const { return ker_phi_; }

  SplitElement identity() const { return {IntVec(d_), IntVec(r_)}; }
  SplitElement fiber_element(IntVec v) const {
    check_fiber(v);
    return {std::move(v), IntVec(r_)};
  }
  SplitElement base_element(IntVec eps) const {
    check_base(eps);
    return {IntVec(d_), std::move(eps)};
  }
  /// (e_1,0), ..., (e_d,0), (0,e_1), ..., (0,e_r).
  std::vector<SplitElement> generators() const {
    std::vector<SplitElement> g;
    for (std::size_t k = 0; k < d_; ++k) g.push_back(fiber_element(unit_vector(d_, k)));
    for (std::size_t j = 0; j < r_; ++j) g.push_back(base_element(unit_vector(r_, j)));
    return g;
  }

  void check(const SplitElement& x) const {
    check_fiber(x.v);
    check_base(x.eps);
  }

  SplitElement mul(const SplitElement& x, const SplitElement& y) const {
    check(x);
    check(y);
    return {x.v + phi(x.eps) * y.v, x.eps + y.eps};
  }

  SplitElement inv(const SplitElement& x) const {
    check(x);
    return {-(phi(-x.eps) * x.v), -x.eps};
  }

  SplitElement pow(const SplitElement& x, const Int& n) const {
    check(x);
    SplitElement base = n < 0 ? inv(x) : x;
    const Int k = abs(n);
    SplitElement acc = identity();
    const std::size_t bits = k == 0 ? 0 : mpz_sizeinbase(k.get_mpz_t(), 2);
    for (std::size_t b = bits; b-- > 0;) {
      acc = mul(acc, acc);
      if (mpz_tstbit(k.get_mpz_t(), b)) acc = mul(acc, base);
    }
    return acc;
  }
  SplitElement pow(const SplitElement& x, long n) const { return pow(x, Int(n)); }

  /// x^y = y^-1 x y.
  SplitElement conj(const SplitElement& x, const SplitElement& y) const { return mul(mul(inv(y), x), y); }

  /// [x, y] = x^-1 y^-1 x y via the closed form
  /// (Phi(-eps)(Phi(-delta) - I) v + (I - Phi(-eps)) Phi(-delta) b, 0).
  SplitElement commutator(const SplitElement& x, const SplitElement& y) const {
    check(x);
    check(y);
    const IntMatrix pe = phi(-x.eps).matrix();
    const IntMatrix pd = phi(-y.eps).matrix();
    const IntMatrix id = IntMatrix::identity(d_);
    SplitElement out{pe * ((pd - id) * x.v) + (id - pe) * (pd * y.v), IntVec(r_)};
#ifndef NDEBUG
    if (out != commutator_literal(x, y)) throw std::logic_error("split commutator closed form disagrees");
#endif
    return out;
  }

  SplitElement commutator_literal(const SplitElement& x, const SplitElement& y) const {
    return mul(mul(inv(x), inv(y)), mul(x, y));
  }

  bool commute(const SplitElement& x, const SplitElement& y) const {
    return commutator(x, y).is_identity();
  }

  /// Unique x with x^n = target, if one exists.
  std::optional<SplitElement> root(const SplitElement& target, const Int& n) const {
    check(target);
    if (n == 0) throw PreconditionError("root: exponent must be nonzero");
    if (n < 0) {
      auto x = root(target, Int(-n));
      if (!x) return std::nullopt;
      return inv(*x);
    }
    IntVec eps(r_);
    for (std::size_t j = 0; j < r_; ++j) {
      if (!mpz_divisible_p(target.eps[j].get_mpz_t(), n.get_mpz_t())) return std::nullopt;
      eps[j] = target.eps[j] / n;
    }
    const IntMatrix s = geometric_sum(phi(eps).matrix(), n);
    const RatVec v = solve_upper_triangular(to_rational(s), to_rational(target.v));
    IntVec out(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      if (v[i].get_den() != 1) return std::nullopt;
      out[i] = v[i].get_num();
    }
    return SplitElement{std::move(out), std::move(eps)};
  }
  std::optional<SplitElement> root(const SplitElement& target, long n) const { return root(target, Int(n)); }

  /// Mal'cev coordinates: log(b, delta) = (phi(X(delta))^-1 b, delta) with
  /// phi(X) = sum X^k / (k+1)!.
  RatVec log(const SplitElement& x) const {
    check(x);
    const RatMatrix xd = x_of(x.eps);
    RatMatrix phi_m = RatMatrix::identity(d_);
    RatMatrix term = RatMatrix::identity(d_);
    for (std::size_t k = 1; k < d_; ++k) {
      term = Rat(1, static_cast<unsigned long>(k + 1)) * (term * xd);
      if (term.is_zero()) break;
      phi_m = phi_m + term;
    }
    RatVec out = solve_upper_triangular(phi_m, to_rational(x.v));
    for (const auto& e : x.eps) out.emplace_back(e);
    return out;
  }

  /// Lie bracket on Q^d + Q^r: [(a, eps), (b, delta)] = (X(eps) b - X(delta) a, 0).
  RatVec bracket(const RatVec& p, const RatVec& q) const {
    const RatVec a(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(d_));
    const RatVec b(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(d_));
    const RatVec e(p.begin() + static_cast<std::ptrdiff_t>(d_), p.end());
    const RatVec f(q.begin() + static_cast<std::ptrdiff_t>(d_), q.end());
    RatVec out = x_of(e) * b;
    const RatVec t = x_of(f) * a;
    for (std::size_t i = 0; i < d_; ++i) out[i] -= t[i];
    out.resize(d_ + r_);
    return out;
  }

  /// Faithful representation in UT(m, Z): (v, eps) -> [[Phi(eps), v], [0, 1]],
  /// followed by 2x2 shear blocks carrying eps when Phi has a kernel.
  std::size_t embedding_dim() const { return d_ + 1 + (ker_phi_.is_zero() ? 0 : 2 * r_); }

  UniMatrix to_matrix(const SplitElement& x) const {
    check(x);
    IntMatrix m = IntMatrix::identity(embedding_dim());
    const UniMatrix p = phi(x.eps);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = i + 1; j < d_; ++j) m(i, j) = p(i, j);
      m(i, d_) = x.v[i];
    }
    if (!ker_phi_.is_zero())
      for (std::size_t j = 0; j < r_; ++j) m(d_ + 1 + 2 * j, d_ + 2 + 2 * j) = x.eps[j];
    return UniMatrix(std::move(m));
  }

  /// Inverse of to_matrix on its image.
  std::optional<SplitElement> from_matrix(const UniMatrix& m) const {
    if (m.dim() != embedding_dim()) return std::nullopt;
    SplitElement x = identity();
    for (std::size_t i = 0; i < d_; ++i) x.v[i] = m(i, d_);
    if (!ker_phi_.is_zero()) {
      for (std::size_t j = 0; j < r_; ++j) x.eps[j] = m(d_ + 1 + 2 * j, d_ + 2 + 2 * j);
    } else if (r_ > 0) {
      IntMatrix top(d_, d_);
      for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j) top(i, j) = m(i, j);
      if (!UniMatrix::is_unitriangular(top)) return std::nullopt;
      const RatMatrix target = unipotent_log(to_rational(top)).matrix();
      // columns: vec(X_1) ... vec(X_r), -vec(target)
      RatMatrix sys(d_ * d_, r_ + 1);
      for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t k = 0; k < d_; ++k) {
          for (std::size_t j = 0; j < r_; ++j) sys(i * d_ + k, j) = x_[j](i, k);
          sys(i * d_ + k, r_) = -target(i, k);
        }
      const auto ker = rational_kernel(sys);
      if (ker.size() != 1 || ker[0][r_] == 0) return std::nullopt;
      for (std::size_t j = 0; j < r_; ++j) {
        const Rat e = ker[0][j] / ker[0][r_];
        if (e.get_den() != 1) return std::nullopt;
        x.eps[j] = e.get_num();
      }
    }
    if (to_matrix(x) != m) return std::nullopt;
    return x;
  }

 private:
  SplitGroup(std::size_t d, std::size_t r, std::vector<UniMatrix> action)
      : d_(d), r_(r), a_(std::move(action)) {
    for (const auto& a : a_) x_.push_back(unipotent_log(a).matrix());
    // eps in ker Phi iff sum eps_j X_j = 0; clear denominators row by row.
    std::vector<IntVec> rows;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t k = 0; k < d_; ++k) {
        RatVec row(r_);
        for (std::size_t j = 0; j < r_; ++j) row[j] = x_[j](i, k);
        if (!nilwb::is_zero(row)) rows.push_back(clear_denominators(row));
      }
    ker_phi_ = integer_kernel(IntMatrix::from_rows(rows, r_));
  }

  static IntMatrix geometric_sum(const IntMatrix& p, const Int& n) {
    // (S_m, P^m) with S_m = I + P + ... + P^{m-1}, built from the top bit down
    const std::size_t dim = p.rows();
    IntMatrix s(dim, dim);
    IntMatrix pm = IntMatrix::identity(dim);
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (std::size_t b = bits; b-- > 0;) {
      s = s + pm * s;
      pm = pm * pm;
      if (mpz_tstbit(n.get_mpz_t(), b)) {
        s = s + pm;
        pm = pm * p;
      }
    }
    return s;
  }

  void check_fiber(const IntVec& v) const {
    if (v.size() != d_) throw DimensionError("fiber vector length differs from d");
  }
  void check_base(const IntVec& e) const {
    if (e.size() != r_) throw DimensionError("base vector length differs from r");
  }

  std::size_t d_ = 0, r_ = 0;
  std::vector<UniMatrix> a_;
  std::vector<RatMatrix> x_;
  IntLattice ker_phi_;
};

/// Entry where the ordered product A^{eps+delta} differs from A^eps A^delta.
struct OrderedProductDefect {
  IntVec eps, delta;
  IntMatrix phi_sum, phi_product;
  std::size_t row = 0, col = 0;  // 1-based
  Int sum_value, product_value;
};

struct AssociativityWitness {
  SplitElement x, y, z;
  IntVec left, right;  // fiber parts of (xy)z and x(yz)
  std::size_t sample = 0;
  OrderedProductDefect defect;
};

/// eps -> A_1^{eps_1} ... A_r^{eps_r} taken literally, without assuming the A_j commute.
inline UniMatrix ordered_product(const std::vector<UniMatrix>& action, const IntVec& eps) {
  if (action.empty()) throw DimensionError("ordered product of an empty action");
  UniMatrix acc = UniMatrix::identity(action.front().dim());
  for (std::size_t j = 0; j < action.size(); ++j)
    if (eps[j] != 0) acc = acc * action[j].pow(eps[j]);
  return acc;
}

inline std::optional<OrderedProductDefect> ordered_product_defect(const std::vector<UniMatrix>& action,
                                                                  const IntVec& eps, const IntVec& delta) {
  OrderedProductDefect d;
  d.eps = eps;
  d.delta = delta;
  d.phi_sum = ordered_product(action, eps + delta).matrix();
  d.phi_product = (ordered_product(action, eps) * ordered_product(action, delta)).matrix();
  auto at = first_difference(d.phi_sum, d.phi_product);
  if (!at) return std::nullopt;
  d.row = at->first + 1;
  d.col = at->second + 1;
  d.sum_value = d.phi_sum(at->first, at->second);
  d.product_value = d.phi_product(at->first, at->second);
  return d;
}

/// Tests (xy)z = x(yz) for the multiplication (v,eps)(b,delta) = (v + P(eps) b, eps + delta)
/// where P is the ordered product, on seeded triples with coordinates in [-3, 3].
inline std::optional<AssociativityWitness> associativity_probe(std::size_t d, std::size_t r,
                                                               const std::vector<UniMatrix>& action,
                                                               std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("associativity_probe needs at least one sample");
  if (action.size() != r) throw DimensionError("expected r action matrices");
  for (const auto& a : action)
    if (a.dim() != d) throw DimensionError("action matrix dimension differs from d");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coord(-3, 3);
  auto draw = [&] {
    SplitElement e{IntVec(d), IntVec(r)};
    for (auto& x : e.v) x = coord(rng);
    for (auto& x : e.eps) x = coord(rng);
    return e;
  };
  auto mul = [&](const SplitElement& x, const SplitElement& y) {
    return SplitElement{x.v + ordered_product(action, x.eps) * y.v, x.eps + y.eps};
  };
  for (std::size_t s = 0; s < samples; ++s) {
    SplitElement x = draw(), y = draw(), z = draw();
    const SplitElement left = mul(mul(x, y), z);
    const SplitElement right = mul(x, mul(y, z));
    if (left != right) {
      AssociativityWitness w{x, y, z, left.v, right.v, s, {}};
      // the fiber defect is (P(eps+delta) - P(eps)P(delta)) c
      w.defect = *ordered_product_defect(action, x.eps, y.eps);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace nilwb
