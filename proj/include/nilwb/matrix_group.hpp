#pragma once

#include "nilwb/malcev.hpp"
#include "nilwb/uni_matrix.hpp"

#include <cstddef>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nilwb {

inline constexpr std::size_t kDefaultBallCap = 200000;

/// Cap from WORKBENCH_BALL_CAP if set to a positive integer, else the default.
inline std::size_t ball_cap_from_env() {
  if (const char* s = std::getenv("WORKBENCH_BALL_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultBallCap;
}

/// Finitely generated subgroup of UT(n, Z).
class MatrixGroup {
 public:
  MatrixGroup(std::size_t n, std::vector<UniMatrix> gens, std::vector<std::string> labels = {})
      : n_(n), gens_(std::move(gens)), labels_(std::move(labels)) {
    if (n_ == 0) throw DimensionError("matrix group dimension must be positive");
    for (const auto& g : gens_)
      if (g.dim() != n_) throw DimensionError("generator dimension differs from n");
    if (labels_.empty())
      for (std::size_t i = 0; i < gens_.size(); ++i) labels_.push_back("g" + std::to_string(i + 1));
    if (labels_.size() != gens_.size()) throw DimensionError("one label per generator expected");
  }

  /// UT(n, Z) with generators I + E_{i,i+1}.
  static MatrixGroup unitriangular(std::size_t n) {
    std::vector<UniMatrix> g;
    std::vector<std::string> l;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      g.push_back(UniMatrix::elementary(n, i, i + 1));
      l.push_back("e" + std::to_string(i + 1) + std::to_string(i + 2));
    }
    return MatrixGroup(n, std::move(g), std::move(l));
  }

  std::size_t n() const { return n_; }
  const std::vector<UniMatrix>& generators() const { return gens_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Letters are ordered g1, g1^-1, g2, g2^-1, ...
  std::size_t letter_count() const { return 2 * gens_.size(); }
  UniMatrix letter(std::size_t k) const { return k % 2 == 0 ? gens_[k / 2] : gens_[k / 2].inverse(); }
  std::string letter_name(std::size_t k) const { return labels_[k / 2] + (k % 2 == 0 ? "" : "^-1"); }

  NilpotentLieAlgebra lie_algebra() const { return NilpotentLieAlgebra::of_group(n_, gens_); }

 private:
  std::size_t n_;
  std::vector<UniMatrix> gens_;
  std::vector<std::string> labels_;
};

using Word = std::vector<std::size_t>;

/// Radius-R word ball with one lexicographically least shortest word per element.
class Ball {
 public:
  Ball(const MatrixGroup& g, std::size_t radius, std::size_t cap = ball_cap_from_env())
      : n_(g.n()), radius_(radius), cap_(cap) {
    std::vector<UniMatrix> letters;
    for (std::size_t k = 0; k < g.letter_count(); ++k) letters.push_back(g.letter(k));
    const UniMatrix id = UniMatrix::identity(n_);
    words_.emplace(id, Word{});
    // frontier kept in word order so first discovery yields the least word
    std::vector<std::pair<Word, UniMatrix>> frontier{{Word{}, id}};
    for (std::size_t len = 0; len < radius_ && !frontier.empty() && !truncated_; ++len) {
      std::vector<std::pair<Word, UniMatrix>> next;
      for (const auto& [w, m] : frontier) {
        for (std::size_t k = 0; k < letters.size(); ++k) {
          UniMatrix p = m * letters[k];
          if (words_.count(p)) continue;
          if (words_.size() >= cap_) {
            truncated_ = true;
            break;
          }
          Word nw = w;
          nw.push_back(k);
          words_.emplace(p, nw);
          next.emplace_back(std::move(nw), std::move(p));
        }
        if (truncated_) break;
      }
      frontier = std::move(next);
    }
    for (const auto& [m, w] : words_) elements_.push_back(m);
  }

  std::size_t n() const { return n_; }
  std::size_t radius() const { return radius_; }
  std::size_t cap() const { return cap_; }
  bool truncated() const { return truncated_; }
  std::size_t size() const { return elements_.size(); }
  /// Elements in lexicographic order of their entries.
  const std::vector<UniMatrix>& elements() const { return elements_; }
  bool contains(const UniMatrix& m) const { return words_.count(m) > 0; }
  const Word& word(const UniMatrix& m) const { return words_.at(m); }

  std::string word_str(const MatrixGroup& g, const UniMatrix& m) const {
    const Word& w = word(m);
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + g.letter_name(w[i]);
    return s;
  }

 private:
  std::size_t n_, radius_, cap_;
  bool truncated_ = false;
  std::map<UniMatrix, Word> words_;
  std::vector<UniMatrix> elements_;
};

/// Places m as the top-left block of a k x k identity.
inline UniMatrix embed_J(const UniMatrix& m, std::size_t k) {
  if (k < m.dim()) throw DimensionError("embed_J: target dimension smaller than source");
  IntMatrix out = IntMatrix::identity(k);
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
  return UniMatrix(std::move(out));
}

inline MatrixGroup embed_J(const MatrixGroup& g, std::size_t k) {
  std::vector<UniMatrix> gens;
  for (const auto& a : g.generators()) gens.push_back(embed_J(a, k));
  return MatrixGroup(k, std::move(gens), g.labels());
}

/// Block-diagonal direct product; labels are prefixed by the factor index.
inline MatrixGroup direct_product(const std::vector<MatrixGroup>& gs) {
  if (gs.empty()) throw DimensionError("direct product of no groups");
  std::size_t total = 0;
  for (const auto& g : gs) total += g.n();
  std::vector<UniMatrix> gens;
  std::vector<std::string> labels;
  std::size_t offset = 0;
  for (std::size_t f = 0; f < gs.size(); ++f) {
    const auto& g = gs[f];
    for (std::size_t i = 0; i < g.generators().size(); ++i) {
      IntMatrix m = IntMatrix::identity(total);
      for (std::size_t a = 0; a < g.n(); ++a)
        for (std::size_t b = 0; b < g.n(); ++b) m(offset + a, offset + b) = g.generators()[i](a, b);
      gens.emplace_back(std::move(m));
      labels.push_back(gs.size() == 1 ? g.labels()[i] : "f" + std::to_string(f + 1) + "." + g.labels()[i]);
    }
    offset += g.n();
  }
  return MatrixGroup(total, std::move(gens), std::move(labels));
}

/// x in Z_k(G) iff [x, g] in Z_{k-1}(G) for every generator g; Z_0 = 1.
inline bool in_upper_central(const MatrixGroup& g, const UniMatrix& x, std::size_t k) {
  if (x.is_identity()) return true;
  if (k == 0) return false;
  for (const auto& a : g.generators())
    if (!in_upper_central(g, commutator(x, a), k - 1)) return false;
  return true;
}

/// Ball probes. Every returned set is an exact subset of the named subgroup
/// intersected with the ball; truncated balls give lower bounds only.
struct BallProbe {
  std::vector<UniMatrix> elements;
  bool lower_bound = false;
};

inline BallProbe probe_centralizer(const Ball& b, const UniMatrix& x) {
  BallProbe p{{}, b.truncated()};
  for (const auto& m : b.elements())
    if (commute(m, x)) p.elements.push_back(m);
  return p;
}

inline BallProbe probe_center(const MatrixGroup& g, const Ball& b) {
  BallProbe p{{}, b.truncated()};
  for (const auto& m : b.elements()) {
    bool central = true;
    for (const auto& a : g.generators())
      if (!commute(m, a)) {
        central = false;
        break;
      }
    if (central) p.elements.push_back(m);
  }
  return p;
}

/// All commutators of pairs of ball elements (not restricted to the ball).
inline BallProbe probe_derived_set(const Ball& b) {
  std::set<UniMatrix> out;
  for (const auto& x : b.elements())
    for (const auto& y : b.elements()) out.insert(commutator(x, y));
  return {std::vector<UniMatrix>(out.begin(), out.end()), b.truncated()};
}

/// Closes s under products and inverses without leaving the ball.
inline std::set<UniMatrix> close_in_ball(const Ball& b, std::set<UniMatrix> s) {
  s.insert(UniMatrix::identity(b.n()));
  bool grown = true;
  while (grown) {
    grown = false;
    const std::vector<UniMatrix> cur(s.begin(), s.end());
    for (const auto& x : cur) {
      const UniMatrix xi = x.inverse();
      if (b.contains(xi) && s.insert(xi).second) grown = true;
      for (const auto& y : cur) {
        UniMatrix p = x * y;
        if (b.contains(p) && s.insert(std::move(p)).second) grown = true;
      }
    }
  }
  return s;
}

/// P_1 = ball, P_{i+1} = {[p, q] : p in P_i, q in ball}, each intersected with
/// the ball and closed within it. Entry i-1 holds level i.
inline std::vector<BallProbe> probe_lcs(const Ball& b, std::size_t levels) {
  std::vector<BallProbe> out;
  std::set<UniMatrix> cur(b.elements().begin(), b.elements().end());
  for (std::size_t i = 1; i <= levels; ++i) {
    if (i > 1) {
      std::set<UniMatrix> next;
      for (const auto& p : cur)
        for (const auto& q : b.elements()) {
          UniMatrix c = commutator(p, q);
          if (b.contains(c)) next.insert(std::move(c));
        }
      cur = close_in_ball(b, std::move(next));
    }
    out.push_back({std::vector<UniMatrix>(cur.begin(), cur.end()), b.truncated()});
  }
  return out;
}

/// Z_k intersected with the ball, exact membership. Entry k-1 holds Z_k.
inline std::vector<BallProbe> probe_ucs(const MatrixGroup& g, const Ball& b, std::size_t levels) {
  std::vector<BallProbe> out;
  for (std::size_t k = 1; k <= levels; ++k) {
    BallProbe p{{}, b.truncated()};
    for (const auto& m : b.elements())
      if (in_upper_central(g, m, k)) p.elements.push_back(m);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace nilwb
