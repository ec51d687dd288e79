#pragma once

#include "nilwb/matrix_group.hpp"
#include "nilwb/split_group.hpp"
#include "nilwb/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nilwb {

using Json = nlohmann::json;

/// Schema violation, located by a JSON pointer.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string pointer, const std::string& msg)
      : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + msg), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct Bounds {
  long eps_bound = 5;
  std::size_t ball_radius = 3;
  long box_radius = 2;
  std::size_t ball_cap = 0;  // 0: WORKBENCH_BALL_CAP or the default
  std::size_t samples = 32;  // extra seeded elements for split-model sweeps

  std::size_t effective_ball_cap() const { return ball_cap ? ball_cap : ball_cap_from_env(); }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct GroupSpec {
  std::string model;  // split | template | matrix | product
  std::string name;
  // split
  std::size_t d = 0, r = 0;
  std::vector<UniMatrix> action;
  // template
  std::size_t c = 0;
  std::vector<std::vector<Int>> weights;
  // matrix
  std::size_t n = 0;
  std::optional<std::size_t> ut;
  std::vector<UniMatrix> generators;
  std::vector<std::string> labels;
  std::optional<std::size_t> embed_into;
  // product
  std::vector<GroupSpec> factors;
  // probes
  std::optional<SplitElement> h;

  Bounds bounds;
  std::uint64_t seed = 0;

  bool is_split_like() const { return model == "split" || model == "template"; }
  friend bool operator==(const GroupSpec& a, const GroupSpec& b) = default;
};

// ---------------------------------------------------------------------------
// JSON value helpers. Integers fitting in int64 are plain numbers, larger
// ones decimal strings.

inline Json to_json(const Int& x) {
  if (x.fits_slong_p()) return Json(static_cast<std::int64_t>(x.get_si()));
  return Json(x.get_str());
}

inline Json to_json(const Rat& x) {
  if (x.get_den() == 1) return to_json(Int(x.get_num()));
  return Json(x.get_str());
}

inline Json to_json(const IntVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline Json to_json(const RatVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline Json to_json(const IntMatrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row(i)));
  return a;
}

inline Json to_json(const UniMatrix& m) { return to_json(m.matrix()); }

inline Json to_json(const IntLattice& l) {
  Json a = Json::array();
  for (const auto& b : l.basis()) a.push_back(to_json(b));
  return a;
}

inline Json to_json(const SplitElement& x) { return Json{{"eps", to_json(x.eps)}, {"v", to_json(x.v)}}; }

namespace detail {

inline std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

inline Int parse_int(const Json& j, const std::string& at) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? Int(std::to_string(j.get<std::uint64_t>()))
                                                           : Int(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    Int x;
    const std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos || x.set_str(s, 10) != 0)
      throw SpecError(at, "expected an integer, got string \"" + s + "\"");
    return x;
  }
  throw SpecError(at, "expected an integer");
}

inline std::size_t parse_count(const Json& j, const std::string& at, std::size_t min_value = 0) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    throw SpecError(at, "expected a non-negative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < min_value) throw SpecError(at, "must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

inline IntVec parse_vec(const Json& j, const std::string& at, std::optional<std::size_t> len = std::nullopt) {
  if (!j.is_array()) throw SpecError(at, "expected an array of integers");
  if (len && j.size() != *len)
    throw SpecError(at, "expected length " + std::to_string(*len) + ", got " + std::to_string(j.size()));
  IntVec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_int(j[i], ptr(at, i)));
  return v;
}

inline UniMatrix parse_unimatrix(const Json& j, const std::string& at, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw SpecError(at, "expected " + std::to_string(n) + " rows");
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const IntVec row = parse_vec(j[i], ptr(at, i), n);
    for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k)
      if (m(i, k) != (i == k ? 1 : 0))
        throw SpecError(ptr(ptr(at, i), k), "matrix is not unit upper triangular");
  return UniMatrix(std::move(m));
}

inline void reject_unknown(const Json& j, const std::string& at, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SpecError(ptr(at, it.key()), "unknown field");
  }
}

inline const Json& require(const Json& j, const std::string& at, const char* key) {
  if (!j.contains(key)) throw SpecError(ptr(at, key), "required field missing");
  return j.at(key);
}

inline GroupSpec parse_spec_at(const Json& j, const std::string& at, bool top);

}  // namespace detail

inline SplitGroup build_split(const GroupSpec& s) {
  if (s.model == "split") return SplitGroup::build(s.d, s.r, s.action);
  if (s.model == "template") {
    std::vector<UniMatrix> a;
    for (const auto& w : s.weights) a.push_back(template_matrix(WeightVector(s.c, w)));
    return SplitGroup::build(s.c - 2, s.r, std::move(a));
  }
  throw PreconditionError("model " + s.model + " is not a split model");
}

/// Split and template specs map through the affine embedding.
inline MatrixGroup build_matrix(const GroupSpec& s) {
  if (s.model == "matrix") {
    MatrixGroup g = s.ut ? MatrixGroup::unitriangular(*s.ut) : MatrixGroup(s.n, s.generators, s.labels);
    return s.embed_into ? embed_J(g, *s.embed_into) : g;
  }
  if (s.model == "product") {
    std::vector<MatrixGroup> fs;
    for (const auto& f : s.factors) fs.push_back(build_matrix(f));
    return direct_product(fs);
  }
  const SplitGroup g = build_split(s);
  std::vector<UniMatrix> gens;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < g.d(); ++i) labels.push_back("v" + std::to_string(i + 1));
  for (std::size_t j = 0; j < g.r(); ++j) labels.push_back("t" + std::to_string(j + 1));
  for (const auto& x : g.generators()) gens.push_back(g.to_matrix(x));
  return MatrixGroup(g.embedding_dim(), std::move(gens), std::move(labels));
}

namespace detail {

inline GroupSpec parse_spec_at(const Json& j, const std::string& at, bool top) {
  if (!j.is_object()) throw SpecError(at, "expected an object");
  GroupSpec s;
  const Json& model = require(j, at, "model");
  if (!model.is_string()) throw SpecError(ptr(at, "model"), "expected a string");
  s.model = model.get<std::string>();
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SpecError(ptr(at, "name"), "expected a string");
    s.name = j["name"].get<std::string>();
  }

  if (s.model == "split") {
    reject_unknown(j, at, {"model", "name", "d", "r", "action", "h", "bounds", "seed"});
    s.d = parse_count(require(j, at, "d"), ptr(at, "d"), 1);
    s.r = parse_count(require(j, at, "r"), ptr(at, "r"));
    const Json& a = require(j, at, "action");
    if (!a.is_array() || a.size() != s.r)
      throw SpecError(ptr(at, "action"), "expected " + std::to_string(s.r) + " matrices");
    for (std::size_t i = 0; i < a.size(); ++i) s.action.push_back(parse_unimatrix(a[i], ptr(ptr(at, "action"), i), s.d));
    if (auto w = action_well_defined(s.action))
      throw SpecError(ptr(at, "action"), "action matrices do not commute: " + w->str());
  } else if (s.model == "template") {
    reject_unknown(j, at, {"model", "name", "c", "r", "weights", "h", "bounds", "seed"});
    s.c = parse_count(require(j, at, "c"), ptr(at, "c"), 4);
    s.r = parse_count(require(j, at, "r"), ptr(at, "r"), 1);
    const Json& w = require(j, at, "weights");
    if (!w.is_array() || w.size() != s.r)
      throw SpecError(ptr(at, "weights"), "expected " + std::to_string(s.r) + " weight vectors");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string wp = ptr(ptr(at, "weights"), i);
      IntVec v = parse_vec(w[i], wp, s.c - 3);
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] == 0) throw SpecError(ptr(wp, k), "weights must be nonzero");
      s.weights.push_back(std::move(v));
    }
    s.d = s.c - 2;
    std::vector<UniMatrix> mats;
    for (const auto& v : s.weights) mats.push_back(template_matrix(WeightVector(s.c, v)));
    if (auto wit = action_well_defined(mats))
      throw SpecError(ptr(at, "weights"), "template matrices do not commute: " + wit->str());
  } else if (s.model == "matrix") {
    reject_unknown(j, at, {"model", "name", "ut", "n", "generators", "labels", "embed_into", "bounds", "seed"});
    if (j.contains("ut")) {
      if (j.contains("generators") || j.contains("n") || j.contains("labels"))
        throw SpecError(ptr(at, "ut"), "\"ut\" excludes \"n\", \"generators\" and \"labels\"");
      s.ut = parse_count(j["ut"], ptr(at, "ut"), 2);
      s.n = *s.ut;
    } else {
      s.n = parse_count(require(j, at, "n"), ptr(at, "n"), 1);
      const Json& g = require(j, at, "generators");
      if (!g.is_array()) throw SpecError(ptr(at, "generators"), "expected an array of matrices");
      for (std::size_t i = 0; i < g.size(); ++i)
        s.generators.push_back(parse_unimatrix(g[i], ptr(ptr(at, "generators"), i), s.n));
      if (j.contains("labels")) {
        const Json& l = j["labels"];
        if (!l.is_array() || l.size() != s.generators.size())
          throw SpecError(ptr(at, "labels"), "expected one label per generator");
        for (std::size_t i = 0; i < l.size(); ++i) {
          if (!l[i].is_string()) throw SpecError(ptr(ptr(at, "labels"), i), "expected a string");
          s.labels.push_back(l[i].get<std::string>());
        }
      }
    }
    if (j.contains("embed_into")) {
      s.embed_into = parse_count(j["embed_into"], ptr(at, "embed_into"));
      if (*s.embed_into < s.n) throw SpecError(ptr(at, "embed_into"), "target dimension smaller than n");
    }
  } else if (s.model == "product") {
    reject_unknown(j, at, {"model", "name", "factors", "bounds", "seed"});
    const Json& f = require(j, at, "factors");
    if (!f.is_array() || f.empty()) throw SpecError(ptr(at, "factors"), "expected a non-empty array of specs");
    for (std::size_t i = 0; i < f.size(); ++i) s.factors.push_back(parse_spec_at(f[i], ptr(ptr(at, "factors"), i), false));
  } else {
    throw SpecError(ptr(at, "model"), "unknown model \"" + s.model + "\" (split, template, matrix, product)");
  }

  if (j.contains("h")) {
    const std::string hp = ptr(at, "h");
    const Json& h = j["h"];
    if (!h.is_object()) throw SpecError(hp, "expected {\"v\": [...], \"eps\": [...]}");
    reject_unknown(h, hp, {"v", "eps"});
    s.h = SplitElement{parse_vec(require(h, hp, "v"), ptr(hp, "v"), s.d), parse_vec(require(h, hp, "eps"), ptr(hp, "eps"), s.r)};
  }

  if (j.contains("bounds")) {
    const std::string bp = ptr(at, "bounds");
    const Json& b = j["bounds"];
    if (!b.is_object()) throw SpecError(bp, "expected an object");
    reject_unknown(b, bp, {"eps_bound", "ball_radius", "box_radius", "ball_cap", "samples"});
    if (b.contains("eps_bound")) s.bounds.eps_bound = static_cast<long>(parse_count(b["eps_bound"], ptr(bp, "eps_bound"), 1));
    if (b.contains("ball_radius")) s.bounds.ball_radius = parse_count(b["ball_radius"], ptr(bp, "ball_radius"));
    if (b.contains("box_radius")) s.bounds.box_radius = static_cast<long>(parse_count(b["box_radius"], ptr(bp, "box_radius")));
    if (b.contains("ball_cap")) s.bounds.ball_cap = parse_count(b["ball_cap"], ptr(bp, "ball_cap"), 1);
    if (b.contains("samples")) s.bounds.samples = parse_count(b["samples"], ptr(bp, "samples"));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw SpecError(ptr(at, "seed"), "expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  (void)top;
  return s;
}

}  // namespace detail

inline GroupSpec parse_spec(const Json& j) { return detail::parse_spec_at(j, "", true); }

inline GroupSpec parse_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(j);
}
inline GroupSpec parse_spec(const char* text) { return parse_spec(std::string(text)); }

inline Json emit_spec(const GroupSpec& s) {
  Json j;
  j["model"] = s.model;
  if (!s.name.empty()) j["name"] = s.name;
  if (s.model == "split") {
    j["d"] = s.d;
    j["r"] = s.r;
    j["action"] = Json::array();
    for (const auto& a : s.action) j["action"].push_back(to_json(a));
  } else if (s.model == "template") {
    j["c"] = s.c;
    j["r"] = s.r;
    j["weights"] = Json::array();
    for (const auto& w : s.weights) j["weights"].push_back(to_json(w));
  } else if (s.model == "matrix") {
    if (s.ut) {
      j["ut"] = *s.ut;
    } else {
      j["n"] = s.n;
      j["generators"] = Json::array();
      for (const auto& g : s.generators) j["generators"].push_back(to_json(g));
      if (!s.labels.empty()) j["labels"] = s.labels;
    }
    if (s.embed_into) j["embed_into"] = *s.embed_into;
  } else if (s.model == "product") {
    j["factors"] = Json::array();
    for (const auto& f : s.factors) j["factors"].push_back(emit_spec(f));
  }
  if (s.h) j["h"] = to_json(*s.h);
  j["bounds"] = Json{{"ball_radius", s.bounds.ball_radius},
                     {"box_radius", s.bounds.box_radius},
                     {"eps_bound", s.bounds.eps_bound},
                     {"samples", s.bounds.samples}};
  if (s.bounds.ball_cap) j["bounds"]["ball_cap"] = s.bounds.ball_cap;
  j["seed"] = s.seed;
  return j;
}

}  // namespace nilwb
