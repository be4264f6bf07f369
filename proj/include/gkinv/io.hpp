#pragma once

// JSON readers and writers. Readers throw SchemaError carrying the JSON
// pointer of the offending key.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gkinv/atlas.hpp"
#include "gkinv/character.hpp"
#include "gkinv/degeneration.hpp"
#include "gkinv/error.hpp"
#include "gkinv/graph.hpp"
#include "gkinv/invariants.hpp"
#include "gkinv/rational.hpp"

namespace gkinv::io {

using nlohmann::json;

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return ptr + "/" + escaped;
}

inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

inline const json& field(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(ptr, key), "missing required key");
  return *it;
}

inline void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw SchemaError(child(ptr, it.key()), "unknown key");
}

inline std::int64_t integer(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return v.get<std::int64_t>();
}

inline const json& array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

inline std::string string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw SchemaError(ptr, "expected a string");
  return v.get<std::string>();
}

inline int key_as_int(const std::string& key, const std::string& ptr) {
  try {
    std::size_t used = 0;
    int x = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return x;
  } catch (const std::exception&) {
    throw SchemaError(ptr, "expected an integer key");
  }
}

inline Rational rational(const json& v, const std::string& ptr) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (!v.is_string()) throw SchemaError(ptr, "expected a rational \"num/den\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const DomainError& e) {
    throw SchemaError(ptr, e.what());
  }
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON in '") + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Graphs

inline json to_json(const ModularGraph& g) {
  json out;
  out["vertices"] = json::array();
  for (const auto& [v, gv] : g.genus) out["vertices"].push_back({{"id", v}, {"genus", gv}});
  out["half_edges"] = json::array();
  for (const auto& [h, v] : g.attach) out["half_edges"].push_back({{"id", h}, {"vertex", v}});
  out["involution"] = json::array();
  for (const auto& [h, p] : g.involution) {
    auto back = g.involution.find(p);
    if (p < h && back != g.involution.end() && back->second == h) continue;
    out["involution"].push_back({h, p});
  }
  out["tails"] = json::object();
  for (const auto& [h, label] : g.tails) out["tails"][std::to_string(h)] = label;
  return out;
}

// Each pair [a, b] sets j(a) = b, and j(b) = a unless b has its own entry.
// Half-edges never mentioned are fixed points.
inline ModularGraph parse_graph(const json& j, const std::string& ptr = "",
                               std::initializer_list<const char*> extra_keys = {}) {
  std::vector<const char*> keys{"vertices", "half_edges", "involution", "tails"};
  keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
  if (!j.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }) == keys.end())
      throw SchemaError(detail::child(ptr, it.key()), "unknown key");

  ModularGraph g;
  const std::string pv = detail::child(ptr, "vertices");
  const auto& verts = detail::array(detail::field(j, ptr, "vertices"), pv);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const std::string p = detail::child(pv, i);
    detail::only_keys(verts[i], p, {"id", "genus"});
    const auto id = detail::integer(detail::field(verts[i], p, "id"), detail::child(p, "id"));
    const auto gv = detail::integer(detail::field(verts[i], p, "genus"), detail::child(p, "genus"));
    if (!g.genus.emplace(static_cast<VertexId>(id), static_cast<int>(gv)).second)
      throw SchemaError(detail::child(p, "id"), "duplicate vertex id");
  }
  const std::string ph = detail::child(ptr, "half_edges");
  const auto& halves = detail::array(detail::field(j, ptr, "half_edges"), ph);
  for (std::size_t i = 0; i < halves.size(); ++i) {
    const std::string p = detail::child(ph, i);
    detail::only_keys(halves[i], p, {"id", "vertex"});
    const auto id = detail::integer(detail::field(halves[i], p, "id"), detail::child(p, "id"));
    const auto v = detail::integer(detail::field(halves[i], p, "vertex"), detail::child(p, "vertex"));
    if (!g.attach.emplace(static_cast<HalfEdgeId>(id), static_cast<VertexId>(v)).second)
      throw SchemaError(detail::child(p, "id"), "duplicate half-edge id");
  }
  const std::string pi = detail::child(ptr, "involution");
  const auto& pairs = detail::array(detail::field(j, ptr, "involution"), pi);
  std::set<HalfEdgeId> explicit_entries;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string p = detail::child(pi, i);
    if (!pairs[i].is_array() || pairs[i].size() != 2) throw SchemaError(p, "expected a pair [h1, h2]");
    const auto a = static_cast<HalfEdgeId>(detail::integer(pairs[i][0], detail::child(p, 0)));
    const auto b = static_cast<HalfEdgeId>(detail::integer(pairs[i][1], detail::child(p, 1)));
    if (!explicit_entries.insert(a).second) throw SchemaError(detail::child(p, 0), "half-edge paired twice");
    g.involution[a] = b;
  }
  for (const auto& [a, b] : std::map<HalfEdgeId, HalfEdgeId>(g.involution))
    if (!explicit_entries.count(b)) g.involution[b] = a;
  const std::string pt = detail::child(ptr, "tails");
  const auto& tails = detail::field(j, ptr, "tails");
  if (!tails.is_object()) throw SchemaError(pt, "expected an object");
  for (auto it = tails.begin(); it != tails.end(); ++it) {
    const std::string p = detail::child(pt, it.key());
    g.tails[detail::key_as_int(it.key(), p)] = detail::string(it.value(), p);
  }
  return g;
}

inline ModularGraph graph_from_json(const json& j, const std::string& ptr = "") {
  ModularGraph g = parse_graph(j, ptr);
  auto report = validate(g);
  if (!report.ok()) throw SchemaError(ptr.empty() ? "/" : ptr, "invalid graph: " + report.violations.front());
  return g;
}

inline json to_json(const DegeneracyType& dt) {
  json out = to_json(dt.graph);
  out["multidegree"] = json::object();
  for (const auto& [v, d] : dt.multidegree) out["multidegree"][std::to_string(v)] = d;
  return out;
}

inline DegeneracyType parse_degeneracy(const json& j, const std::string& ptr = "") {
  DegeneracyType dt;
  dt.graph = parse_graph(j, ptr, {"multidegree"});
  const std::string pm = detail::child(ptr, "multidegree");
  const auto& md = detail::field(j, ptr, "multidegree");
  if (!md.is_object()) throw SchemaError(pm, "expected an object");
  for (auto it = md.begin(); it != md.end(); ++it) {
    const std::string p = detail::child(pm, it.key());
    dt.multidegree[detail::key_as_int(it.key(), p)] = detail::integer(it.value(), p);
  }
  return dt;
}

inline DegeneracyType degeneracy_from_json(const json& j, const std::string& ptr = "") {
  DegeneracyType dt = parse_degeneracy(j, ptr);
  auto report = validate(dt);
  if (!report.ok()) throw SchemaError(ptr.empty() ? "/" : ptr, "invalid degeneracy type: " + report.violations.front());
  return dt;
}

inline Multidegree multidegree_from_json(const json& j, const std::string& ptr = "") {
  if (!j.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object {vertex: degree}");
  Multidegree out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = detail::child(ptr, it.key());
    out[detail::key_as_int(it.key(), p)] = detail::integer(it.value(), p);
  }
  return out;
}

inline json to_json(const Multidegree& m) {
  json out = json::object();
  for (const auto& [v, d] : m) out[std::to_string(v)] = d;
  return out;
}

// ---------------------------------------------------------------------------
// Atlas

inline json to_json(const Partition& r) { return {{"blocks", r.blocks}}; }

inline Partition partition_from_json(const json& j, const std::string& ptr = "") {
  detail::only_keys(j, ptr, {"blocks"});
  const std::string pb = detail::child(ptr, "blocks");
  const auto& blocks = detail::array(detail::field(j, ptr, "blocks"), pb);
  Partition r;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = detail::array(blocks[i], detail::child(pb, i));
    std::vector<VertexId> block;
    for (std::size_t k = 0; k < b.size(); ++k)
      block.push_back(static_cast<VertexId>(detail::integer(b[k], detail::child(detail::child(pb, i), k))));
    r.blocks.push_back(std::move(block));
  }
  return r;
}

inline json to_json(const IntersectionData& data) { return {{"vertices", data.index}, {"matrix", data.matrix}}; }

inline json to_json(const FixedComponentLabel& label) {
  return {{"partition", to_json(label.partition)}, {"sums", label.sums}};
}

// ---------------------------------------------------------------------------
// Characters

inline json to_json(const LaurentCharacter& c) {
  json terms = json::array();
  for (const auto& [e, coef] : c.terms()) {
    json exp = json::array();
    for (const auto& x : e) exp.push_back(to_string(x));
    terms.push_back({{"exp", exp}, {"coef", coef}});
  }
  return {{"terms", terms}};
}

inline LaurentCharacter character_from_json(const json& j, std::size_t arity, const std::string& ptr = "") {
  detail::only_keys(j, ptr, {"terms"});
  const std::string pt = detail::child(ptr, "terms");
  const auto& terms = detail::array(detail::field(j, ptr, "terms"), pt);
  LaurentCharacter out(arity);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = detail::child(pt, i);
    detail::only_keys(terms[i], p, {"exp", "coef"});
    const std::string pe = detail::child(p, "exp");
    const auto& exp = detail::array(detail::field(terms[i], p, "exp"), pe);
    if (exp.size() != arity) throw SchemaError(pe, "exponent has the wrong arity");
    Exponent e;
    for (std::size_t k = 0; k < exp.size(); ++k) e.push_back(detail::rational(exp[k], detail::child(pe, k)));
    out.add_term(e, detail::integer(detail::field(terms[i], p, "coef"), detail::child(p, "coef")));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spec files

struct SpecFile {
  AdmissibleClassSpec spec;
  int genus = 0;
  std::vector<std::string> markings;
  std::optional<std::int64_t> total_degree;  // unset means scan the degree range
};

inline SpecFile spec_from_json(const json& j, const std::string& ptr = "") {
  detail::only_keys(j, ptr, {"q", "evaluations", "indices", "genus", "markings", "total_degree"});
  SpecFile out;
  out.spec.q = detail::rational(detail::field(j, ptr, "q"), detail::child(ptr, "q"));
  if (out.spec.q <= Rational(0)) throw SchemaError(detail::child(ptr, "q"), "q must be positive");
  if (j.contains("evaluations")) {
    const std::string pe = detail::child(ptr, "evaluations");
    const auto& evs = detail::array(j.at("evaluations"), pe);
    for (std::size_t i = 0; i < evs.size(); ++i) {
      const std::string p = detail::child(pe, i);
      detail::only_keys(evs[i], p, {"label", "lambda", "descendant"});
      EvaluationInsertion ev;
      ev.label = detail::string(detail::field(evs[i], p, "label"), detail::child(p, "label"));
      ev.lambda = detail::integer(detail::field(evs[i], p, "lambda"), detail::child(p, "lambda"));
      if (evs[i].contains("descendant")) ev.descendant = detail::integer(evs[i].at("descendant"), detail::child(p, "descendant"));
      if (ev.descendant < 0) throw SchemaError(detail::child(p, "descendant"), "must be non-negative");
      out.spec.evaluations.push_back(ev);
    }
  }
  if (j.contains("indices")) {
    const std::string pi = detail::child(ptr, "indices");
    const auto& ixs = detail::array(j.at("indices"), pi);
    for (std::size_t i = 0; i < ixs.size(); ++i) {
      const std::string p = detail::child(pi, i);
      detail::only_keys(ixs[i], p, {"lambda", "power"});
      IndexInsertion ix;
      ix.lambda = detail::integer(detail::field(ixs[i], p, "lambda"), detail::child(p, "lambda"));
      ix.power = detail::integer(detail::field(ixs[i], p, "power"), detail::child(p, "power"));
      if (ix.power < 0) throw SchemaError(detail::child(p, "power"), "negative index powers are not supported");
      out.spec.indices.push_back(ix);
    }
  }
  if (j.contains("genus")) out.genus = static_cast<int>(detail::integer(j.at("genus"), detail::child(ptr, "genus")));
  if (out.genus != 0) throw SchemaError(detail::child(ptr, "genus"), "only genus 0 invariants are computed");
  if (j.contains("markings")) {
    const std::string pm = detail::child(ptr, "markings");
    const auto& ms = detail::array(j.at("markings"), pm);
    for (std::size_t i = 0; i < ms.size(); ++i) out.markings.push_back(detail::string(ms[i], detail::child(pm, i)));
  }
  if (j.contains("total_degree")) {
    const auto& td = j.at("total_degree");
    if (td.is_string()) {
      if (td.get<std::string>() != "scan") throw SchemaError(detail::child(ptr, "total_degree"), "expected an integer or \"scan\"");
    } else {
      out.total_degree = detail::integer(td, detail::child(ptr, "total_degree"));
    }
  }
  try {
    require_valid(out.spec);
  } catch (const DomainError& e) {
    throw SchemaError(ptr.empty() ? "/" : ptr, e.what());
  }
  return out;
}

inline json to_json(const AdmissibleClassSpec& spec) {
  json out;
  out["q"] = to_string(spec.q);
  out["evaluations"] = json::array();
  for (const auto& ev : spec.evaluations)
    out["evaluations"].push_back({{"label", ev.label}, {"lambda", ev.lambda}, {"descendant", ev.descendant}});
  out["indices"] = json::array();
  for (const auto& ix : spec.indices) out["indices"].push_back({{"lambda", ix.lambda}, {"power", ix.power}});
  return out;
}

inline json to_json(const InvariantResult& r) {
  json out;
  out["value"] = r.value;
  out["contributing_degrees"] = r.contributing_degrees;
  out["breakdown"] = json::object();
  for (const auto& [d, v] : r.breakdown) out["breakdown"][std::to_string(d)] = v;
  out["stabilization_truncation"] = r.stabilization_truncation;
  out["predicted_truncation"] = r.predicted_truncation;
  if (!r.windows.empty()) {
    out["windows"] = json::object();
    for (const auto& [d, w] : r.windows) out["windows"][std::to_string(d)] = {w.lo, w.hi};
  }
  return out;
}

}  // namespace gkinv::io
