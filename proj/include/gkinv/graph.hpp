#pragma once

// Modular graphs of marked nodal curves: one vertex per component (with the
// genus of its normalization), one edge per node, one tail per marked point.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gkinv/error.hpp"

namespace gkinv {

using VertexId = int;
using HalfEdgeId = int;

// An edge is named by the smaller of its two half-edge ids.
using EdgeId = HalfEdgeId;

struct ModularGraph {
  std::map<VertexId, int> genus;
  std::map<HalfEdgeId, VertexId> attach;
  // Partial map; a half-edge without an entry is a fixed point.
  std::map<HalfEdgeId, HalfEdgeId> involution;
  std::map<HalfEdgeId, std::string> tails;

  bool operator==(const ModularGraph&) const = default;

  HalfEdgeId partner(HalfEdgeId h) const {
    auto it = involution.find(h);
    return it == involution.end() ? h : it->second;
  }

  bool has_vertex(VertexId v) const { return genus.count(v) != 0; }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(genus.size());
    for (const auto& [v, g] : genus) out.push_back(v);
    return out;
  }

  std::size_t vertex_count() const { return genus.size(); }

  // 2-cycles of the involution as (h, j(h)) with h < j(h).
  std::vector<std::pair<HalfEdgeId, HalfEdgeId>> edges() const {
    std::vector<std::pair<HalfEdgeId, HalfEdgeId>> out;
    for (const auto& [h, v] : attach) {
      HalfEdgeId p = partner(h);
      if (p > h && partner(p) == h) out.emplace_back(h, p);
    }
    return out;
  }

  std::size_t edge_count() const { return edges().size(); }

  bool is_self_edge(EdgeId e) const {
    HalfEdgeId p = partner(e);
    return p != e && attach.at(e) == attach.at(p);
  }

  std::pair<VertexId, VertexId> endpoints(EdgeId e) const {
    return {attach.at(e), attach.at(partner(e))};
  }

  std::vector<HalfEdgeId> half_edges_at(VertexId v) const {
    std::vector<HalfEdgeId> out;
    for (const auto& [h, w] : attach)
      if (w == v) out.push_back(h);
    return out;
  }

  HalfEdgeId next_half_edge_id() const {
    return attach.empty() ? 0 : attach.rbegin()->first + 1;
  }

  VertexId next_vertex_id() const {
    return genus.empty() ? 0 : genus.rbegin()->first + 1;
  }

  VertexId add_vertex(int g) {
    VertexId v = next_vertex_id();
    genus[v] = g;
    return v;
  }

  HalfEdgeId add_tail(VertexId v, std::string label) {
    HalfEdgeId h = next_half_edge_id();
    attach[h] = v;
    tails[h] = std::move(label);
    return h;
  }

  // Returns the new edge's id (its first half-edge, attached to v1).
  EdgeId add_edge(VertexId v1, VertexId v2) {
    HalfEdgeId h1 = next_half_edge_id();
    HalfEdgeId h2 = h1 + 1;
    attach[h1] = v1;
    attach[h2] = v2;
    involution[h1] = h2;
    involution[h2] = h1;
    return h1;
  }

  void remove_edge(EdgeId e) {
    HalfEdgeId p = partner(e);
    attach.erase(e);
    attach.erase(p);
    involution.erase(e);
    involution.erase(p);
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

// Union-find over arbitrary int keys; used for connectivity and partitions.
class DisjointSets {
 public:
  void add(int x) { parent_.emplace(x, x); }
  int find(int x) {
    int root = x;
    while (parent_.at(root) != root) root = parent_.at(root);
    while (parent_.at(x) != root) {
      int next = parent_.at(x);
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  // Classes sorted by smallest member, members ascending.
  std::vector<std::vector<int>> classes() {
    std::map<int, std::vector<int>> by_root;
    for (const auto& [x, p] : parent_) by_root[find(x)].push_back(x);
    std::vector<std::vector<int>> out;
    for (auto& [r, members] : by_root) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::map<int, int> parent_;
};

}  // namespace detail

inline ValidationReport validate(const ModularGraph& g) {
  ValidationReport report;
  auto& out = report.violations;
  if (g.genus.empty()) out.push_back("no vertices");
  for (const auto& [v, gv] : g.genus)
    if (gv < 0) out.push_back("negative genus at vertex " + std::to_string(v));
  for (const auto& [h, v] : g.attach)
    if (!g.has_vertex(v))
      out.push_back("half-edge " + std::to_string(h) + " attaches to unknown vertex " +
                    std::to_string(v));

  bool involution_ok = true;
  for (const auto& [h, p] : g.involution) {
    if (!g.attach.count(h) || !g.attach.count(p)) {
      out.push_back("involution references unknown half-edge " +
                    std::to_string(g.attach.count(h) ? p : h));
      involution_ok = false;
    }
  }
  if (involution_ok) {
    for (const auto& [h, v] : g.attach) {
      if (g.partner(g.partner(h)) != h) {
        out.push_back("involution not self-inverse");
        involution_ok = false;
        break;
      }
    }
  }

  if (involution_ok) {
    std::set<std::string> labels;
    for (const auto& [h, v] : g.attach) {
      bool fixed = g.partner(h) == h;
      bool tail = g.tails.count(h) != 0;
      if (fixed && !tail) out.push_back("fixed half-edge " + std::to_string(h) + " has no tail label");
      if (!fixed && tail) out.push_back("tail label on paired half-edge " + std::to_string(h));
    }
    for (const auto& [h, label] : g.tails) {
      if (!g.attach.count(h)) out.push_back("tail label on unknown half-edge " + std::to_string(h));
      if (!labels.insert(label).second) out.push_back("duplicate tail label '" + label + "'");
    }
  }

  if (out.empty()) {
    detail::DisjointSets sets;
    for (VertexId v : g.vertices()) sets.add(v);
    for (auto [h, p] : g.edges()) sets.unite(g.attach.at(h), g.attach.at(p));
    if (sets.classes().size() > 1) out.push_back("disconnected");
  }
  return report;
}

inline void require_valid(const ModularGraph& g) {
  auto report = validate(g);
  if (!report.ok()) throw DomainError("invalid modular graph: " + report.violations.front());
}

// Arithmetic genus: sum of vertex genera plus the first Betti number.
inline int total_genus(const ModularGraph& g) {
  require_valid(g);
  int sum = 0;
  for (const auto& [v, gv] : g.genus) sum += gv;
  return sum + static_cast<int>(g.edge_count()) - static_cast<int>(g.vertex_count()) + 1;
}

inline int special_point_count(const ModularGraph& g, VertexId v) {
  if (!g.has_vertex(v)) throw DomainError("unknown vertex " + std::to_string(v));
  int n = 0;
  for (const auto& [h, w] : g.attach)
    if (w == v) ++n;
  return n;
}

inline bool is_stable_vertex(const ModularGraph& g, VertexId v) {
  int gv = g.genus.at(v);
  int n = special_point_count(g, v);
  return !((gv == 0 && n < 3) || (gv == 1 && n < 1));
}

inline bool is_stable(const ModularGraph& g) {
  for (VertexId v : g.vertices())
    if (!is_stable_vertex(g, v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Canonical forms

inline constexpr std::size_t kDefaultCanonicalVertexLimit = 12;

using VertexDecoration = std::map<VertexId, std::int64_t>;

struct CanonicalGraph {
  ModularGraph graph;  // vertices 0..n-1, half-edges renumbered
  std::map<VertexId, VertexId> vertex_relabel;
  std::map<HalfEdgeId, HalfEdgeId> half_edge_relabel;
  std::string digest;
};

namespace detail {

struct VertexKey {
  std::int64_t decoration = 0;
  int genus = 0;
  std::vector<std::string> tail_labels;
  int self_edges = 0;
  int split_ends = 0;
  auto operator<=>(const VertexKey&) const = default;
};

inline std::string escape_label(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ',' || c == ';' || c == '|' || c == '\\' || c == '"' || c == '(' || c == ')')
      out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

// Exhaustive minimization over vertex orderings, pruned by iterated colour
// refinement. Isomorphisms must fix tail labels pointwise.
inline CanonicalGraph canonical_form(const ModularGraph& g, const VertexDecoration* decoration = nullptr,
                                     std::size_t vertex_limit = kDefaultCanonicalVertexLimit) {
  require_valid(g);
  const auto verts = g.vertices();
  const std::size_t n = verts.size();
  if (n > vertex_limit)
    throw DomainError("canonical_form: " + std::to_string(n) + " vertices exceeds limit " +
                      std::to_string(vertex_limit));

  std::map<VertexId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[verts[i]] = i;

  std::vector<detail::VertexKey> keys(n);
  std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    keys[i].genus = g.genus.at(verts[i]);
    if (decoration) {
      auto it = decoration->find(verts[i]);
      if (it == decoration->end()) throw DomainError("decoration missing vertex " + std::to_string(verts[i]));
      keys[i].decoration = it->second;
    }
  }
  for (const auto& [h, label] : g.tails) keys[index.at(g.attach.at(h))].tail_labels.push_back(label);
  for (auto& k : keys) std::sort(k.tail_labels.begin(), k.tail_labels.end());
  for (auto [h, p] : g.edges()) {
    std::size_t a = index.at(g.attach.at(h));
    std::size_t b = index.at(g.attach.at(p));
    if (a == b) {
      ++keys[a].self_edges;
    } else {
      ++mult[a][b];
      ++mult[b][a];
      ++keys[a].split_ends;
      ++keys[b].split_ends;
    }
  }

  // Initial colours from the sorted distinct keys, then refine by neighbourhoods.
  std::vector<int> colour(n);
  {
    std::vector<detail::VertexKey> distinct(keys);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i)
      colour[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), keys[i]) - distinct.begin());
  }
  for (std::size_t round = 0; round < n; ++round) {
    using Signature = std::pair<int, std::vector<std::pair<int, int>>>;
    std::vector<Signature> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      sig[i].first = colour[i];
      for (std::size_t j = 0; j < n; ++j)
        if (mult[i][j] > 0) sig[i].second.emplace_back(colour[j], mult[i][j]);
      std::sort(sig[i].second.begin(), sig[i].second.end());
    }
    std::vector<Signature> distinct(sig);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> next(n);
    for (std::size_t i = 0; i < n; ++i)
      next[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[i]) - distinct.begin());
    std::size_t before = std::set<int>(colour.begin(), colour.end()).size();
    colour = std::move(next);
    if (distinct.size() == before) break;
  }

  // Cells of equal colour, in colour order; permute within cells only.
  std::map<int, std::vector<std::size_t>> cells_by_colour;
  for (std::size_t i = 0; i < n; ++i) cells_by_colour[colour[i]].push_back(i);
  std::vector<std::vector<std::size_t>> cells;
  for (auto& [c, members] : cells_by_colour) cells.push_back(members);

  auto encode = [&](const std::vector<std::size_t>& order) {
    std::vector<int> code;
    code.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) code.push_back(mult[order[a]][order[b]]);
    return code;
  };

  std::vector<std::size_t> best_order;
  std::vector<int> best_code;
  bool have_best = false;
  std::function<void(std::size_t, std::vector<std::size_t>&)> search;
  search = [&](std::size_t cell, std::vector<std::size_t>& prefix) {
    if (cell == cells.size()) {
      auto code = encode(prefix);
      if (!have_best || code < best_code) {
        best_code = std::move(code);
        best_order = prefix;
        have_best = true;
      }
      return;
    }
    std::vector<std::size_t> members = cells[cell];
    do {
      prefix.insert(prefix.end(), members.begin(), members.end());
      search(cell + 1, prefix);
      prefix.resize(prefix.size() - members.size());
    } while (std::next_permutation(members.begin(), members.end()));
  };
  std::vector<std::size_t> prefix;
  search(0, prefix);

  CanonicalGraph out;
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[best_order[p]] = p;
  for (std::size_t p = 0; p < n; ++p) {
    out.graph.genus[static_cast<VertexId>(p)] = keys[best_order[p]].genus;
    out.vertex_relabel[verts[best_order[p]]] = static_cast<VertexId>(p);
  }

  // Edges sorted by canonical endpoint positions; parallel edges in id order.
  struct EdgeRec {
    std::size_t lo, hi;
    HalfEdgeId h_lo, h_hi;
  };
  std::vector<EdgeRec> recs;
  for (auto [h, p] : g.edges()) {
    std::size_t a = position[index.at(g.attach.at(h))];
    std::size_t b = position[index.at(g.attach.at(p))];
    if (a <= b)
      recs.push_back({a, b, h, p});
    else
      recs.push_back({b, a, p, h});
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const EdgeRec& x, const EdgeRec& y) { return std::tie(x.lo, x.hi) < std::tie(y.lo, y.hi); });
  HalfEdgeId next = 0;
  for (const auto& r : recs) {
    HalfEdgeId a = next++, b = next++;
    out.graph.attach[a] = static_cast<VertexId>(r.lo);
    out.graph.attach[b] = static_cast<VertexId>(r.hi);
    out.graph.involution[a] = b;
    out.graph.involution[b] = a;
    out.half_edge_relabel[r.h_lo] = a;
    out.half_edge_relabel[r.h_hi] = b;
  }
  std::vector<std::pair<std::string, HalfEdgeId>> tail_list;
  for (const auto& [h, label] : g.tails) tail_list.emplace_back(label, h);
  std::sort(tail_list.begin(), tail_list.end());
  for (const auto& [label, h] : tail_list) {
    HalfEdgeId t = next++;
    out.graph.attach[t] = static_cast<VertexId>(position[index.at(g.attach.at(h))]);
    out.graph.tails[t] = label;
    out.half_edge_relabel[h] = t;
  }

  std::string digest = "v";
  for (std::size_t p = 0; p < n; ++p) {
    const auto& k = keys[best_order[p]];
    digest += "(" + std::to_string(k.genus);
    if (decoration) digest += ";d" + std::to_string(k.decoration);
    if (k.self_edges) digest += ";s" + std::to_string(k.self_edges);
    if (!k.tail_labels.empty()) {
      digest += ";t";
      for (std::size_t i = 0; i < k.tail_labels.size(); ++i)
        digest += (i ? "," : "") + detail::escape_label(k.tail_labels[i]);
    }
    digest += ")";
  }
  digest += "e";
  bool first = true;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      int m = mult[best_order[a]][best_order[b]];
      if (m == 0) continue;
      digest += (first ? "" : ",") + std::to_string(a) + "-" + std::to_string(b);
      if (m > 1) digest += "x" + std::to_string(m);
      first = false;
    }
  out.digest = std::move(digest);
  return out;
}

struct GraphIsomorphism {
  std::map<VertexId, VertexId> vertex_map;
  std::map<HalfEdgeId, HalfEdgeId> half_edge_map;
};

// An isomorphism from `a` to `b` respecting genera, tails and decorations.
inline std::optional<GraphIsomorphism> find_isomorphism(const ModularGraph& a, const ModularGraph& b,
                                                        const VertexDecoration* deco_a = nullptr,
                                                        const VertexDecoration* deco_b = nullptr) {
  if (a.vertex_count() != b.vertex_count() || a.attach.size() != b.attach.size()) return std::nullopt;
  auto ca = canonical_form(a, deco_a);
  auto cb = canonical_form(b, deco_b);
  if (ca.digest != cb.digest) return std::nullopt;
  std::map<VertexId, VertexId> inv_v;
  for (auto [v, c] : cb.vertex_relabel) inv_v[c] = v;
  std::map<HalfEdgeId, HalfEdgeId> inv_h;
  for (auto [h, c] : cb.half_edge_relabel) inv_h[c] = h;
  GraphIsomorphism iso;
  for (auto [v, c] : ca.vertex_relabel) iso.vertex_map[v] = inv_v.at(c);
  for (auto [h, c] : ca.half_edge_relabel) iso.half_edge_map[h] = inv_h.at(c);
  return iso;
}

}  // namespace gkinv
