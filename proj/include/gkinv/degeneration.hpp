#pragma once

// Multidegree-labelled modular graphs (degeneracy types of Gieseker bundles)
// and the calculus of deformations and degenerations between them.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gkinv/error.hpp"
#include "gkinv/graph.hpp"

namespace gkinv {

using Multidegree = std::map<VertexId, std::int64_t>;

struct DegeneracyType {
  ModularGraph graph;
  Multidegree multidegree;

  bool operator==(const DegeneracyType&) const = default;

  std::int64_t total_degree() const {
    std::int64_t d = 0;
    for (const auto& [v, dv] : multidegree) d += dv;
    return d;
  }
};

inline ValidationReport validate(const DegeneracyType& dt) {
  auto report = validate(dt.graph);
  for (const auto& [v, g] : dt.graph.genus)
    if (!dt.multidegree.count(v)) report.violations.push_back("multidegree missing vertex " + std::to_string(v));
  for (const auto& [v, d] : dt.multidegree)
    if (!dt.graph.has_vertex(v)) report.violations.push_back("multidegree on unknown vertex " + std::to_string(v));
  return report;
}

inline void require_valid(const DegeneracyType& dt) {
  auto report = validate(dt);
  if (!report.ok()) throw DomainError("invalid degeneracy type: " + report.violations.front());
}

struct GiesekerVerdict {
  bool valid = false;
  std::set<VertexId> bubbles;
  std::vector<std::string> reasons;
};

// A vertex is unstable when it has genus 0 and exactly two special points.
inline bool is_unstable_vertex(const ModularGraph& g, VertexId v) {
  return g.genus.at(v) == 0 && special_point_count(g, v) == 2;
}

namespace detail {

// Contracts the given bubbles; returns the curve and the node each bubble became.
inline ModularGraph contract_bubbles(const ModularGraph& g, const std::set<VertexId>& bubbles,
                                     std::map<VertexId, EdgeId>* bubble_node = nullptr) {
  ModularGraph out = g;
  for (VertexId b : bubbles) {
    auto hs = out.half_edges_at(b);
    HalfEdgeId p1 = out.partner(hs[0]);
    HalfEdgeId p2 = out.partner(hs[1]);
    for (HalfEdgeId h : hs) {
      out.attach.erase(h);
      out.involution.erase(h);
    }
    out.genus.erase(b);
    out.involution[p1] = p2;
    out.involution[p2] = p1;
    if (bubble_node) (*bubble_node)[b] = std::min(p1, p2);
  }
  return out;
}

}  // namespace detail

namespace detail {

// Assumes `dt` is a valid degeneracy type.
inline GiesekerVerdict classify_unchecked(const DegeneracyType& dt) {
  const auto& g = dt.graph;
  GiesekerVerdict verdict;
  auto& reasons = verdict.reasons;
  for (VertexId v : g.vertices()) {
    const int gv = g.genus.at(v);
    const int n = special_point_count(g, v);
    const std::string where = " at vertex " + std::to_string(v);
    if (gv == 0 && n < 2) {
      reasons.push_back("genus-0 vertex with fewer than 2 special points" + where);
      continue;
    }
    if (gv != 0 || n != 2) continue;
    auto hs = g.half_edges_at(v);
    bool structural = true;
    for (HalfEdgeId h : hs) {
      if (g.tails.count(h)) {
        reasons.push_back("unstable component carries a marked point" + where);
        structural = false;
        break;
      }
    }
    if (structural && g.partner(hs[0]) == hs[1]) {
      reasons.push_back("unstable component with a self-node" + where);
      structural = false;
    }
    if (!structural) continue;
    verdict.bubbles.insert(v);
    if (dt.multidegree.at(v) != 1) reasons.push_back("bubble degree != 1" + where);
  }
  for (auto [h, p] : g.edges()) {
    VertexId a = g.attach.at(h), b = g.attach.at(p);
    if (a != b && verdict.bubbles.count(a) && verdict.bubbles.count(b))
      reasons.push_back("adjacent bubbles " + std::to_string(a) + " and " + std::to_string(b));
  }
  if (reasons.empty()) {
    ModularGraph contracted = detail::contract_bubbles(g, verdict.bubbles);
    if (!is_stable(contracted)) reasons.push_back("stabilization is not a stable curve");
  }
  verdict.valid = reasons.empty();
  return verdict;
}

}  // namespace detail

inline GiesekerVerdict classify_gieseker(const DegeneracyType& dt) {
  require_valid(dt);
  return detail::classify_unchecked(dt);
}

// The stabilized object is a curve: bundle data is dropped, so `multidegree`
// is always empty.
struct StabilizationResult {
  ModularGraph graph;
  std::optional<Multidegree> multidegree;
  std::map<VertexId, VertexId> vertex_map;   // stable vertices, identity ids
  std::map<VertexId, EdgeId> bubble_to_node;  // bubble -> node of the stable curve
};

inline StabilizationResult stabilize(const DegeneracyType& dt) {
  auto verdict = classify_gieseker(dt);
  if (!verdict.valid) throw DomainError("stabilize: not a Gieseker type: " + verdict.reasons.front());
  StabilizationResult out;
  out.graph = detail::contract_bubbles(dt.graph, verdict.bubbles, &out.bubble_to_node);
  for (VertexId v : out.graph.vertices()) out.vertex_map[v] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Deformations: smoothing nodes.

inline DegeneracyType deform_resolve_self(const DegeneracyType& dt, HalfEdgeId edge) {
  require_valid(dt);
  const auto& g = dt.graph;
  if (!g.attach.count(edge) || g.partner(edge) == edge || !g.is_self_edge(edge))
    throw DomainError("deform_resolve_self: " + std::to_string(edge) + " is not a self-edge");
  DegeneracyType out = dt;
  VertexId v = g.attach.at(edge);
  out.graph.remove_edge(edge);
  ++out.graph.genus[v];
  return out;
}

inline DegeneracyType deform_resolve_split(const DegeneracyType& dt, HalfEdgeId edge) {
  require_valid(dt);
  const auto& g = dt.graph;
  if (!g.attach.count(edge) || g.partner(edge) == edge)
    throw DomainError("deform_resolve_split: " + std::to_string(edge) + " is not an edge");
  if (g.is_self_edge(edge)) throw DomainError("deform_resolve_split: self-edge given");
  auto [a, b] = g.endpoints(edge);
  VertexId keep = std::min(a, b), gone = std::max(a, b);
  DegeneracyType out = dt;
  out.graph.remove_edge(edge);
  for (auto& [h, v] : out.graph.attach)
    if (v == gone) v = keep;
  out.graph.genus[keep] += out.graph.genus.at(gone);
  out.graph.genus.erase(gone);
  out.multidegree[keep] += out.multidegree.at(gone);
  out.multidegree.erase(gone);
  return out;
}

// ---------------------------------------------------------------------------
// Degenerations: the three elementary closure operations.

inline DegeneracyType degenerate_self(const DegeneracyType& dt, VertexId v) {
  require_valid(dt);
  if (!dt.graph.has_vertex(v)) throw DomainError("degenerate_self: unknown vertex " + std::to_string(v));
  if (dt.graph.genus.at(v) < 1) throw DomainError("degenerate_self: vertex has genus 0");
  DegeneracyType out = dt;
  --out.graph.genus[v];
  out.graph.add_edge(v, v);
  return out;
}

struct VertexSplit {
  int genus_first = 0;
  int genus_second = 0;
  std::int64_t degree_first = 0;
  std::int64_t degree_second = 0;
  // Half-edges at the split vertex that move to the new (second) vertex.
  std::set<HalfEdgeId> moved;
};

// The split vertex keeps its id; the second vertex gets a fresh id and is
// joined to it by one new edge.
namespace detail {

inline DegeneracyType split_unchecked(const DegeneracyType& dt, VertexId v, const VertexSplit& split) {
  DegeneracyType out = dt;
  VertexId w = out.graph.add_vertex(split.genus_second);
  out.graph.genus[v] = split.genus_first;
  for (HalfEdgeId h : split.moved) out.graph.attach[h] = w;
  out.graph.add_edge(v, w);
  out.multidegree[v] = split.degree_first;
  out.multidegree[w] = split.degree_second;
  return out;
}

}  // namespace detail

inline DegeneracyType degenerate_split(const DegeneracyType& dt, VertexId v, const VertexSplit& split) {
  require_valid(dt);
  const auto& g = dt.graph;
  if (!g.has_vertex(v)) throw DomainError("degenerate_split: unknown vertex " + std::to_string(v));
  if (split.genus_first < 0 || split.genus_second < 0 ||
      split.genus_first + split.genus_second != g.genus.at(v))
    throw DomainError("degenerate_split: genus split does not sum to the vertex genus");
  if (split.degree_first + split.degree_second != dt.multidegree.at(v))
    throw DomainError("degenerate_split: degree split does not sum to the vertex degree");
  for (HalfEdgeId h : split.moved)
    if (!g.attach.count(h) || g.attach.at(h) != v)
      throw DomainError("degenerate_split: half-edge " + std::to_string(h) + " is not at the vertex");
  return detail::split_unchecked(dt, v, split);
}

enum class BubbleSide { Left, Right };

inline const char* to_string(BubbleSide s) { return s == BubbleSide::Left ? "left" : "right"; }

// Inserts a degree-1 bubble on `edge`. Left takes the unit of degree from
// the vertex carrying the half-edge `edge`, Right from its partner's vertex.
inline DegeneracyType gieseker_bubble(const DegeneracyType& dt, HalfEdgeId edge, BubbleSide side) {
  require_valid(dt);
  const auto& g = dt.graph;
  if (!g.attach.count(edge) || g.partner(edge) == edge)
    throw DomainError("gieseker_bubble: " + std::to_string(edge) + " is not an edge");
  HalfEdgeId other = g.partner(edge);
  VertexId a = g.attach.at(edge), b = g.attach.at(other);
  if (is_unstable_vertex(g, a) || is_unstable_vertex(g, b))
    throw DomainError("gieseker_bubble: edge does not join stable vertices");
  DegeneracyType out = dt;
  out.graph.involution.erase(edge);
  out.graph.involution.erase(other);
  VertexId bubble = out.graph.add_vertex(0);
  HalfEdgeId b1 = out.graph.next_half_edge_id();
  HalfEdgeId b2 = b1 + 1;
  out.graph.attach[b1] = bubble;
  out.graph.attach[b2] = bubble;
  out.graph.involution[edge] = b1;
  out.graph.involution[b1] = edge;
  out.graph.involution[other] = b2;
  out.graph.involution[b2] = other;
  out.multidegree[bubble] = 1;
  --out.multidegree[side == BubbleSide::Left ? a : b];
  return out;
}

// ---------------------------------------------------------------------------
// Closure strata.

struct DegreeInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t d) const { return lo <= d && d <= hi; }
  bool empty() const { return lo > hi; }
  bool operator==(const DegreeInterval&) const = default;
};

// Degree bounds on stable (non-bubble) vertices, chosen by how many stable
// vertices the stratum has. Bubbles always carry degree 1.
struct DegreeBand {
  DegreeInterval fallback;
  std::map<std::size_t, DegreeInterval> by_vertex_count;

  const DegreeInterval& interval_for(std::size_t stable_vertices) const {
    auto it = by_vertex_count.find(stable_vertices);
    return it == by_vertex_count.end() ? fallback : it->second;
  }

  bool empty() const {
    if (fallback.empty()) return true;
    for (const auto& [n, iv] : by_vertex_count)
      if (iv.empty()) return true;
    return false;
  }
};

inline bool within_band(const DegeneracyType& dt, const std::set<VertexId>& bubbles, const DegreeBand& band) {
  const auto& iv = band.interval_for(dt.graph.vertex_count() - bubbles.size());
  for (const auto& [v, d] : dt.multidegree)
    if (!bubbles.count(v) && !iv.contains(d)) return false;
  return true;
}

struct CanonicalStratum {
  std::string digest;
  DegeneracyType stratum;  // canonically relabelled
};

inline CanonicalStratum canonical_stratum(const DegeneracyType& dt) {
  require_valid(dt);
  auto c = canonical_form(dt.graph, &dt.multidegree);
  CanonicalStratum out;
  out.digest = c.digest;
  out.stratum.graph = c.graph;
  for (const auto& [v, d] : dt.multidegree) out.stratum.multidegree[c.vertex_relabel.at(v)] = d;
  return out;
}

struct StrataRelation {
  std::string from;
  std::string to;
  std::string operation;
  auto operator<=>(const StrataRelation&) const = default;
};

struct StrataPoset {
  std::string root;
  std::map<std::string, DegeneracyType> strata;
  std::set<StrataRelation> relations;
};

struct LabelledDegeneration {
  std::string operation;
  DegeneracyType result;
};

// All single elementary degenerations of `dt` that are Gieseker types within the band.
inline std::vector<LabelledDegeneration> elementary_degenerations(const DegeneracyType& dt, const DegreeBand& band) {
  std::vector<LabelledDegeneration> out;
  auto verdict = classify_gieseker(dt);
  if (!verdict.valid) return out;
  const auto& g = dt.graph;
  auto accept = [&](const char* op, DegeneracyType next) {
    auto v = detail::classify_unchecked(next);
    if (v.valid && within_band(next, v.bubbles, band)) out.push_back({op, std::move(next)});
  };

  const std::size_t stable_after_split = g.vertex_count() - verdict.bubbles.size() + 1;
  const auto& split_iv = band.interval_for(stable_after_split);
  for (VertexId v : g.vertices()) {
    if (verdict.bubbles.count(v)) continue;
    const int gv = g.genus.at(v);
    if (gv >= 1) accept("self", degenerate_self(dt, v));

    const auto hs = g.half_edges_at(v);
    if (hs.size() >= 31) throw DomainError("elementary_degenerations: vertex valence too large");
    const std::int64_t dv = dt.multidegree.at(v);
    for (std::uint32_t mask = 0; mask < (1u << hs.size()); ++mask) {
      VertexSplit split;
      bool moves_tail = false;
      for (std::size_t i = 0; i < hs.size(); ++i)
        if (mask & (1u << i)) {
          split.moved.insert(hs[i]);
          moves_tail = moves_tail || g.tails.count(hs[i]);
        }
      bool keeps_tail = false;
      for (std::size_t i = 0; i < hs.size(); ++i)
        if (!(mask & (1u << i)) && g.tails.count(hs[i])) keeps_tail = true;
      // Special points of each new vertex, counting the new edge.
      const int n1 = static_cast<int>(hs.size() - split.moved.size()) + 1;
      const int n2 = static_cast<int>(split.moved.size()) + 1;
      for (int g1 = 0; g1 <= gv; ++g1) {
        split.genus_first = g1;
        split.genus_second = gv - g1;
        // Rejected by classify_gieseker regardless of degree.
        if ((g1 == 0 && (n1 < 2 || (n1 == 2 && keeps_tail))) ||
            (gv - g1 == 0 && (n2 < 2 || (n2 == 2 && moves_tail))))
          continue;
        for (std::int64_t d1 = split_iv.lo; d1 <= split_iv.hi; ++d1) {
          if (!split_iv.contains(dv - d1)) continue;
          if ((g1 == 0 && n1 == 2 && d1 != 1) || (gv - g1 == 0 && n2 == 2 && dv - d1 != 1)) continue;
          split.degree_first = d1;
          split.degree_second = dv - d1;
          accept("split", detail::split_unchecked(dt, v, split));
        }
      }
    }
  }
  for (auto [h, p] : g.edges()) {
    VertexId a = g.attach.at(h), b = g.attach.at(p);
    if (verdict.bubbles.count(a) || verdict.bubbles.count(b)) continue;
    accept("bubble", gieseker_bubble(dt, h, BubbleSide::Left));
    if (a != b) accept("bubble", gieseker_bubble(dt, h, BubbleSide::Right));
  }
  return out;
}

// Breadth-first closure under the elementary degenerations, keyed by
// canonical digest of the labelled graph.
inline StrataPoset closure_strata(const DegeneracyType& dt, const DegreeBand& band) {
  if (band.empty()) throw DomainError("closure_strata: empty degree band");
  auto verdict = classify_gieseker(dt);
  if (!verdict.valid) throw DomainError("closure_strata: not a Gieseker type: " + verdict.reasons.front());
  StrataPoset poset;
  auto root = canonical_stratum(dt);
  poset.root = root.digest;
  poset.strata.emplace(root.digest, root.stratum);
  std::deque<std::string> frontier{root.digest};
  while (!frontier.empty()) {
    std::string key = frontier.front();
    frontier.pop_front();
    const DegeneracyType current = poset.strata.at(key);
    for (auto& step : elementary_degenerations(current, band)) {
      auto c = canonical_stratum(step.result);
      if (c.digest == key) continue;
      poset.relations.insert({key, c.digest, step.operation});
      if (poset.strata.emplace(c.digest, c.stratum).second) frontier.push_back(c.digest);
    }
  }
  return poset;
}

// ---------------------------------------------------------------------------
// Deformations of a base graph.

// A stratum written over a base curve: which base nodes persist, the
// resulting partition of base vertices into components, the degree on each
// component, and which persisting nodes carry a Gieseker bubble.
struct DeformationOfBase {
  ModularGraph base;
  std::set<EdgeId> kept_edges;
  std::vector<std::vector<VertexId>> blocks;
  std::vector<std::int64_t> block_degree;
  std::set<EdgeId> bubbled_edges;

  std::int64_t total_degree() const {
    std::int64_t d = static_cast<std::int64_t>(bubbled_edges.size());
    for (auto x : block_degree) d += x;
    return d;
  }

  std::size_t block_of(VertexId v) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (std::find(blocks[i].begin(), blocks[i].end(), v) != blocks[i].end()) return i;
    throw DomainError("deformation: vertex " + std::to_string(v) + " not in any block");
  }

  // Arithmetic genus of each component after smoothing the dropped nodes.
  std::vector<int> block_genus() const {
    std::vector<int> out(blocks.size(), 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (VertexId v : blocks[i]) out[i] += base.genus.at(v);
      out[i] -= static_cast<int>(blocks[i].size()) - 1;
    }
    for (auto [h, p] : base.edges())
      if (!kept_edges.count(h)) ++out[block_of(base.attach.at(h))];
    return out;
  }
};

namespace detail {

inline std::vector<std::vector<VertexId>> blocks_from_kept(const ModularGraph& base, const std::set<EdgeId>& kept) {
  DisjointSets sets;
  for (VertexId v : base.vertices()) sets.add(v);
  for (auto [h, p] : base.edges())
    if (!kept.count(h)) sets.unite(base.attach.at(h), base.attach.at(p));
  return sets.classes();
}

// The stable curve obtained by smoothing every base node outside `kept`.
// Component vertices are named by the smallest base vertex in the block.
inline ModularGraph quotient_curve(const ModularGraph& base, const std::set<EdgeId>& kept,
                                   const std::vector<std::vector<VertexId>>& blocks) {
  DeformationOfBase tmp{base, kept, blocks, {}, {}};
  auto genera = tmp.block_genus();
  std::map<VertexId, VertexId> rep;
  ModularGraph q;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    q.genus[blocks[i].front()] = genera[i];
    for (VertexId v : blocks[i]) rep[v] = blocks[i].front();
  }
  for (const auto& [h, label] : base.tails) {
    q.attach[h] = rep.at(base.attach.at(h));
    q.tails[h] = label;
  }
  for (auto [h, p] : base.edges()) {
    if (!kept.count(h)) continue;
    q.attach[h] = rep.at(base.attach.at(h));
    q.attach[p] = rep.at(base.attach.at(p));
    q.involution[h] = p;
    q.involution[p] = h;
  }
  return q;
}

}  // namespace detail

// The quotient graph a deformation describes: blocks become components.
inline ModularGraph deformation_graph(const DeformationOfBase& def) {
  return detail::quotient_curve(def.base, def.kept_edges, def.blocks);
}

// Builds the labelled stratum (with bubbles) that a deformation describes.
inline DegeneracyType stratum_of(const DeformationOfBase& def) {
  DegeneracyType dt;
  dt.graph = deformation_graph(def);
  for (std::size_t i = 0; i < def.blocks.size(); ++i) dt.multidegree[def.blocks[i].front()] = def.block_degree[i];
  for (EdgeId e : def.bubbled_edges) {
    auto bubbled = gieseker_bubble(dt, e, BubbleSide::Left);
    VertexId a = dt.graph.attach.at(e);
    bubbled.multidegree[a] += 1;  // block degrees already exclude the bubble
    dt = std::move(bubbled);
  }
  return dt;
}

// Expresses `dt` as a deformation of `base`, after contracting its bubbles.
// Returns nullopt when no choice of persisting base nodes matches.
inline std::optional<DeformationOfBase> deformation_of(const DegeneracyType& dt, const ModularGraph& base) {
  require_valid(base);
  auto verdict = classify_gieseker(dt);
  if (!verdict.valid) return std::nullopt;
  auto st = stabilize(dt);
  const auto base_edges = base.edges();
  const std::size_t want_edges = st.graph.edge_count();
  if (want_edges > base_edges.size() || base_edges.size() > 30) return std::nullopt;

  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << base_edges.size()); ++m)
    if (static_cast<std::size_t>(__builtin_popcount(m)) == want_edges) masks.push_back(m);
  for (std::uint32_t mask : masks) {
    std::set<EdgeId> kept;
    for (std::size_t i = 0; i < base_edges.size(); ++i)
      if (mask & (1u << i)) kept.insert(base_edges[i].first);
    auto blocks = detail::blocks_from_kept(base, kept);
    if (blocks.size() != st.graph.vertex_count()) continue;
    auto q = detail::quotient_curve(base, kept, blocks);
    auto iso = find_isomorphism(st.graph, q);
    if (!iso) continue;

    DeformationOfBase def;
    def.base = base;
    def.kept_edges = kept;
    def.blocks = blocks;
    def.block_degree.assign(blocks.size(), 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (const auto& [v, w] : iso->vertex_map)
        if (w == blocks[i].front()) def.block_degree[i] = dt.multidegree.at(v);
    }
    for (const auto& [bubble, node] : st.bubble_to_node) {
      HalfEdgeId h = iso->half_edge_map.at(node);
      def.bubbled_edges.insert(std::min(h, base.partner(h)));
    }
    return def;
  }
  return std::nullopt;
}

}  // namespace gkinv
