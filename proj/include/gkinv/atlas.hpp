#pragma once

// Stabilizer partitions, fixed-point labels, finite-type degree bands and
// their infinite tails, and the twist lattice of a base curve.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gkinv/degeneration.hpp"
#include "gkinv/error.hpp"
#include "gkinv/graph.hpp"
#include "gkinv/rational.hpp"

namespace gkinv {

// A partition of the base vertex set. Blocks are kept sorted by their
// smallest vertex; for two-block partitions the first block is the "+" side.
struct Partition {
  std::vector<std::vector<VertexId>> blocks;

  auto operator<=>(const Partition&) const = default;

  static Partition normalized(std::vector<std::vector<VertexId>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end());
    return Partition{std::move(blocks)};
  }

  std::size_t block_of(VertexId v) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (std::binary_search(blocks[i].begin(), blocks[i].end(), v)) return i;
    throw DomainError("partition: vertex " + std::to_string(v) + " not covered");
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      s += i ? ",{" : "{";
      for (std::size_t j = 0; j < blocks[i].size(); ++j) s += (j ? "," : "") + std::to_string(blocks[i][j]);
      s += "}";
    }
    return s + "}";
  }
};

inline void require_partition_of(const Partition& r, const ModularGraph& base) {
  std::set<VertexId> seen;
  for (const auto& b : r.blocks) {
    if (b.empty()) throw DomainError("partition has an empty block");
    for (VertexId v : b) {
      if (!base.has_vertex(v)) throw DomainError("partition names unknown vertex " + std::to_string(v));
      if (!seen.insert(v).second) throw DomainError("partition blocks overlap at vertex " + std::to_string(v));
    }
  }
  if (seen.size() != base.vertex_count()) throw DomainError("partition does not cover the base vertices");
}

// Base edges joining distinct blocks of R.
inline std::vector<EdgeId> split_edges(const ModularGraph& base, const Partition& r) {
  std::vector<EdgeId> out;
  for (auto [h, p] : base.edges())
    if (r.block_of(base.attach.at(h)) != r.block_of(base.attach.at(p))) out.push_back(h);
  return out;
}

inline std::int64_t split_edge_count(const ModularGraph& base, const Partition& r) {
  return static_cast<std::int64_t>(split_edges(base, r).size());
}

// 1 - chi(O) of the subcurve formed by each block's components and the
// nodes internal to it; may be negative for disconnected blocks.
inline std::vector<int> block_genera(const ModularGraph& base, const Partition& r) {
  std::vector<int> out(r.blocks.size(), 1);
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    for (VertexId v : r.blocks[i]) out[i] += base.genus.at(v) - 1;
  }
  for (auto [h, p] : base.edges()) {
    std::size_t a = r.block_of(base.attach.at(h));
    if (a == r.block_of(base.attach.at(p))) ++out[a];
  }
  return out;
}

// Base vertices are joined when a path in the deformed curve links them
// without crossing a bubble.
inline Partition stabilizer_partition(const DeformationOfBase& def) {
  detail::DisjointSets sets;
  for (VertexId v : def.base.vertices()) sets.add(v);
  for (const auto& block : def.blocks)
    for (VertexId v : block) sets.unite(block.front(), v);
  for (EdgeId e : def.kept_edges) {
    if (def.bubbled_edges.count(e)) continue;
    auto [a, b] = def.base.endpoints(e);
    sets.unite(a, b);
  }
  return Partition::normalized(sets.classes());
}

inline Partition stabilizer_partition(const DeformationOfBase& def, const std::set<EdgeId>& bubbles) {
  DeformationOfBase copy = def;
  copy.bubbled_edges = bubbles;
  return stabilizer_partition(copy);
}

// Non-trivial two-block partitions, in a fixed order: the first block holds
// the smallest vertex id; the second block runs through subsets of the
// remaining vertices by increasing bitmask.
inline std::vector<Partition> nt2b(const ModularGraph& base) {
  const auto verts = base.vertices();
  std::vector<Partition> out;
  if (verts.size() < 2) return out;
  if (verts.size() > 31) throw DomainError("nt2b: too many vertices");
  const std::size_t rest = verts.size() - 1;
  for (std::uint32_t mask = 1; mask < (1u << rest); ++mask) {
    std::vector<VertexId> plus{verts[0]}, minus;
    for (std::size_t i = 0; i < rest; ++i) (mask & (1u << i) ? minus : plus).push_back(verts[i + 1]);
    out.push_back(Partition{{plus, minus}});
  }
  return out;
}

// R-compatible deformations keep every node of E^split_R.
inline bool compatible(const DeformationOfBase& def, const Partition& r) {
  for (EdgeId e : split_edges(def.base, r))
    if (!def.kept_edges.count(e)) return false;
  return true;
}

// Per-block degree sums for an R-compatible deformation. Bubbles on split
// nodes of R are excluded; bubbles on nodes inside a block count toward it.
inline std::vector<std::int64_t> partial_sums(const DeformationOfBase& def, const Partition& r) {
  std::vector<std::int64_t> sums(r.blocks.size(), 0);
  for (std::size_t i = 0; i < def.blocks.size(); ++i) sums[r.block_of(def.blocks[i].front())] += def.block_degree[i];
  for (EdgeId e : def.bubbled_edges) {
    auto [a, b] = def.base.endpoints(e);
    std::size_t ra = r.block_of(a), rb = r.block_of(b);
    if (ra == rb) sums[ra] += 1;
  }
  return sums;
}

struct FixedComponentLabel {
  Partition partition;
  std::vector<std::int64_t> sums;  // one per block
  bool operator==(const FixedComponentLabel&) const = default;
};

// nullopt when the stratum is not fixed by G_R (some split node of R lacks a bubble).
inline std::optional<FixedComponentLabel> fixed_label(const DeformationOfBase& def, const Partition& r) {
  require_partition_of(r, def.base);
  for (EdgeId e : split_edges(def.base, r))
    if (!def.kept_edges.count(e) || !def.bubbled_edges.count(e)) return std::nullopt;
  return FixedComponentLabel{r, partial_sums(def, r)};
}

inline std::optional<FixedComponentLabel> fixed_label(const DegeneracyType& dt, const ModularGraph& base,
                                                      const Partition& r) {
  auto def = deformation_of(dt, base);
  if (!def) throw DomainError("fixed_label: stratum is not a deformation of the base");
  return fixed_label(*def, r);
}

struct BandBounds {
  std::int64_t upper = 1;  // N_u(R)
  std::int64_t lower = 0;  // N_l(R)
};

struct MultidegreeBounds {
  std::map<Partition, BandBounds> per_partition;

  static MultidegreeBounds uniform(const ModularGraph& base, std::int64_t upper, std::int64_t lower) {
    MultidegreeBounds b;
    for (auto& r : nt2b(base)) b.per_partition[r] = {upper, lower};
    b.require_ordered();
    return b;
  }

  // The minimal band S_N: N_u = N, N_l = N - 1.
  static MultidegreeBounds minimal(const ModularGraph& base, std::int64_t n) { return uniform(base, n, n - 1); }

  void require_ordered() const {
    for (const auto& [r, b] : per_partition)
      if (b.upper <= b.lower) throw DomainError("bounds for " + r.to_string() + " need N_u > N_l");
  }

  bool is_minimal() const {
    for (const auto& [r, b] : per_partition)
      if (b.upper != b.lower + 1) return false;
    return true;
  }
};

// True when every R-compatible condition holds; incompatible partitions
// (some split node of R smoothed) impose nothing.
inline bool in_band(const DeformationOfBase& def, const MultidegreeBounds& bounds) {
  bounds.require_ordered();
  const std::int64_t d = def.total_degree();
  for (const auto& [r, b] : bounds.per_partition) {
    if (r.blocks.size() != 2) throw DomainError("band bounds must be indexed by two-block partitions");
    if (!compatible(def, r)) continue;
    auto sums = partial_sums(def, r);
    const std::int64_t k = split_edge_count(def.base, r);
    if (sums[0] < d + b.lower - k + 1) return false;
    if (sums[1] < -b.upper + 1) return false;
  }
  return true;
}

inline bool in_band(const DegeneracyType& dt, const ModularGraph& base, const MultidegreeBounds& bounds) {
  auto def = deformation_of(dt, base);
  if (!def) throw DomainError("in_band: stratum is not a Gieseker deformation of the base");
  return in_band(*def, bounds);
}

enum class TailMembership { Upper, Lower, Neither };  // T^Z, T^W, neither

inline const char* to_string(TailMembership t) {
  switch (t) {
    case TailMembership::Upper: return "upper";
    case TailMembership::Lower: return "lower";
    default: return "neither";
  }
}

// Upper tail: the stratum flows from a fixed component with index
// n = -d_- >= N_u; lower tail: index n = d_+ - d + k <= N_l.
inline TailMembership tail_membership(const DeformationOfBase& def, const Partition& r, std::int64_t upper,
                                      std::int64_t lower) {
  if (upper <= lower) throw DomainError("tail_membership: need N_u > N_l");
  if (r.blocks.size() != 2) throw DomainError("tail_membership: partition must have two blocks");
  if (!compatible(def, r)) return TailMembership::Neither;
  auto sums = partial_sums(def, r);
  const std::int64_t d = def.total_degree();
  const std::int64_t k = split_edge_count(def.base, r);
  if (-sums[1] >= upper) return TailMembership::Upper;
  if (sums[0] - d + k <= lower) return TailMembership::Lower;
  return TailMembership::Neither;
}

inline TailMembership tail_membership(const DegeneracyType& dt, const ModularGraph& base, const Partition& r,
                                      std::int64_t upper, std::int64_t lower) {
  auto def = deformation_of(dt, base);
  if (!def) throw DomainError("tail_membership: stratum is not a Gieseker deformation of the base");
  return tail_membership(*def, r, upper, lower);
}

// ---------------------------------------------------------------------------
// Twist lattice

struct IntersectionData {
  std::vector<VertexId> index;
  std::vector<std::vector<std::int64_t>> matrix;
};

inline IntersectionData intersection_data(const ModularGraph& base) {
  require_valid(base);
  IntersectionData data;
  data.index = base.vertices();
  const std::size_t n = data.index.size();
  std::map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[data.index[i]] = i;
  data.matrix.assign(n, std::vector<std::int64_t>(n, 0));
  for (auto [h, p] : base.edges()) {
    std::size_t a = pos.at(base.attach.at(h)), b = pos.at(base.attach.at(p));
    if (a == b) continue;
    ++data.matrix[a][b];
    ++data.matrix[b][a];
    --data.matrix[a][a];
    --data.matrix[b][b];
  }
  return data;
}

inline Multidegree twist(const Multidegree& degrees, const std::map<VertexId, std::int64_t>& coeffs,
                         const IntersectionData& data) {
  const std::size_t n = data.index.size();
  if (degrees.size() != n || coeffs.size() != n) throw DomainError("twist: index mismatch");
  Multidegree out;
  for (std::size_t i = 0; i < n; ++i) {
    VertexId v = data.index[i];
    if (!degrees.count(v) || !coeffs.count(v)) throw DomainError("twist: index mismatch at vertex " + std::to_string(v));
    std::int64_t x = degrees.at(v);
    for (std::size_t j = 0; j < n; ++j) x += data.matrix[i][j] * coeffs.at(data.index[j]);
    out[v] = x;
  }
  return out;
}

// Whether `shift` lies in the column span of the intersection matrix. For a
// connected base the kernel is spanned by the all-ones vector, so fixing the
// first coefficient to zero leaves an invertible reduced system.
inline std::optional<std::vector<std::int64_t>> twist_coefficients(const IntersectionData& data,
                                                                   const std::vector<std::int64_t>& shift) {
  const std::size_t n = data.index.size();
  if (shift.size() != n) throw DomainError("twist_coefficients: index mismatch");
  std::int64_t total = 0;
  for (auto x : shift) total += x;
  if (total != 0) return std::nullopt;
  if (n == 1) return std::vector<std::int64_t>{0};
  const std::size_t m = n - 1;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i][j] = Rational(data.matrix[i + 1][j + 1]);
    a[i][m] = Rational(shift[i + 1]);
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && a[pivot][col] == Rational(0)) ++pivot;
    if (pivot == m) throw DomainError("twist_coefficients: base graph is not connected through split nodes");
    std::swap(a[col], a[pivot]);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == col || a[i][col] == Rational(0)) continue;
      Rational f = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= m; ++j) a[i][j] -= f * a[col][j];
    }
  }
  std::vector<std::int64_t> coeffs(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    Rational c = a[i][m] / a[i][i];
    if (!is_integer(c)) return std::nullopt;
    coeffs[i + 1] = c.numerator();
  }
  return coeffs;
}

namespace detail {

inline DeformationOfBase unbubbled_over(const ModularGraph& base, const Multidegree& degrees) {
  DeformationOfBase def;
  def.base = base;
  for (auto [h, p] : base.edges()) def.kept_edges.insert(h);
  for (VertexId v : base.vertices()) {
    def.blocks.push_back({v});
    def.block_degree.push_back(degrees.at(v));
  }
  return def;
}

}  // namespace detail

// All twists of `degrees` whose unbubbled stratum lies in the band. The
// singleton partitions confine each vertex degree to a finite window, so the
// search enumerates that box and keeps the lattice members.
inline std::vector<Multidegree> band_representatives(const Multidegree& degrees, const ModularGraph& base,
                                                     const MultidegreeBounds& bounds) {
  require_valid(base);
  bounds.require_ordered();
  const auto verts = base.vertices();
  for (VertexId v : verts)
    if (!degrees.count(v)) throw DomainError("band_representatives: multidegree missing vertex " + std::to_string(v));
  if (degrees.size() != verts.size()) throw DomainError("band_representatives: multidegree has extra vertices");
  const auto data = intersection_data(base);
  std::int64_t d = 0;
  for (auto [v, x] : degrees) d += x;
  if (verts.size() == 1) return {degrees};

  std::vector<DegreeInterval> window(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    std::vector<VertexId> rest;
    for (VertexId w : verts)
      if (w != verts[i]) rest.push_back(w);
    const Partition single = i == 0 ? Partition{{{verts[0]}, rest}} : Partition{{rest, {verts[i]}}};
    auto it = bounds.per_partition.find(single);
    if (it == bounds.per_partition.end())
      throw DomainError("band_representatives: bounds missing partition " + single.to_string());
    const std::int64_t k = split_edge_count(base, single);
    const auto& b = it->second;
    if (i == 0)
      window[i] = {d + b.lower - k + 1, d + b.upper - 1};
    else
      window[i] = {-b.upper + 1, -b.lower + k - 1};
  }

  std::vector<Multidegree> out;
  std::vector<std::int64_t> current(verts.size());
  std::function<void(std::size_t, std::int64_t)> search = [&](std::size_t i, std::int64_t remaining) {
    if (i + 1 == verts.size()) {
      if (!window[i].contains(remaining)) return;
      current[i] = remaining;
      Multidegree candidate;
      std::vector<std::int64_t> shift(verts.size());
      for (std::size_t j = 0; j < verts.size(); ++j) {
        candidate[verts[j]] = current[j];
        shift[j] = current[j] - degrees.at(verts[j]);
      }
      if (!in_band(detail::unbubbled_over(base, candidate), bounds)) return;
      if (!twist_coefficients(data, shift)) return;
      out.push_back(std::move(candidate));
      return;
    }
    for (std::int64_t x = window[i].lo; x <= window[i].hi; ++x) {
      current[i] = x;
      search(i + 1, remaining - x);
    }
  };
  search(0, d);
  if (out.empty())
    throw DomainError("band_representatives: no twist of the multidegree lies in the band "
                      "(search over the band-feasible box exhausted)");
  if (bounds.is_minimal() && verts.size() == 2 && out.size() != 1)
    throw DomainError("band_representatives: minimal band on a two-vertex base admits several twists");
  return out;
}

}  // namespace gkinv
