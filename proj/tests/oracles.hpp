#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gkinv/character.hpp"
#include "gkinv/degeneration.hpp"
#include "gkinv/graph.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// A plain multigraph form: vertex attributes plus an edge list.

struct Vertex {
  int genus = 0;
  std::int64_t degree = 0;
  std::vector<std::string> tails;  // sorted
  auto operator<=>(const Vertex&) const = default;
};

struct Plain {
  std::vector<Vertex> vertices;
  std::vector<std::pair<int, int>> edges;  // endpoints as vertex indices, a <= b
};

inline Plain from_graph(const gkinv::ModularGraph& g, const gkinv::Multidegree* degrees = nullptr) {
  Plain p;
  std::map<gkinv::VertexId, int> index;
  for (const auto& [v, gv] : g.genus) {
    index[v] = static_cast<int>(p.vertices.size());
    Vertex x;
    x.genus = gv;
    if (degrees) x.degree = degrees->at(v);
    p.vertices.push_back(x);
  }
  for (const auto& [h, label] : g.tails) p.vertices[index.at(g.attach.at(h))].tails.push_back(label);
  for (auto& v : p.vertices) std::sort(v.tails.begin(), v.tails.end());
  for (const auto& [h, w] : g.attach) {
    auto it = g.involution.find(h);
    if (it == g.involution.end() || it->second <= h) continue;
    int a = index.at(w), b = index.at(g.attach.at(it->second));
    p.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return p;
}

inline gkinv::DegeneracyType to_degeneracy(const Plain& p) {
  gkinv::DegeneracyType dt;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    dt.graph.genus[static_cast<int>(i)] = p.vertices[i].genus;
    dt.multidegree[static_cast<int>(i)] = p.vertices[i].degree;
  }
  int h = 0;
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    for (const auto& label : p.vertices[i].tails) {
      dt.graph.attach[h] = static_cast<int>(i);
      dt.graph.tails[h] = label;
      ++h;
    }
  for (auto [a, b] : p.edges) {
    dt.graph.attach[h] = a;
    dt.graph.attach[h + 1] = b;
    dt.graph.involution[h] = h + 1;
    dt.graph.involution[h + 1] = h;
    h += 2;
  }
  return dt;
}

inline std::vector<std::vector<int>> multiplicities(const Plain& p) {
  const std::size_t n = p.vertices.size();
  std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
  for (auto [a, b] : p.edges) {
    ++m[a][b];
    if (a != b) ++m[b][a];
  }
  return m;
}

// Lexicographically least encoding over all vertex orders.
inline std::vector<std::int64_t> brute_key(const Plain& p, bool with_degrees) {
  const std::size_t n = p.vertices.size();
  const auto m = multiplicities(p);
  std::map<std::string, int> label_ids;
  for (const auto& v : p.vertices)
    for (const auto& t : v.tails) label_ids.emplace(t, 0);
  int next = 0;
  for (auto& [t, id] : label_ids) id = next++;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::int64_t> best;
  do {
    std::vector<std::int64_t> key;
    for (int i : order) {
      key.push_back(p.vertices[i].genus);
      if (with_degrees) key.push_back(p.vertices[i].degree);
      key.push_back(static_cast<std::int64_t>(p.vertices[i].tails.size()));
      for (const auto& t : p.vertices[i].tails) key.push_back(label_ids.at(t));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) key.push_back(m[order[i]][order[j]]);
    if (best.empty() || key < best) best = std::move(key);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

using VertexSignature = std::tuple<Vertex, int, std::vector<int>>;

inline std::vector<VertexSignature> signatures(const Plain& p, const std::vector<std::vector<int>>& m) {
  std::vector<VertexSignature> out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    std::vector<int> row = m[i];
    std::sort(row.begin(), row.end());
    out.emplace_back(p.vertices[i], m[i][i], std::move(row));
  }
  return out;
}

// Isomorphism invariant: the sorted vertex signatures.
inline std::vector<VertexSignature> invariant(const Plain& p) {
  auto s = signatures(p, multiplicities(p));
  std::sort(s.begin(), s.end());
  return s;
}

// Backtracking isomorphism search; pruned by vertex attributes and edge
// multiplicities, practical for the strata sizes in the tests.
inline bool isomorphic(const Plain& a, const Plain& b) {
  const std::size_t n = a.vertices.size();
  if (n != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
  const auto ma = multiplicities(a), mb = multiplicities(b);
  const auto sa = signatures(a, ma), sb = signatures(b, mb);
  std::vector<int> image(n, -1);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> extend = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || sa[i] != sb[j]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k) ok = ma[i][k] == mb[j][image[k]];
      if (!ok) continue;
      image[i] = static_cast<int>(j);
      used[j] = true;
      if (extend(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return extend(0);
}

// ---------------------------------------------------------------------------
// Gieseker strata, generated by the three elementary operations directly on
// the plain form.

inline int special_points(const Plain& p, int v) {
  int s = static_cast<int>(p.vertices[v].tails.size());
  for (auto [a, b] : p.edges) s += (a == v) + (b == v);
  return s;
}

inline bool is_bubble(const Plain& p, int v) {
  const auto& x = p.vertices[v];
  if (x.genus != 0 || !x.tails.empty() || special_points(p, v) != 2) return false;
  for (auto [a, b] : p.edges)
    if (a == v && b == v) return false;
  return x.degree == 1;
}

inline bool gieseker_valid(const Plain& p) {
  const int n = static_cast<int>(p.vertices.size());
  std::vector<bool> bubble(n);
  for (int v = 0; v < n; ++v) bubble[v] = is_bubble(p, v);
  for (auto [a, b] : p.edges)
    if (a != b && bubble[a] && bubble[b]) return false;
  for (int v = 0; v < n; ++v) {
    if (bubble[v]) continue;
    const int g = p.vertices[v].genus, s = special_points(p, v);
    if ((g == 0 && s < 3) || (g == 1 && s < 1)) return false;
  }
  return true;
}

struct BandLimits {
  std::int64_t lo, hi;
};

inline bool degrees_within(const Plain& p, BandLimits band) {
  for (int v = 0; v < static_cast<int>(p.vertices.size()); ++v)
    if (!is_bubble(p, v) && (p.vertices[v].degree < band.lo || p.vertices[v].degree > band.hi)) return false;
  return true;
}

inline std::vector<Plain> one_step(const Plain& p, BandLimits band) {
  std::vector<Plain> out;
  auto keep = [&](Plain q) {
    if (gieseker_valid(q) && degrees_within(q, band)) out.push_back(std::move(q));
  };
  const int n = static_cast<int>(p.vertices.size());
  for (int v = 0; v < n; ++v) {
    if (is_bubble(p, v)) continue;
    const auto& x = p.vertices[v];
    if (x.genus >= 1) {
      Plain q = p;
      q.vertices[v].genus -= 1;
      q.edges.emplace_back(v, v);
      keep(q);
    }
    // Edge ends at v: one slot per end, so a loop contributes two.
    std::vector<std::pair<int, int>> ends;  // (edge index, which end)
    for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) {
      if (p.edges[e].first == v) ends.emplace_back(e, 0);
      if (p.edges[e].second == v) ends.emplace_back(e, 1);
    }
    const int t = static_cast<int>(x.tails.size()), k = static_cast<int>(ends.size());
    for (int mask = 0; mask < (1 << (t + k)); ++mask)
      for (int g1 = 0; g1 <= x.genus; ++g1)
        for (std::int64_t d1 = std::min<std::int64_t>(band.lo, 1); d1 <= std::max<std::int64_t>(band.hi, 1); ++d1) {
          Plain q = p;
          const int w = n;
          q.vertices.push_back(Vertex{x.genus - g1, x.degree - d1, {}});
          q.vertices[v].genus = g1;
          q.vertices[v].degree = d1;
          q.vertices[v].tails.clear();
          for (int i = 0; i < t; ++i) (mask >> i & 1 ? q.vertices[w] : q.vertices[v]).tails.push_back(x.tails[i]);
          for (int i = 0; i < k; ++i) {
            if (!(mask >> (t + i) & 1)) continue;
            auto [e, end] = ends[i];
            (end == 0 ? q.edges[e].first : q.edges[e].second) = w;
          }
          for (auto& [a, b] : q.edges)
            if (a > b) std::swap(a, b);
          q.edges.emplace_back(v, w);
          keep(q);
        }
  }
  for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) {
    auto [a, b] = p.edges[e];
    if (is_bubble(p, a) || is_bubble(p, b)) continue;
    for (int side = 0; side < 2; ++side) {
      if (a == b && side == 1) continue;
      Plain q = p;
      const int w = n;
      q.vertices.push_back(Vertex{0, 1, {}});
      q.vertices[side == 0 ? a : b].degree -= 1;
      q.edges[e] = {std::min(a, w), std::max(a, w)};
      q.edges.emplace_back(std::min(b, w), std::max(b, w));
      keep(q);
    }
  }
  return out;
}

// Index of isomorphism classes, bucketed by invariant.
class IsoIndex {
 public:
  // Returns the index of the class of `p`, and whether it was new.
  std::pair<std::size_t, bool> insert(const Plain& p) {
    auto& bucket = buckets_[invariant(p)];
    for (std::size_t i : bucket)
      if (isomorphic(items_[i], p)) return {i, false};
    bucket.push_back(items_.size());
    items_.push_back(p);
    return {items_.size() - 1, true};
  }
  std::optional<std::size_t> find(const Plain& p) const {
    auto it = buckets_.find(invariant(p));
    if (it == buckets_.end()) return std::nullopt;
    for (std::size_t i : it->second)
      if (isomorphic(items_[i], p)) return i;
    return std::nullopt;
  }
  const std::vector<Plain>& items() const { return items_; }

 private:
  std::map<std::vector<VertexSignature>, std::vector<std::size_t>> buckets_;
  std::vector<Plain> items_;
};

struct Closure {
  IsoIndex classes;
  std::set<std::pair<std::size_t, std::size_t>> relations;  // class indices
};

// Breadth-first closure, one representative per isomorphism class.
inline Closure closure_with_relations(const Plain& root, BandLimits band) {
  Closure out;
  out.classes.insert(root);
  for (std::size_t i = 0; i < out.classes.items().size(); ++i) {
    const Plain current = out.classes.items()[i];
    for (auto& q : one_step(current, band)) {
      auto [j, fresh] = out.classes.insert(q);
      if (j != i) out.relations.insert({i, j});
    }
  }
  return out;
}

inline std::vector<Plain> closure(const Plain& root, BandLimits band) {
  return closure_with_relations(root, band).classes.items();
}

// ---------------------------------------------------------------------------
// Exhaustive connected multigraphs (loops allowed) on n labelled vertices.

inline void for_each_connected_multigraph(int n, int max_edges,
                                          const std::function<void(const std::vector<std::pair<int, int>>&)>& fn) {
  std::vector<std::pair<int, int>> kinds;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) kinds.emplace_back(a, b);
  std::vector<std::pair<int, int>> edges;
  auto connected = [&]() {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int components = n;
    for (auto [a, b] : edges) {
      int ra = find(a), rb = find(b);
      if (ra != rb) {
        parent[ra] = rb;
        --components;
      }
    }
    return components == 1;
  };
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    if (connected()) fn(edges);
    if (static_cast<int>(edges.size()) == max_edges) return;
    for (std::size_t k = from; k < kinds.size(); ++k) {
      edges.push_back(kinds[k]);
      grow(k);
      edges.pop_back();
    }
  };
  grow(0);
}

// ---------------------------------------------------------------------------
// Intersection matrix and twists, from the edge list.

inline std::vector<std::vector<std::int64_t>> intersection_matrix(const Plain& p) {
  const std::size_t n = p.vertices.size();
  std::vector<std::vector<std::int64_t>> k(n, std::vector<std::int64_t>(n, 0));
  for (auto [a, b] : p.edges) {
    if (a == b) continue;
    k[a][b] += 1;
    k[b][a] += 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) k[i][i] -= k[i][j];
  return k;
}

// Band conditions for an unbubbled stratum with every base node kept. For
// the two-block partition with `plus` on the "+" side: d_+ >= d + N_l - k + 1
// and d_- >= 1 - N_u.
inline bool unbubbled_in_band(const Plain& p, const std::vector<std::int64_t>& degrees,
                              const std::function<std::pair<std::int64_t, std::int64_t>(std::uint32_t)>& bounds) {
  const int n = static_cast<int>(p.vertices.size());
  std::int64_t d = 0;
  for (auto x : degrees) d += x;
  for (std::uint32_t minus = 1; minus < (1u << n); ++minus) {
    if (minus & 1u) continue;  // vertex 0 is always on the "+" side
    std::int64_t dp = 0, dm = 0, k = 0;
    for (int v = 0; v < n; ++v) (minus >> v & 1 ? dm : dp) += degrees[v];
    for (auto [a, b] : p.edges)
      if ((minus >> a & 1) != (minus >> b & 1)) ++k;
    auto [nu, nl] = bounds(minus);
    if (dp < d + nl - k + 1 || dm < 1 - nu) return false;
  }
  return true;
}

// Twists by coefficient vectors in a box, with c_0 = 0, that land in the band.
inline std::set<std::vector<std::int64_t>> box_twists_in_band(
    const Plain& p, const std::vector<std::int64_t>& degrees, std::int64_t box,
    const std::function<std::pair<std::int64_t, std::int64_t>(std::uint32_t)>& bounds) {
  const int n = static_cast<int>(p.vertices.size());
  const auto k = intersection_matrix(p);
  std::set<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> c(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      std::vector<std::int64_t> e(n);
      for (int a = 0; a < n; ++a) {
        e[a] = degrees[a];
        for (int b = 0; b < n; ++b) e[a] += k[a][b] * c[b];
      }
      if (unbubbled_in_band(p, e, bounds)) out.insert(e);
      return;
    }
    for (c[i] = -box; c[i] <= box; ++c[i]) rec(i + 1);
    c[i] = 0;
  };
  if (n == 1) {
    out.insert(degrees);
    return out;
  }
  rec(1);
  return out;
}

// ---------------------------------------------------------------------------
// (0,3) weight-zero scan: the fixed-point character is a single monomial
// c * t^E with E = q(d+1) - sum(lambda_i) - sum(n_a lambda_a) and
// c = prod (lambda_a d + 1)^{n_a}.

inline std::map<std::int64_t, std::int64_t> g0n3_scan(const gkinv::AdmissibleClassSpec& spec, std::int64_t lo,
                                                      std::int64_t hi) {
  const std::int64_t qn = spec.q.numerator(), qd = spec.q.denominator();
  std::int64_t s = 0;
  for (const auto& ev : spec.evaluations) s += ev.lambda;
  for (const auto& ix : spec.indices) s += ix.power * ix.lambda;
  std::map<std::int64_t, std::int64_t> out;
  for (std::int64_t d = lo; d <= hi; ++d) {
    if (qn * (d + 1) != qd * s) continue;
    std::int64_t c = 1;
    for (const auto& ix : spec.indices)
      for (std::int64_t k = 0; k < ix.power; ++k) c *= ix.lambda * d + 1;
    if (c != 0) out[d] = c;
  }
  return out;
}

// Global sections of O(n) on P^1 have the monomial basis x^i y^(n-i); the
// scalar circle acts on each with weight -1, so det(H^0) has weight -(n+1)
// and det^{-q} has weight q(n+1).
inline gkinv::Rational determinant_inverse_weight(std::int64_t n, const gkinv::Rational& q) {
  std::int64_t count = 0;
  for (std::int64_t i = 0; i <= n; ++i) ++count;
  const gkinv::Rational det_weight(-count);
  return -q * det_weight;
}

// Sections of a degree-m bundle on one P^1 through monomials in the two
// chart coordinates: z^j has weight j*u relative to the left fiber. For m < 0
// the H^1 basis is z^{-j}, j = 1..-m-1, counted with a minus sign.
inline gkinv::LaurentCharacter monomial_sections(const gkinv::Exponent& left, std::int64_t m,
                                                 const gkinv::Exponent& u) {
  gkinv::LaurentCharacter out(left.size());
  auto put = [&](std::int64_t j, std::int64_t sign) {
    gkinv::Exponent e = left;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += gkinv::Rational(j) * u[i];
    out.add_term(e, sign);
  };
  for (std::int64_t j = 0; j <= m; ++j) put(j, 1);
  for (std::int64_t j = 1; j <= -m - 1; ++j) put(-j, -1);
  return out;
}

// ---------------------------------------------------------------------------
// Random specs

inline gkinv::AdmissibleClassSpec random_g0n3_spec(std::mt19937_64& rng) {
  const gkinv::Rational qs[] = {gkinv::Rational(1), gkinv::Rational(1, 2), gkinv::Rational(2), gkinv::Rational(3, 2)};
  gkinv::AdmissibleClassSpec spec;
  spec.q = qs[rng() % 4];
  const int evals = static_cast<int>(rng() % 4);
  for (int i = 0; i < evals; ++i)
    spec.evaluations.push_back({std::to_string(i + 1), static_cast<std::int64_t>(rng() % 11) - 5,
                                static_cast<std::int64_t>(rng() % 3)});
  const int indices = static_cast<int>(rng() % 3);
  for (int i = 0; i < indices; ++i)
    spec.indices.push_back({static_cast<std::int64_t>(rng() % 11) - 5, static_cast<std::int64_t>(rng() % 3)});
  return spec;
}

inline gkinv::AdmissibleClassSpec random_g0n4_spec(std::mt19937_64& rng) {
  gkinv::AdmissibleClassSpec spec;
  spec.q = gkinv::Rational(static_cast<std::int64_t>(rng() % 3) + 1);
  std::vector<std::string> labels{"1", "2", "3", "4"};
  std::shuffle(labels.begin(), labels.end(), rng);
  const int evals = static_cast<int>(rng() % 3);
  for (int i = 0; i < evals; ++i)
    spec.evaluations.push_back({labels[i], static_cast<std::int64_t>(rng() % 7) - 3,
                                static_cast<std::int64_t>(rng() % 2)});
  int budget = 2;
  const int indices = static_cast<int>(rng() % 3);
  for (int i = 0; i < indices && budget > 0; ++i) {
    const std::int64_t power = 1 + static_cast<std::int64_t>(rng() % budget);
    budget -= static_cast<int>(power);
    spec.indices.push_back({static_cast<std::int64_t>(rng() % 7) - 3, power});
  }
  return spec;
}

}  // namespace oracle
