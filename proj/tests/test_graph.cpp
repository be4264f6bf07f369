#include <gtest/gtest.h>

#include <random>

#include "gkinv/graph.hpp"
#include "gkinv/io.hpp"
#include "oracles.hpp"

using namespace gkinv;

namespace {

ModularGraph two_pointed_pair() {
  ModularGraph g;
  VertexId a = g.add_vertex(0), b = g.add_vertex(0);
  g.add_tail(a, "1");
  g.add_tail(a, "2");
  g.add_tail(b, "3");
  g.add_tail(b, "4");
  g.add_edge(a, b);
  return g;
}

ModularGraph random_graph(std::mt19937_64& rng, int n, int edges, int tails) {
  ModularGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(static_cast<int>(rng() % 2));
  for (int i = 1; i < n; ++i) g.add_edge(static_cast<int>(rng() % i), i);
  for (int i = n - 1; i < edges; ++i) g.add_edge(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
  for (int i = 0; i < tails; ++i) g.add_tail(static_cast<int>(rng() % n), "p" + std::to_string(i));
  return g;
}

// Same graph with vertices and half-edges renumbered at random.
ModularGraph shuffled(const ModularGraph& g, std::mt19937_64& rng) {
  std::vector<VertexId> vs = g.vertices();
  std::vector<VertexId> perm = vs;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::map<VertexId, VertexId> vmap;
  for (std::size_t i = 0; i < vs.size(); ++i) vmap[vs[i]] = perm[i] + 100;
  std::vector<HalfEdgeId> hs;
  for (const auto& [h, v] : g.attach) hs.push_back(h);
  std::vector<HalfEdgeId> hperm = hs;
  std::shuffle(hperm.begin(), hperm.end(), rng);
  std::map<HalfEdgeId, HalfEdgeId> hmap;
  for (std::size_t i = 0; i < hs.size(); ++i) hmap[hs[i]] = hperm[i] + 500;
  ModularGraph out;
  for (const auto& [v, gv] : g.genus) out.genus[vmap[v]] = gv;
  for (const auto& [h, v] : g.attach) out.attach[hmap[h]] = vmap[v];
  for (const auto& [h, p] : g.involution) out.involution[hmap[h]] = hmap[p];
  for (const auto& [h, l] : g.tails) out.tails[hmap[h]] = l;
  return out;
}

}  // namespace

TEST(Validate, AcceptsWellFormedGraph) {
  auto g = two_pointed_pair();
  EXPECT_TRUE(validate(g).ok());
  EXPECT_EQ(total_genus(g), 0);
  EXPECT_TRUE(is_stable(g));
}

TEST(Validate, RejectsBrokenInvolution) {
  auto g = two_pointed_pair();
  g.involution[0] = 4;  // 0 -> 4 but 4 -> 5
  auto report = validate(g);
  ASSERT_FALSE(report.ok());
}

TEST(Validate, RejectsDisconnectedAndEmpty) {
  ModularGraph g;
  EXPECT_FALSE(validate(g).ok());
  g.add_vertex(1);
  g.add_vertex(1);
  auto report = validate(g);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front(), "disconnected");
}

TEST(Validate, RejectsDuplicateTailLabels) {
  ModularGraph g;
  VertexId v = g.add_vertex(1);
  g.add_tail(v, "x");
  g.add_tail(v, "x");
  EXPECT_FALSE(validate(g).ok());
}

TEST(TotalGenus, LoopsAndCyclesCount) {
  ModularGraph g;
  VertexId a = g.add_vertex(1), b = g.add_vertex(0);
  g.add_edge(a, b);
  g.add_edge(a, b);
  g.add_edge(b, b);
  // 1 + 0 + 3 edges - 2 vertices + 1
  EXPECT_EQ(total_genus(g), 3);
}

TEST(Stability, LowGenusThresholds) {
  ModularGraph g;
  VertexId v = g.add_vertex(0);
  g.add_tail(v, "1");
  g.add_tail(v, "2");
  EXPECT_FALSE(is_stable_vertex(g, v));
  g.add_tail(v, "3");
  EXPECT_TRUE(is_stable_vertex(g, v));
  ModularGraph e;
  VertexId w = e.add_vertex(1);
  EXPECT_FALSE(is_stable_vertex(e, w));
  e.add_tail(w, "1");
  EXPECT_TRUE(is_stable_vertex(e, w));
}

TEST(Canonical, InvariantUnderRelabelling) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_graph(rng, 1 + static_cast<int>(rng() % 6), 7, static_cast<int>(rng() % 3));
    auto h = shuffled(g, rng);
    EXPECT_EQ(canonical_form(g).digest, canonical_form(h).digest);
    auto iso = find_isomorphism(g, h);
    ASSERT_TRUE(iso.has_value());
    for (const auto& [v, w] : iso->vertex_map) EXPECT_EQ(g.genus.at(v), h.genus.at(w));
    for (const auto& [x, y] : iso->half_edge_map) {
      EXPECT_EQ(iso->vertex_map.at(g.attach.at(x)), h.attach.at(y));
      EXPECT_EQ(iso->half_edge_map.at(g.partner(x)), h.partner(y));
    }
  }
}

TEST(Canonical, SeparatesNonIsomorphicGraphsLikeBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_graph(rng, 4, 5, 1);
    auto b = random_graph(rng, 4, 5, 1);
    const bool same = oracle::brute_key(oracle::from_graph(a), false) == oracle::brute_key(oracle::from_graph(b), false);
    EXPECT_EQ(canonical_form(a).digest == canonical_form(b).digest, same);
    EXPECT_EQ(find_isomorphism(a, b).has_value(), same);
  }
}

TEST(Canonical, DecorationDistinguishesDegrees) {
  auto g = two_pointed_pair();
  VertexDecoration d1{{0, 1}, {1, -1}}, d2{{0, -1}, {1, 1}};
  EXPECT_NE(canonical_form(g, &d1).digest, canonical_form(g, &d2).digest);
  EXPECT_FALSE(find_isomorphism(g, g, &d1, &d2).has_value());
}

TEST(Canonical, RespectsVertexLimit) {
  ModularGraph g;
  for (int i = 0; i < 13; ++i) g.add_vertex(1);
  for (int i = 1; i < 13; ++i) g.add_edge(i - 1, i);
  EXPECT_THROW(canonical_form(g), DomainError);
  EXPECT_NO_THROW(canonical_form(g, nullptr, 13));
}

TEST(Json, RoundTripIsLossless) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = shuffled(random_graph(rng, 3, 5, 2), rng);
    auto back = io::graph_from_json(io::to_json(g));
    EXPECT_EQ(back, g);
  }
}

TEST(Json, SingleSidedPairsAndPointers) {
  auto j = io::json::parse(R"({"vertices":[{"id":0,"genus":1}],
    "half_edges":[{"id":0,"vertex":0},{"id":1,"vertex":0}],"involution":[[0,1]],"tails":{}})");
  auto g = io::graph_from_json(j);
  EXPECT_EQ(g.partner(1), 0);
  EXPECT_EQ(total_genus(g), 2);

  j["vertices"][0]["colour"] = 3;
  try {
    io::graph_from_json(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/vertices/0/colour");
  }
}
