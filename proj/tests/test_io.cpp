#include <gtest/gtest.h>

#include <random>

#include "gkinv/io.hpp"
#include "oracles.hpp"

using namespace gkinv;

TEST(Json, CharacterRoundTrip) {
  LaurentCharacter c(2);
  c.add_term({Rational(1, 2), Rational(-3)}, 4);
  c.add_term({Rational(0), Rational(0)}, -1);
  auto j = io::to_json(c);
  EXPECT_EQ(j["terms"][0]["exp"][0], "0/1");
  EXPECT_EQ(io::character_from_json(j, 2), c);
}

TEST(Json, DegeneracyRoundTrip) {
  DegeneracyType dt;
  VertexId a = dt.graph.add_vertex(1), b = dt.graph.add_vertex(2);
  dt.graph.add_tail(a, "x");
  dt.graph.add_edge(a, b);
  dt.multidegree = {{a, 3}, {b, -5}};
  EXPECT_EQ(io::degeneracy_from_json(io::to_json(dt)), dt);
}

TEST(Json, PartitionAndMultidegree) {
  auto r = Partition::normalized({{2, 0}, {1}});
  EXPECT_EQ(io::partition_from_json(io::to_json(r)), r);
  auto m = io::multidegree_from_json(io::json::parse(R"({"0": 3, "4": -1})"));
  EXPECT_EQ(m, (Multidegree{{0, 3}, {4, -1}}));
  EXPECT_THROW(io::multidegree_from_json(io::json::parse(R"({"a": 3})")), SchemaError);
}

TEST(Json, SpecParsing) {
  auto file = io::spec_from_json(io::json::parse(R"({"q":"3/2","evaluations":[{"label":"1","lambda":2,"descendant":1}],
    "indices":[{"lambda":-1,"power":2}],"genus":0,"markings":["1","2","3"],"total_degree":"scan"})"));
  EXPECT_EQ(file.spec.q, Rational(3, 2));
  ASSERT_EQ(file.spec.evaluations.size(), 1u);
  EXPECT_EQ(file.spec.evaluations[0].descendant, 1);
  EXPECT_EQ(file.spec.indices[0].power, 2);
  EXPECT_FALSE(file.total_degree.has_value());

  try {
    io::spec_from_json(io::json::parse(R"({"q":"1/1","evaluations":[],"indices":[],"colour":1})"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/colour");
  }
  EXPECT_THROW(io::spec_from_json(io::json::parse(R"({"q":"-1/2","evaluations":[],"indices":[]})")), DomainError);
}

TEST(Json, SpecRoundTrip) {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 30; ++i) {
    auto spec = oracle::random_g0n3_spec(rng);
    auto back = io::spec_from_json(io::to_json(spec)).spec;
    EXPECT_EQ(back.q, spec.q);
    ASSERT_EQ(back.evaluations.size(), spec.evaluations.size());
    for (std::size_t k = 0; k < spec.evaluations.size(); ++k) {
      EXPECT_EQ(back.evaluations[k].label, spec.evaluations[k].label);
      EXPECT_EQ(back.evaluations[k].lambda, spec.evaluations[k].lambda);
    }
    ASSERT_EQ(back.indices.size(), spec.indices.size());
  }
}

TEST(Json, InvariantResultFields) {
  auto j = io::to_json(invariant_g0_n3(AdmissibleClassSpec{}));
  EXPECT_EQ(j["value"], 1);
  EXPECT_TRUE(j.contains("breakdown"));
  EXPECT_TRUE(j.contains("stabilization_truncation"));
}
