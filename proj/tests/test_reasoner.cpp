#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "opra/reasoner.hpp"

using namespace opra;

namespace {

Granularity G(int m) { return Granularity(m); }
BaseRelation S(int m, int i) { return BaseRelation::same_pos(G(m), i); }
BaseRelation D(int m, int i, int j) { return BaseRelation::diff_pos(G(m), i, j); }

const CompositionTable& table(int m) {
  static const CompositionTable t1 = build_table(G(1));
  static const CompositionTable t2 = build_table(G(2));
  return m == 1 ? t1 : t2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RelationSet random_set(Granularity g, std::mt19937_64& rng, int keep_one_in) {
  RelationSet s(g);
  for (const auto& r : enumerate_base_relations(g))
    if (static_cast<int>(rng() % static_cast<unsigned>(keep_one_in)) == 0) s = s.with(r);
  return s;
}

ConstraintNetwork random_network(Granularity g, std::mt19937_64& rng) {
  const int n = 3 + static_cast<int>(rng() % 4);
  ConstraintNetwork net(g);
  for (int v = 0; v < n; ++v) net.add_variable("v" + std::to_string(v));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (rng() % 3 != 0) net.intersect(x, y, random_set(g, rng, 2));
  return net;
}

// Every ordered triple satisfies R_ij within R_ik o R_kj.
bool is_fixed_point(const ConstraintNetwork& net, const CompositionTable& t) {
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j)
      for (std::size_t k = 0; k < net.size(); ++k)
        if (!net.at(i, j).is_subset_of(t.compose(net.at(i, k), net.at(k, j)))) return false;
  return true;
}

}  // namespace

TEST(ConstraintNetwork, DiagonalAndConverseMirror) {
  ConstraintNetwork net(G(2), {"A", "B", "C"});
  EXPECT_EQ(net.at("A", "A"), RelationSet::singleton(S(2, 0)));
  EXPECT_TRUE(net.at("A", "B").is_full());
  const RelationSet r(G(2), {D(2, 7, 1), S(2, 3)});
  net.intersect("A", "B", r);
  EXPECT_EQ(net.at("A", "B"), r);
  EXPECT_EQ(net.at("B", "A"), converse_set(r));
  EXPECT_THROW(net.add_variable("A"), error);
  EXPECT_THROW(net.at("A", "Z"), error);
}

TEST(Refine, Examples) {
  const ConstraintNetwork base(G(1), {"A", "B"});
  EXPECT_EQ(refine(base, "A", "B", RelationSet::full(G(1))), base);

  const auto emptied = refine(base, "A", "B", RelationSet::empty(G(1)));
  EXPECT_TRUE(emptied.at("A", "B").is_empty());
  EXPECT_EQ(algebraic_closure(emptied, table(1)).status, ClosureStatus::inconsistent);

  const RelationSet r(G(1), {D(1, 1, 2), S(1, 1)});
  const auto n = refine(base, "A", "B", r);
  EXPECT_EQ(n.at("B", "A"), converse_set(r));
  EXPECT_THROW(refine(base, "A", "Q", r), error);
}

TEST(Refine, DiagonalOnlyAdmitsIdentity) {
  ConstraintNetwork net(G(1), {"A", "B"});
  net.intersect("A", "A", RelationSet(G(1), {S(1, 0), S(1, 2)}));
  EXPECT_EQ(net.at("A", "A"), RelationSet::singleton(S(1, 0)));
  net.intersect("A", "A", RelationSet::singleton(S(1, 2)));
  EXPECT_EQ(algebraic_closure(net, table(1)).status, ClosureStatus::inconsistent);
}

TEST(Closure, FullNetworkUnchanged) {
  const ConstraintNetwork net(G(1), {"A", "B", "C"});
  const auto res = algebraic_closure(net, table(1));
  EXPECT_EQ(res.status, ClosureStatus::consistent_so_far);
  EXPECT_EQ(res.network, net);
  EXPECT_EQ(res.refinements, 0u);
}

TEST(Closure, IdentityPropagates) {
  ConstraintNetwork net(G(1), {"A", "B", "C"});
  net.intersect("A", "B", RelationSet::singleton(S(1, 0)));
  net.intersect("B", "C", RelationSet::singleton(D(1, 0, 0)));
  ASSERT_EQ(compose(S(1, 0), D(1, 0, 0)), RelationSet::singleton(D(1, 0, 0)));
  const auto res = algebraic_closure(net, table(1));
  EXPECT_EQ(res.status, ClosureStatus::consistent_so_far);
  EXPECT_EQ(res.network.at("A", "C"), RelationSet::singleton(D(1, 0, 0)));
  EXPECT_GT(res.refinements, 0u);
}

TEST(Closure, InconsistentTriangle) {
  ASSERT_FALSE(compose(D(1, 0, 0), D(1, 0, 0)).contains(D(1, 1, 1)));
  const auto net = parse_network("m = 1\nnode A\nnode B\nnode C\nrel A B { 0-0 }\nrel B C { 0-0 }\nrel A C { 1-1 }\n");
  const auto res = algebraic_closure(net, table(1));
  EXPECT_EQ(res.status, ClosureStatus::inconsistent);
  EXPECT_TRUE(res.network.has_empty_cell());
}

TEST(Closure, GranularityMismatchThrows) {
  EXPECT_THROW(algebraic_closure(ConstraintNetwork(G(1), {"A"}), table(2)), granularity_mismatch);
}

TEST(Closure, WeakCompositionWitnessIsOnlyClosed) {
  // A 0-0 B, B 1-2 C, A 3-3 C is built from table entries, so closure keeps
  // it. consistent_so_far is the strongest verdict closure ever gives: the
  // status does not claim a solution exists.
  ConstraintNetwork net(G(1), {"A", "B", "C"});
  net.intersect("A", "B", RelationSet::singleton(D(1, 0, 0)));
  net.intersect("B", "C", RelationSet::singleton(D(1, 1, 2)));
  net.intersect("A", "C", table(1).entry(D(1, 0, 0), D(1, 1, 2)));
  const auto res = algebraic_closure(net, table(1));
  EXPECT_EQ(res.status, ClosureStatus::consistent_so_far);
  EXPECT_EQ(res.network, net);
  EXPECT_EQ(res.network.at("A", "C"), RelationSet::singleton(D(1, 3, 3)));
}

TEST(Closure, IdempotentAndMonotoneOnRandomNetworks) {
  std::mt19937_64 rng(17);
  for (int q = 0; q < 200; ++q) {
    const int m = 1 + q % 2;
    const auto net = random_network(G(m), rng);
    const auto once = algebraic_closure(net, table(m));
    for (std::size_t x = 0; x < net.size(); ++x)
      for (std::size_t y = 0; y < net.size(); ++y) ASSERT_TRUE(once.network.at(x, y).is_subset_of(net.at(x, y)));
    const auto twice = algebraic_closure(once.network, table(m));
    EXPECT_EQ(twice.network, once.network);
    EXPECT_EQ(twice.status, once.status);
    EXPECT_EQ(once.status == ClosureStatus::inconsistent, once.network.has_empty_cell());
    if (once.status == ClosureStatus::consistent_so_far) {
      EXPECT_EQ(twice.refinements, 0u);
      EXPECT_TRUE(is_fixed_point(once.network, table(m)));
    }
  }
}

TEST(Closure, NeverRemovesARealizedScenario) {
  std::mt19937_64 rng(23);
  for (int q = 0; q < 200; ++q) {
    const int m = 1 + q % 2;
    ConfigurationSampler sampler(G(m), rng());
    Scene scene;
    const int n = 3 + q % 4;
    for (int v = 0; v < n; v += 3) {
      const auto t = sampler.next();
      for (const auto* p : {&t.a, &t.b, &t.c})
        if (static_cast<int>(scene.size()) < n) scene.push_back({"p" + std::to_string(scene.size()), *p});
    }
    const auto net = network_from_scene(scene, G(m));
    const auto res = algebraic_closure(net, table(m));
    EXPECT_EQ(res.status, ClosureStatus::consistent_so_far);
    EXPECT_TRUE(check_scenario_closure(scene, res.network));
  }
}

TEST(CheckScenario, Examples) {
  const Scene scene = {{"A", OPoint(0, 0, 0)}, {"B", OPoint(1, 0, pi)}};
  ConstraintNetwork net(G(2), {"A", "B"});
  net.intersect("A", "B", RelationSet::singleton(D(2, 0, 0)));
  EXPECT_TRUE(check_scenario_closure(scene, net));
  net.intersect("A", "B", RelationSet::singleton(D(2, 1, 1)));
  EXPECT_FALSE(check_scenario_closure(scene, net));
  EXPECT_THROW(check_scenario_closure({scene[0]}, ConstraintNetwork(G(2), {"A", "B"})), error);
}

TEST(StreetNetwork, ShippedExampleClosesAndKeepsItsScene) {
  const auto scene = parse_scene(read_file(OPRA_EXAMPLES_DIR "/streets.scene"));
  const auto net = parse_network(read_file(OPRA_EXAMPLES_DIR "/streets.opranet"));
  ASSERT_EQ(net.granularity(), G(2));

  EXPECT_EQ(net.at("C2_C3", "C3_C2"), RelationSet::singleton(parse_relation("front-front", G(2))));
  EXPECT_EQ(net.at("C2_C3", "C2_C5"), RelationSet::singleton(S(2, 6)));
  EXPECT_TRUE(check_scenario_closure(scene, net));

  const auto res = algebraic_closure(net, table(2));
  EXPECT_EQ(res.status, ClosureStatus::consistent_so_far);
  EXPECT_TRUE(check_scenario_closure(scene, res.network));
  // Closure derives knowledge about crossings that were never observed
  // together.
  EXPECT_TRUE(net.at("C1_C2", "C6_C3").is_full());
  EXPECT_FALSE(res.network.at("C1_C2", "C6_C3").is_full());
}

TEST(NetworkFormat, ParseAndWrite) {
  const std::string text =
      "# comment\nm = 2\nnode A\nnode B\nnode C\n"
      "rel A B { rf-lf, s3 }\nrel B C {front-back}\nrel A B { rf-lf 0-0 }\n";
  const auto net = parse_network(text);
  EXPECT_EQ(net.at("A", "B"), RelationSet::singleton(D(2, 7, 1)));
  EXPECT_EQ(net.at("C", "B"), RelationSet::singleton(D(2, 4, 0)));
  const std::string written = write_network(net);
  EXPECT_EQ(written, "m = 2\nnode A\nnode B\nnode C\nrel A B { rf-lf }\nrel B C { front-back }\n");
  EXPECT_EQ(parse_network(written), net);
  EXPECT_EQ(write_network(parse_network("m=1\nnode A\nnode B\nrel A B { }\n")),
            "m = 1\nnode A\nnode B\nrel A B { }\n");
}

TEST(NetworkFormat, Errors) {
  EXPECT_THROW(parse_network("node A\n"), parse_error);
  EXPECT_THROW(parse_network(""), parse_error);
  EXPECT_THROW(parse_network("m = 0\n"), parse_error);
  EXPECT_THROW(parse_network("m = 2\nnode A\nrel A B { s0 }\n"), parse_error);
  EXPECT_THROW(parse_network("m = 2\nnode A\nnode B\nrel A B { s0\n"), parse_error);
  EXPECT_THROW(parse_network("m = 2\nnode A\nnode B\nrel A B { 9-9 }\n"), parse_error);
  EXPECT_THROW(parse_network("m = 2\nnode A\nnode A\n"), parse_error);
  EXPECT_THROW(parse_network("m = 2\nedge A B\n"), parse_error);
  try {
    parse_network("m = 2\nnode A\nnode B\n\nrel A B { bogus }\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}
