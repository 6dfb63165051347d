#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "syncount/reference.h"
#include "syncount/transforms.h"
#include "syncount/verifier.h"

using namespace syncount;

namespace {

// Blackening game played directly on adjacency, for comparison.
std::vector<int> blackening_rounds(const TopologyGraph& g, const std::vector<int>& core, int m) {
  std::vector<int> round(g.size(), -1);
  for (int v : core) round[v] = 0;
  for (int r = 1; r <= g.size(); ++r) {
    std::vector<int> turning;
    for (int v = 0; v < g.size(); ++v) {
      if (round[v] >= 0) continue;
      int black = 0;
      for (int w = 0; w < g.size(); ++w) black += g.adjacent(v, w) && round[w] >= 0;
      if (black >= m) turning.push_back(v);
    }
    for (int v : turning) round[v] = r;
  }
  return round;
}

TopologyGraph with_pendant(int core, std::vector<int> attach) {
  auto g = TopologyGraph::complete(core);
  int v = g.add_vertex(core);
  for (int a : attach) g.add_edge(v, a);
  return g;
}

}  // namespace

TEST(ExtendNode, Table4KeepsTime) {
  auto b = extend_node(reference::cyclic_4_3_7());
  EXPECT_EQ(b.params().n, 5);
  EXPECT_EQ(b.params().f, 1);
  EXPECT_EQ(b.params().s, 3);
  auto report = check_stabilization(b, 7);
  EXPECT_EQ(report.verdict, Verdict::stabilizes);
  EXPECT_EQ(report.per_fault_set.size(), 6u);
  EXPECT_EQ(report.stabilization_time(), 7);
  EXPECT_EQ(check_stabilization(b, 6).verdict, Verdict::fails);
}

TEST(ExtendNode, Twice) {
  auto b = extend_node(extend_node(reference::cyclic_4_3_7()));
  EXPECT_EQ(b.params().n, 6);
  EXPECT_EQ(check_stabilization(b, 7).verdict, Verdict::stabilizes);
}

TEST(ExtendNode, Table5) {
  auto b = extend_node(reference::general_6_2_6());
  EXPECT_EQ(check_stabilization(b, 6).verdict, Verdict::stabilizes);
}

TEST(ExtendNode, TransitionRule) {
  auto a = reference::cyclic_4_3_7();
  auto b = extend_node(a);
  const auto& big = b.space();
  const auto& small = a.space();
  for (std::uint64_t u = 0; u < big.size(); ++u) {
    auto full = big.config_at(u);
    auto head = small.index_of(std::span<const State>(full.data(), 4));
    std::vector<int> votes(3, 0);
    for (int i = 0; i < 4; ++i) {
      ASSERT_EQ(b.transition(i, u), a.transition(i, head));
      ++votes[a.transition(i, head)];
    }
    State expected = 0;
    for (int c = 0; c < 3; ++c) {
      if (2 * votes[c] > 4) expected = static_cast<State>(c);
    }
    ASSERT_EQ(b.transition(4, u), expected);
  }
}

TEST(ExtendNode, RandomStabilizingAlgorithmsKeepTime) {
  // Stabilizing f=0 algorithms on 3 nodes; the extension must keep t.
  std::mt19937_64 rng(7);
  Params p{.n = 3, .f = 0, .s = 2, .t = 6};
  int checked = 0;
  for (int sample = 0; sample < 3000 && checked < 20; ++sample) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::general, rng);
    auto time = check_stabilization(a, 6).stabilization_time();
    if (!time || check_stabilization(a, 6).verdict != Verdict::stabilizes) continue;
    auto b = extend_node(a.with_params(Params{.n = 3, .f = 0, .s = 2, .t = *time}));
    EXPECT_TRUE(oracle::stabilizes(b, *time));
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(ExtendNode, Preconditions) {
  Params p{.n = 2, .f = 1, .s = 2, .t = 0};
  EXPECT_THROW(extend_node(reference::identity(p)), std::invalid_argument);
}

TEST(TopologyGraph, Builders) {
  auto k = TopologyGraph::complete(6);
  EXPECT_EQ(k.edge_count(), 15u);
  auto s = TopologyGraph::star(6);
  EXPECT_EQ(s.edge_count(), 5u);
  auto c = TopologyGraph::circulant(12, 3);
  EXPECT_EQ(c.edge_count(), 36u);
  for (int v = 0; v < 12; ++v) EXPECT_EQ(c.neighbours(v).size(), 6u);
  EXPECT_TRUE(c.adjacent(0, 9));
  EXPECT_FALSE(c.adjacent(0, 4));
}

TEST(TopologyGraph, Errors) {
  TopologyGraph g;
  g.add_vertex(7);
  EXPECT_THROW(g.add_vertex(7), FormatError);
  EXPECT_THROW(g.add_edge(0, 0), FormatError);
  EXPECT_THROW(g.add_edge(0, 3), std::out_of_range);
  EXPECT_THROW(g.index_of(8), FormatError);
  EXPECT_EQ(g.index_of(7), 0);
}

TEST(TopologyFile, RoundTrip) {
  auto g = TopologyGraph::circulant(12, 3);
  auto part = check_topology(g, 4, 3, 3, std::vector<int>{0, 1, 2, 3});
  ASSERT_TRUE(part);
  auto text = topology_to_text(g, &*part);
  auto file = parse_topology(text);
  EXPECT_EQ(topology_to_text(file.graph, file.partition ? &*file.partition : nullptr), text);
  ASSERT_TRUE(file.partition);
  EXPECT_EQ(file.partition->layers, part->layers);
}

TEST(TopologyFile, CommentsAndIds) {
  auto file = parse_topology("# triangle\nv 10\nv 20\n\nv 30 # last\ne 10 20\ne 20 30\ne 30 10\n");
  EXPECT_EQ(file.graph.size(), 3);
  EXPECT_EQ(file.graph.edge_count(), 3u);
  EXPECT_TRUE(file.graph.adjacent(file.graph.index_of(10), file.graph.index_of(30)));
  EXPECT_FALSE(file.partition);
}

TEST(TopologyFile, Rejects) {
  EXPECT_THROW(parse_topology("v 1\ne 1 2\n"), FormatError);
  EXPECT_THROW(parse_topology("v 1\nx 1\n"), FormatError);
  EXPECT_THROW(parse_topology("v a\n"), FormatError);
  EXPECT_THROW(parse_topology("v 1\nv 2\ne 1 2 3\n"), FormatError);
  EXPECT_THROW(parse_topology("v 1\np -1 1\n"), FormatError);
}

TEST(CheckTopology, Circulant) {
  auto g = TopologyGraph::circulant(12, 3);
  auto part = check_topology(g, 4, 3, 3, std::vector<int>{0, 1, 2, 3});
  ASSERT_TRUE(part);
  EXPECT_EQ(part->depth(), 3);
  EXPECT_TRUE(is_valid_partition(g, *part, 4, 3));
  EXPECT_FALSE(check_topology(g, 4, 3, 2, std::vector<int>{0, 1, 2, 3}));
  // Without a core the lexicographically first 4-clique is used.
  auto found = check_topology(g, 4, 3, 3);
  ASSERT_TRUE(found);
  EXPECT_EQ(found->layers[0], (std::vector<int>{0, 1, 2, 3}));
}

TEST(CheckTopology, CompleteAndStar) {
  auto k = TopologyGraph::complete(7);
  auto part = check_topology(k, 4, 3, 1);
  ASSERT_TRUE(part);
  EXPECT_EQ(part->depth(), 1);
  EXPECT_EQ(part->layers[1].size(), 3u);
  EXPECT_FALSE(check_topology(TopologyGraph::star(7), 4, 3, 5));
  EXPECT_FALSE(check_topology(k, 4, 3, 1, std::vector<int>{0, 1, 2, 2}));
}

TEST(CheckTopology, SizeCap) {
  EXPECT_THROW(check_topology(TopologyGraph::complete(10), 4, 3, 1, std::nullopt, 8),
               SizeLimitError);
  EXPECT_NO_THROW(check_topology(TopologyGraph::complete(10), 4, 3, 1, std::vector<int>{0, 1, 2, 3}, 8));
}

TEST(CheckTopology, MatchesBlackeningOracle) {
  std::mt19937_64 rng(19);
  int members = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 6 + static_cast<int>(rng() % 6);
    TopologyGraph g(n);
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) g.add_edge(a, b);
    }
    for (int a = 0; a < n; ++a) {
      for (int b = std::max(a + 1, 4); b < n; ++b) {
        if (rng() % 2) g.add_edge(a, b);
      }
    }
    std::vector<int> core{0, 1, 2, 3};
    auto rounds = blackening_rounds(g, core, 3);
    int depth = *std::max_element(rounds.begin(), rounds.end());
    bool all = std::find(rounds.begin(), rounds.end(), -1) == rounds.end();
    for (int d = 0; d <= 4; ++d) {
      auto part = check_topology(g, 4, 3, d, core);
      ASSERT_EQ(part.has_value(), all && depth <= d);
      if (!part) continue;
      ++members;
      EXPECT_TRUE(is_valid_partition(g, *part, 4, 3));
      auto layer = part->layer_of(n);
      EXPECT_EQ(layer, rounds);
    }
  }
  EXPECT_GT(members, 0);
}

TEST(Partition, Validity) {
  auto g = TopologyGraph::circulant(12, 3);
  auto part = *check_topology(g, 4, 3, 3, std::vector<int>{0, 1, 2, 3});
  auto broken = part;
  std::swap(broken.layers[1], broken.layers[3]);
  EXPECT_FALSE(is_valid_partition(g, broken, 4, 3));
  auto missing = part;
  missing.layers.back().pop_back();
  EXPECT_FALSE(is_valid_partition(g, missing, 4, 3));
  EXPECT_FALSE(is_valid_partition(g, part, 5, 3));
}

TEST(TopologyAlgorithm, PendantSeeingPartOfCore) {
  auto g = with_pendant(4, {0, 1, 2});
  auto part = *check_topology(g, 4, 3, 1, std::vector<int>{0, 1, 2, 3});
  auto ta = generalize_topology(reference::cyclic_4_3_7(), g, part);
  EXPECT_EQ(ta.rule(4), TopologyAlgorithm::Rule::follow);
  EXPECT_EQ(ta.bound(), 8);
  auto alg = ta.to_algorithm();
  EXPECT_EQ(alg.params().n, 5);
  EXPECT_EQ(alg.params().t, 8);
  EXPECT_EQ(check_stabilization(alg, 8).verdict, Verdict::stabilizes);
}

TEST(TopologyAlgorithm, PendantSeeingWholeCore) {
  auto g = with_pendant(4, {0, 1, 2, 3});
  auto part = *check_topology(g, 4, 3, 1, std::vector<int>{0, 1, 2, 3});
  auto ta = generalize_topology(reference::cyclic_4_3_7(), g, part);
  EXPECT_EQ(ta.rule(4), TopologyAlgorithm::Rule::predict);
  EXPECT_EQ(ta.bound(), 7);
  auto report = check_stabilization(ta.to_algorithm(), 7);
  EXPECT_EQ(report.verdict, Verdict::stabilizes);
  // Same behaviour as adding the node with extend_node.
  auto ext = extend_node(reference::cyclic_4_3_7());
  EXPECT_EQ(report.stabilization_time(), check_stabilization(ext, 7).stabilization_time());
}

TEST(TopologyAlgorithm, TwoLayers) {
  // K4 core (Table 4), vertex 4 sees three core nodes, vertex 5 sees 1, 2, 4.
  auto g = with_pendant(4, {0, 1, 2});
  int v = g.add_vertex(5);
  for (int a : {1, 2, 4}) g.add_edge(v, a);
  auto part = check_topology(g, 4, 3, 2, std::vector<int>{0, 1, 2, 3});
  ASSERT_TRUE(part);
  ASSERT_EQ(part->depth(), 2);
  auto ta = generalize_topology(reference::cyclic_4_3_7(), g, *part);
  EXPECT_EQ(ta.bound(), 9);
  EXPECT_EQ(check_stabilization(ta.to_algorithm(), ta.bound()).verdict, Verdict::stabilizes);
}

TEST(TopologyAlgorithm, CoreRunsCoreAlgorithm) {
  auto a = reference::cyclic_4_3_7();
  auto g = TopologyGraph::circulant(12, 3);
  auto part = *check_topology(g, 4, 3, 3, std::vector<int>{0, 1, 2, 3});
  auto ta = generalize_topology(a, g, part);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<State> observed(12);
    for (auto& x : observed) x = static_cast<State>(rng() % 3);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(ta.rule(i), TopologyAlgorithm::Rule::core);
      ObservedConfig u{{observed[0], observed[1], observed[2], observed[3]}};
      EXPECT_EQ(ta.transition(i, observed), a.transition(i, u));
    }
    // Follow rule: strict majority y of earlier-layer neighbours gives 1 - y.
    auto layer = part.layer_of(12);
    for (int v = 4; v < 12; ++v) {
      if (ta.rule(v) != TopologyAlgorithm::Rule::follow) continue;
      int zeros = 0, ones = 0, total = 0;
      for (int w : g.neighbours(v)) {
        if (layer[w] >= layer[v]) continue;
        ++total;
        zeros += observed[w] == 0;
        ones += observed[w] == 1;
      }
      State expected = observed[v];
      if (2 * zeros > total) expected = 1;
      if (2 * ones > total) expected = 0;
      EXPECT_EQ(ta.transition(v, observed), expected);
    }
  }
}

TEST(TopologyAlgorithm, RejectsBadPartition) {
  auto g = TopologyGraph::star(6);
  Partition p{{{0, 1, 2, 3}, {4, 5}}};
  EXPECT_THROW(generalize_topology(reference::cyclic_4_3_7(), g, p), std::invalid_argument);
}

TEST(ComposeLayers, Errors) {
  EXPECT_THROW(compose_layers({}), std::invalid_argument);
  EXPECT_THROW(compose_layers({reference::cyclic_4_3_7(), reference::general_6_2_6()}),
               std::invalid_argument);
  auto bad = reference::identity(Params{.n = 4, .f = 1, .s = 3, .t = 7});
  EXPECT_THROW(compose_layers({reference::cyclic_4_3_7(), bad}), std::invalid_argument);
  auto ok = compose_layers({reference::cyclic_4_3_7(), reference::cyclic_4_3_7()});
  EXPECT_EQ(ok.bits(), 2);
  EXPECT_EQ(ok.modulus(), 4u);
  EXPECT_EQ(ok.nodes(), 4);
  EXPECT_EQ(ok.faults(), 1);
}
