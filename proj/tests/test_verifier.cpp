#include <gtest/gtest.h>

#include <map>
#include <random>
#include <regex>

#include "oracles.h"
#include "syncount/reference.h"
#include "syncount/verifier.h"

using namespace syncount;

namespace {

ActualConfig cfg(std::string_view text, int s) {
  ActualConfig x{{}, s};
  for (char c : text) x.entries.push_back(c == '*' ? static_cast<State>(s) : c - '0');
  return x;
}

void expect_replays(const Algorithm& alg, const Execution& ex) {
  for (std::size_t r = 0; r + 1 < ex.configs.size(); ++r) {
    EXPECT_TRUE(is_reachable(alg, ex.faults, ex.configs[r], ex.configs[r + 1]));
    EXPECT_TRUE(oracle::reachable(alg, ex.faults, ex.configs[r], ex.configs[r + 1]));
  }
}

Algorithm flip() {
  Params p{.n = 1, .f = 0, .s = 2, .t = 1};
  return Algorithm(p, AlgorithmClass::general, {{1, 0}});
}

}  // namespace

TEST(IsReachable, Table4Example) {
  auto a = reference::cyclic_4_3_7();
  EXPECT_TRUE(is_reachable(a, FaultSet{0}, cfg("*111", 3), cfg("*000", 3)));
}

TEST(IsReachable, NoFaultsMeansUniqueSuccessor) {
  auto a = reference::general_6_2_6();
  const auto& space = a.space();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto u = rng() % space.size();
    ActualConfig x{space.config_at(u), 2};
    ActualConfig y{std::vector<State>(6), 2};
    for (int i = 0; i < 6; ++i) y.entries[i] = a.transition(i, u);
    EXPECT_TRUE(is_reachable(a, FaultSet{}, x, y));
    auto other = y;
    other.entries[trial % 6] ^= 1;
    EXPECT_FALSE(is_reachable(a, FaultSet{}, x, other));
  }
}

TEST(IsReachable, ZeroToZeroNeedsAFilling) {
  auto a = reference::cyclic_4_3_7();
  // Every filling of slot 0 moves the correct nodes away from 0 here.
  EXPECT_FALSE(is_reachable(a, FaultSet{0}, cfg("*000", 3), cfg("*000", 3)));
  EXPECT_TRUE(is_reachable(a, FaultSet{0}, cfg("*000", 3), cfg("*111", 3)));
}

// Oracle equivalence: random (n=3, s=2, f=1) algorithms and every
// (n=2, f=0, s=2) algorithm.
TEST(IsReachable, OracleRandomN3) {
  std::mt19937_64 rng(17);
  Params p{.n = 3, .f = 1, .s = 2, .t = 3};
  int checked = 0;
  for (int sample = 0; sample < 1000; ++sample) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::general, rng);
    for (const auto& faults : FaultSet::enumerate(3, 1)) {
      auto all = oracle::actuals(3, 2, faults);
      for (const auto& x : all) {
        for (const auto& y : all) {
          ASSERT_EQ(is_reachable(a, faults, x, y), oracle::reachable(a, faults, x, y));
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(IsReachable, OracleExhaustiveN2) {
  Params p{.n = 2, .f = 0, .s = 2, .t = 2};
  auto algs = oracle::all_general_algorithms(p);
  ASSERT_EQ(algs.size(), 256u);
  for (const auto& a : algs) {
    auto all = oracle::actuals(2, 2, FaultSet{});
    for (const auto& x : all) {
      for (const auto& y : all) {
        ASSERT_EQ(is_reachable(a, FaultSet{}, x, y), oracle::reachable(a, FaultSet{}, x, y));
      }
    }
  }
}

TEST(IsReachable, OracleN4S3) {
  std::mt19937_64 rng(23);
  Params p{.n = 4, .f = 1, .s = 3, .t = 7};
  for (int sample = 0; sample < 5; ++sample) {
    auto a = sample == 0 ? reference::cyclic_4_3_7()
                         : oracle::random_algorithm(p, AlgorithmClass::cyclic, rng);
    for (const auto& faults : {FaultSet{}, FaultSet{0}, FaultSet{2}}) {
      auto all = oracle::actuals(4, 3, faults);
      for (const auto& x : all) {
        auto succ = oracle::successor_states(a, faults, x);
        for (const auto& y : all) {
          bool expect = true;
          for (int i = 0; i < 4; ++i) {
            if (!faults.contains(i)) expect = expect && succ[i].count(y.entries[i]);
          }
          ASSERT_EQ(is_reachable(a, faults, x, y), expect);
        }
      }
    }
  }
}

TEST(ProjectionGraph, FlipAlgorithm) {
  auto g = build_projection_graph(flip(), FaultSet{});
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.good_cycle_exclusive());
  EXPECT_EQ(g.stabilization_time(), 0);
}

TEST(ProjectionGraph, Table4FaultyNode) {
  auto g = build_projection_graph(reference::cyclic_4_3_7(), FaultSet{0});
  EXPECT_EQ(g.node_count(), 27u);
  EXPECT_EQ(g.stabilization_time(), 7);
  int deepest = 0;
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    EXPECT_GE(g.successors(x).size(), 1u);
    deepest = std::max(deepest, g.bad_depth(x));
  }
  EXPECT_EQ(deepest, 6);  // B(6) non-empty, B(7) empty
  EXPECT_FALSE(g.bad_set(6).empty());
  EXPECT_TRUE(g.bad_set(7).empty());
}

TEST(ProjectionGraph, Table5EdgeCountMatchesOracle) {
  auto a = reference::general_6_2_6();
  FaultSet faults{5};
  auto g = build_projection_graph(a, faults);
  EXPECT_EQ(g.node_count(), 32u);
  std::size_t oracle_edges = 0;
  auto all = oracle::actuals(6, 2, faults);
  for (const auto& x : all) {
    for (const auto& y : all) oracle_edges += oracle::reachable(a, faults, x, y);
  }
  EXPECT_EQ(g.edge_count(), oracle_edges);
  EXPECT_TRUE(g.good_cycle_exclusive());
  EXPECT_TRUE(g.stabilization_time().has_value());
}

TEST(CheckStabilization, PublishedAlgorithms) {
  auto t4 = reference::cyclic_4_3_7();
  auto r7 = check_stabilization(t4, 7);
  EXPECT_EQ(r7.verdict, Verdict::stabilizes);
  EXPECT_EQ(r7.stabilization_time(), 7);
  EXPECT_FALSE(r7.counterexample);
  auto r6 = check_stabilization(t4, 6);
  EXPECT_EQ(r6.verdict, Verdict::fails);
  ASSERT_TRUE(r6.counterexample);
  EXPECT_EQ(r6.counterexample->rounds(), 6u);
  expect_replays(t4, *r6.counterexample);

  auto r = check_stabilization(reference::general_6_2_6(), 6);
  EXPECT_EQ(r.verdict, Verdict::stabilizes);
  EXPECT_EQ(r.stabilization_time(), 6);
  EXPECT_EQ(check_stabilization(reference::general_6_2_6(), 5).verdict, Verdict::fails);
}

TEST(CheckStabilization, FollowTheLeader) {
  auto a = reference::follow_the_leader(2);
  EXPECT_EQ(check_stabilization(a, 1).verdict, Verdict::stabilizes);
  EXPECT_EQ(check_stabilization(a, 0).verdict, Verdict::fails);
}

TEST(CheckStabilization, CyclicChecksCanonicalFaultSets) {
  auto r = check_stabilization(reference::cyclic_4_3_7(), 7);
  ASSERT_EQ(r.per_fault_set.size(), 2u);
  EXPECT_EQ(r.per_fault_set[0].faults, FaultSet{});
  EXPECT_EQ(r.per_fault_set[1].faults, FaultSet{0});
  EXPECT_EQ(fault_sets_to_check(reference::general_6_2_6()).size(), 7u);
}

TEST(CheckStabilization, ReportText) {
  auto text = check_stabilization(reference::cyclic_4_3_7(), 7).to_text();
  EXPECT_EQ(text, "F={} stab_time=2\nF={0} stab_time=7\n");
  auto failing = check_stabilization(reference::identity(Params{.n = 2, .f = 0, .s = 2, .t = 3}), 3);
  EXPECT_NE(failing.to_text().find("stab_time=inf"), std::string::npos);
  EXPECT_NE(failing.to_text().find("counterexample"), std::string::npos);
}

TEST(Counterexample, IdentityHasSelfLoop) {
  auto a = reference::identity(Params{.n = 3, .f = 1, .s = 2, .t = 2});
  for (const auto& faults : FaultSet::enumerate(3, 1)) {
    auto g = build_projection_graph(a, faults);
    EXPECT_FALSE(g.good_cycle_exclusive());
    auto ex = extract_counterexample(g, 2);
    expect_replays(a, ex);
  }
  auto g = build_projection_graph(a, FaultSet{});
  bool loop = false;
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    for (auto y : g.successors(x)) loop = loop || (x == y);
  }
  EXPECT_TRUE(loop);
}

TEST(Counterexample, ConditionOneViolation) {
  // 0 -> 1 but 1 -> 1: leaving 1_F goes wrong after one step.
  Params p{.n = 1, .f = 0, .s = 2, .t = 3};
  Algorithm a(p, AlgorithmClass::general, {{1, 1}});
  auto g = build_projection_graph(a, FaultSet{});
  auto ex = extract_counterexample(g, 3);
  ASSERT_EQ(ex.configs.size(), 2u);
  EXPECT_EQ(ex.configs[0].entries, std::vector<State>{1});
  EXPECT_EQ(ex.configs[1].entries, std::vector<State>{1});
}

TEST(Counterexample, ThrowsWhenStable) {
  auto g = build_projection_graph(reference::cyclic_4_3_7(), FaultSet{0});
  EXPECT_THROW(extract_counterexample(g, 7), Error);
  auto ex = extract_counterexample(g, 6);
  EXPECT_EQ(ex.rounds(), 6u);
  expect_replays(reference::cyclic_4_3_7(), ex);
}

// Verifier agrees with the brute-force stabilization oracle, including the
// exact time.
TEST(CheckStabilization, OracleAgreementSmall) {
  std::mt19937_64 rng(31);
  Params p{.n = 3, .f = 1, .s = 2, .t = 2};
  for (int sample = 0; sample < 300; ++sample) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::general, rng);
    for (const auto& faults : FaultSet::enumerate(3, 1)) {
      auto g = build_projection_graph(a, faults);
      ASSERT_EQ(g.stabilization_time(), oracle::stabilization_time(a, faults));
    }
  }
  for (const auto& a : oracle::all_general_algorithms(Params{.n = 2, .f = 0, .s = 2, .t = 0})) {
    for (int t = 0; t <= 2; ++t) {
      ASSERT_EQ(check_stabilization(a, t).verdict == Verdict::stabilizes,
                oracle::stabilizes(a, t));
    }
  }
}

TEST(CheckStabilization, Monotone) {
  for (const auto& a : oracle::all_general_algorithms(Params{.n = 2, .f = 0, .s = 2, .t = 0})) {
    bool seen = false;
    for (int t = 0; t <= 3; ++t) {
      bool ok = check_stabilization(a, t).verdict == Verdict::stabilizes;
      if (seen) EXPECT_TRUE(ok);
      seen = seen || ok;
    }
  }
  auto t4 = reference::cyclic_4_3_7();
  for (int t = 7; t <= 25; ++t) EXPECT_EQ(check_stabilization(t4, t).verdict, Verdict::stabilizes);
}

TEST(CheckStabilization, ExactTimeWithinMaximalBound) {
  std::mt19937_64 rng(41);
  Params p{.n = 3, .f = 0, .s = 2, .t = 0};
  for (int sample = 0; sample < 2000; ++sample) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::general, rng);
    auto r = check_stabilization(a, p.max_useful_t());
    auto time = r.stabilization_time();
    bool all_finite = true;
    for (const auto& fs : r.per_fault_set) all_finite = all_finite && fs.stabilization_time;
    if (all_finite && r.verdict == Verdict::stabilizes) {
      EXPECT_LE(*time, p.max_useful_t());
    }
    if (time && r.per_fault_set.front().good_cycle_exclusive) {
      EXPECT_LE(*time, p.max_useful_t());
    }
  }
}

// Checking F={0} for a cyclic algorithm gives the same verdict as checking
// every singleton.
TEST(CheckStabilization, CyclicShortcutSound) {
  std::mt19937_64 rng(43);
  Params p{.n = 4, .f = 1, .s = 2, .t = 6};
  int stabilizing = 0;
  for (int sample = 0; sample < 500; ++sample) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::cyclic, rng);
    auto g0 = build_projection_graph(a, FaultSet{0});
    for (int i = 1; i < 4; ++i) {
      auto gi = build_projection_graph(a, FaultSet{i});
      ASSERT_EQ(gi.stabilization_time(), g0.stabilization_time());
      ASSERT_EQ(gi.good_cycle_exclusive(), g0.good_cycle_exclusive());
      ASSERT_EQ(gi.edge_count(), g0.edge_count());
    }
    for (int t = 0; t <= 6; ++t) {
      bool shortcut = check_stabilization(a, t).verdict == Verdict::stabilizes;
      bool full = check_stabilization(a.as_general(), t).verdict == Verdict::stabilizes;
      ASSERT_EQ(shortcut, full);
      stabilizing += shortcut;
    }
  }
  (void)stabilizing;
}

TEST(ExportDot, TrivialGraph) {
  auto dot = export_dot(build_projection_graph(flip(), FaultSet{}));
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  std::regex edge("\"([0-9*]+)\" -> \"([0-9*]+)\"");
  auto n = std::distance(std::sregex_iterator(dot.begin(), dot.end(), edge), std::sregex_iterator());
  EXPECT_EQ(n, 2);
}

TEST(ExportDot, RoundTripEdges) {
  auto a = reference::cyclic_4_3_7();
  auto g = build_projection_graph(a, FaultSet{0});
  auto dot = export_dot(g);
  EXPECT_EQ(dot, export_dot(build_projection_graph(a, FaultSet{0})));
  std::multiset<std::pair<std::string, std::string>> parsed;
  std::regex edge("\"([0-9*]+)\" -> \"([0-9*]+)\"");
  for (auto it = std::sregex_iterator(dot.begin(), dot.end(), edge); it != std::sregex_iterator();
       ++it) {
    parsed.emplace((*it)[1], (*it)[2]);
  }
  std::multiset<std::pair<std::string, std::string>> expected;
  const auto& space = g.space();
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    for (auto y : g.successors(x)) {
      expected.emplace(space.config_at(x).to_string(), space.config_at(y).to_string());
    }
  }
  EXPECT_EQ(parsed, expected);
  std::set<std::string> nodes;
  std::regex node("^\\s*\"([0-9*]+)\"", std::regex::multiline);
  for (auto it = std::sregex_iterator(dot.begin(), dot.end(), node); it != std::sregex_iterator();
       ++it) {
    nodes.insert((*it)[1]);
  }
  EXPECT_EQ(nodes.size(), 27u);
  EXPECT_NE(dot.find("depth 6"), std::string::npos);
}

TEST(Verifier, SizeGuard) {
  VerifierLimits tiny{.max_nodes = 10};
  EXPECT_THROW(build_projection_graph(reference::cyclic_4_3_7(), FaultSet{0}, tiny),
               SizeLimitError);
}
