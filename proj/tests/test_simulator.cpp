#include <gtest/gtest.h>

#include <random>

#include "syncount/reference.h"
#include "syncount/simulator.h"
#include "syncount/transforms.h"
#include "syncount/verifier.h"

using namespace syncount;

namespace {

// Reports a state outside [0, s).
class BrokenAdversary : public Adversary {
 public:
  State report(int, int, int, int) override { return 7; }
};

std::vector<State> random_init(int n, int s, std::mt19937_64& rng) {
  std::vector<State> init(n);
  for (auto& x : init) x = static_cast<State>(rng() % s);
  return init;
}

}  // namespace

TEST(MixSeed, Deterministic) {
  EXPECT_EQ(mix_seed(1, 2, 3), mix_seed(1, 2, 3));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(1, 3, 2));
  EXPECT_NE(mix_seed(0), 0u);
}

TEST(Adversary, Parse) {
  EXPECT_EQ(parse_adversary_kind("greedy"), AdversaryKind::greedy);
  EXPECT_EQ(to_string(AdversaryKind::none), "none");
  EXPECT_THROW(parse_adversary_kind("evil"), std::invalid_argument);
}

TEST(Run, FaultFreeFollowsTransitions) {
  auto alg = reference::general_6_2_6();
  SilentAdversary quiet;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto init = random_init(6, 2, rng);
    auto trace = run(alg, quiet, FaultSet{}, init, RunOptions{.rounds = 12});
    ASSERT_EQ(trace.configs.size(), 13u);
    auto x = init;
    for (int r = 0; r <= 12; ++r) {
      EXPECT_EQ(trace.configs[r].entries, x);
      std::vector<State> next(6);
      for (int i = 0; i < 6; ++i) next[i] = alg.transition(i, ObservedConfig{x});
      x = next;
    }
    ASSERT_TRUE(trace.stabilized_at);
    EXPECT_LE(*trace.stabilized_at, 6);
  }
}

TEST(Run, DeterministicReplay) {
  auto alg = reference::cyclic_4_3_7();
  std::vector<State> init{2, 1, 0, 2};
  for (auto kind : {AdversaryKind::random, AdversaryKind::greedy}) {
    auto a1 = make_adversary(kind, 3, 42, &alg);
    auto a2 = make_adversary(kind, 3, 42, &alg);
    auto t1 = run(alg, *a1, FaultSet{1}, init);
    auto t2 = run(alg, *a2, FaultSet{1}, init);
    EXPECT_EQ(t1.to_text(), t2.to_text());
    EXPECT_EQ(t1.stabilized_at, t2.stabilized_at);
  }
}

TEST(Run, EveryStepIsAnEdge) {
  auto alg = reference::cyclic_4_3_7();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    FaultSet faults{static_cast<int>(trial % 4)};
    auto adv = make_adversary(AdversaryKind::random, 3, trial);
    auto trace = run(alg, *adv, faults, random_init(4, 3, rng),
                     RunOptions{.rounds = 30, .window = 4, .check_steps = false});
    for (std::size_t r = 0; r + 1 < trace.configs.size(); ++r) {
      ASSERT_TRUE(is_reachable(alg, faults, trace.configs[r], trace.configs[r + 1]));
    }
    ASSERT_TRUE(trace.stabilized_at);
    EXPECT_LE(*trace.stabilized_at, 7);
  }
}

// Starting from the deepest bad configuration, the greedy adversary keeps
// the system unstable for exactly the stabilization time.
TEST(Run, GreedyFromWorstStart) {
  auto alg = reference::cyclic_4_3_7();
  auto g = build_projection_graph(alg, FaultSet{0});
  auto worst = g.bad_set(6);
  ASSERT_FALSE(worst.empty());
  auto x = g.space().config_at(worst.front());
  std::vector<State> init = x.entries;
  init[0] = 0;
  GreedyAdversary greedy(alg, 1);
  auto trace = run(alg, greedy, FaultSet{0}, init, RunOptions{.rounds = 20});
  ASSERT_TRUE(trace.stabilized_at);
  EXPECT_EQ(*trace.stabilized_at, 7);
}

TEST(Run, AdversaryOutOfRange) {
  auto alg = reference::cyclic_4_3_7();
  BrokenAdversary broken;
  EXPECT_THROW(run(alg, broken, FaultSet{0}, std::vector<State>{0, 0, 0, 0}), std::out_of_range);
}

TEST(Run, InputValidation) {
  auto alg = reference::cyclic_4_3_7();
  SilentAdversary quiet;
  EXPECT_THROW(run(alg, quiet, FaultSet{}, std::vector<State>{0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(run(alg, quiet, FaultSet{0, 1}, std::vector<State>{0, 0, 0, 0}),
               std::invalid_argument);
  EXPECT_THROW(run(alg, quiet, FaultSet{}, std::vector<State>{0, 0, 0, 3}), std::invalid_argument);
}

TEST(FindStabilization, Window) {
  auto c = [](std::string_view s) {
    ActualConfig x{{}, 2};
    for (char ch : s) x.entries.push_back(ch == '*' ? 2 : ch - '0');
    return x;
  };
  std::vector<ActualConfig> configs{c("01*"), c("11*"), c("00*"), c("11*"), c("00*")};
  EXPECT_EQ(find_stabilization(configs, 4), 1);
  EXPECT_EQ(find_stabilization(configs, 5), std::nullopt);
  configs.push_back(c("00*"));
  EXPECT_EQ(find_stabilization(configs, 2), std::nullopt);
  EXPECT_EQ(find_stabilization(configs, 1), 5);
}

TEST(Run, TopologyCircuit) {
  auto a = reference::cyclic_4_3_7();
  auto g = TopologyGraph::circulant(12, 3);
  auto part = *check_topology(g, 4, 3, 3, std::vector<int>{0, 1, 2, 3});
  auto ta = generalize_topology(a, g, part);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    FaultSet faults{static_cast<int>(rng() % 12)};
    auto adv = make_adversary(AdversaryKind::random, 3, trial);
    auto trace = run(ta, *adv, faults, random_init(12, 3, rng), RunOptions{.rounds = 40});
    ASSERT_TRUE(trace.stabilized_at) << trace.to_text();
  }
}

TEST(Layered, TwoBitPeriod) {
  auto counter = compose_layers({reference::cyclic_4_3_7(), reference::cyclic_4_3_7()});
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    FaultSet faults{static_cast<int>(rng() % 4)};
    auto adv = make_adversary(AdversaryKind::random, 3, trial);
    std::vector<std::vector<State>> init{random_init(4, 3, rng), random_init(4, 3, rng)};
    auto trace = run(counter, *adv, faults, init, RunOptions{.rounds = 120, .window = 8});
    ASSERT_TRUE(trace.stabilized_at);
    std::set<std::uint64_t> seen;
    for (std::size_t r = *trace.stabilized_at; r + 1 < trace.values.size(); ++r) {
      ASSERT_TRUE(trace.values[r]);
      EXPECT_EQ(*trace.values[r + 1], (*trace.values[r] + 1) % 4);
      seen.insert(*trace.values[r]);
    }
    EXPECT_EQ(seen.size(), 4u);
  }
}

TEST(Layered, ThreeBitPeriod) {
  auto a = reference::cyclic_4_3_7();
  auto counter = compose_layers({a, a, a});
  EXPECT_EQ(counter.modulus(), 8u);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto adv = make_adversary(AdversaryKind::random, 3, trial);
    std::vector<std::vector<State>> init;
    for (int i = 0; i < 3; ++i) init.push_back(random_init(4, 3, rng));
    auto trace = run(counter, *adv, FaultSet{3}, init, RunOptions{.rounds = 300, .window = 16});
    ASSERT_TRUE(trace.stabilized_at);
    auto r = *trace.stabilized_at;
    EXPECT_EQ(*trace.values[r + 8], *trace.values[r]);
    EXPECT_NE(*trace.values[r + 4], *trace.values[r]);
  }
}

TEST(Layered, LayerStepsOnlyOnFallingEdge) {
  auto a = reference::cyclic_4_3_7();
  auto counter = compose_layers({a, a});
  SilentAdversary quiet;
  std::vector<std::vector<State>> init{{0, 0, 0, 0}, {1, 1, 1, 1}};
  auto trace = run(counter, quiet, FaultSet{}, init, RunOptions{.rounds = 8});
  for (std::size_t r = 0; r + 1 < trace.layers[0].size(); ++r) {
    bool falling = trace.layers[0][r].entries[0] == 1 && trace.layers[0][r + 1].entries[0] == 0;
    bool moved = trace.layers[1][r].entries != trace.layers[1][r + 1].entries;
    EXPECT_EQ(falling, moved) << "round " << r;
  }
}

TEST(Randomized, RuleExclusion) {
  RandomizedCounter rc{4, 1};
  EXPECT_EQ(rc.rule(std::vector<State>{0, 0, 0, 1}), 1);
  EXPECT_EQ(rc.rule(std::vector<State>{1, 1, 1, 0}), 2);
  EXPECT_EQ(rc.rule(std::vector<State>{0, 0, 1, 1}), 3);
  // Rules 1 and 2 need more than (n+f)/2 zeros or ones; both at once would
  // need more than n+f entries.
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<State> u(4);
    for (int i = 0; i < 4; ++i) u[i] = mask >> i & 1;
    int zeros = 4 - __builtin_popcount(mask);
    int r = rc.rule(u);
    if (2 * zeros > 5) EXPECT_EQ(r, 1);
    else if (2 * (4 - zeros) > 5) EXPECT_EQ(r, 2);
    else EXPECT_EQ(r, 3);
  }
  EXPECT_THROW((RandomizedCounter{3, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((RandomizedCounter{5, 2}.validate()), std::invalid_argument);
}

TEST(Randomized, MonteCarlo) {
  RandomizedOptions o;
  o.trials = 300;
  auto stats = run_randomized(RandomizedCounter{4, 1}, o);
  EXPECT_EQ(stats.times.size(), 300u);
  EXPECT_EQ(stats.censored, 0);
  EXPECT_EQ(stats.exclusion_violations, 0);
  EXPECT_GT(stats.rounds_checked, 0);
  EXPECT_LE(stats.mean, 9.0);
  EXPECT_LE(stats.median, stats.max);
  auto again = run_randomized(RandomizedCounter{4, 1}, o);
  EXPECT_EQ(again.times, stats.times);
}

TEST(Randomized, AllEqualWithoutFaults) {
  RandomizedOptions o;
  o.trials = 20;
  o.init = std::vector<State>{0, 0, 0, 0, 0, 0, 0};
  auto stats = run_randomized(RandomizedCounter{7, 0}, o);
  EXPECT_EQ(stats.censored, 0);
  EXPECT_EQ(stats.max, 0);
}

TEST(Randomized, LargerSystem) {
  RandomizedOptions o;
  o.trials = 100;
  o.adversary = AdversaryKind::none;
  auto stats = run_randomized(RandomizedCounter{7, 2}, o);
  EXPECT_EQ(stats.exclusion_violations, 0);
  EXPECT_EQ(stats.censored, 0);
  // Expected time bound 2^(2f+2) + 1.
  EXPECT_LE(stats.mean, 65.0);
}
