#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "syncount/core_model.h"
#include "syncount/reference.h"

using namespace syncount;

TEST(Params, Validation) {
  EXPECT_NO_THROW((Params{.n = 4, .f = 1, .s = 3, .t = 7}.validate()));
  EXPECT_THROW((Params{.n = 0, .f = 0, .s = 2, .t = 0}.validate()), std::invalid_argument);
  EXPECT_THROW((Params{.n = 2, .f = 2, .s = 2, .t = 0}.validate()), std::invalid_argument);
  EXPECT_THROW((Params{.n = 2, .f = 0, .s = 1, .t = 0}.validate()), std::invalid_argument);
  EXPECT_THROW((Params{.n = 2, .f = 0, .s = 2, .t = -1}.validate()), std::invalid_argument);
  Params p{.n = 4, .f = 1, .s = 3, .t = 7};
  p.t0 = 8;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Params, Counts) {
  Params p{.n = 4, .f = 1, .s = 3, .t = 7};
  EXPECT_EQ(p.observed_count(), 81u);
  EXPECT_EQ(p.actual_count(1), 27u);
  EXPECT_EQ(p.max_useful_t(), 25);
  EXPECT_EQ((Params{.n = 4, .f = 1, .s = 2, .t = 0}.max_useful_t()), 6);
  EXPECT_THROW(checked_pow(10, 40), SizeLimitError);
}

TEST(Project, PaperExample) {
  ObservedConfig u{{0, 1, 0, 1, 1}};
  auto x = project(u, FaultSet{2, 4}, 2);
  EXPECT_EQ(x.to_string(), "01*1*");
}

TEST(Project, EmptyFaultSetIsIdentity) {
  auto x = project(ObservedConfig{{0, 1}}, FaultSet{}, 2);
  EXPECT_EQ(x.entries, (std::vector<State>{0, 1}));
}

TEST(Project, AllFaulty) {
  auto x = project(ObservedConfig{{2, 2}}, FaultSet{0, 1}, 3);
  EXPECT_EQ(x.to_string(), "**");
}

TEST(Project, KeepsCorrectEntries) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<State> e(5);
    for (auto& v : e) v = static_cast<State>(rng() % 3);
    std::vector<int> members;
    for (int i = 0; i < 5; ++i) {
      if (rng() % 3 == 0) members.push_back(i);
    }
    FaultSet faults(members);
    auto x = project(ObservedConfig{e}, faults, 3);
    for (int i = 0; i < 5; ++i) {
      if (faults.contains(i)) {
        EXPECT_TRUE(x.is_faulty(i));
      } else {
        EXPECT_EQ(x.entries[i], e[i]);
      }
    }
  }
}

TEST(Transition, Table4Examples) {
  auto a = reference::cyclic_4_3_7();
  EXPECT_EQ(a.transition(0, ObservedConfig{{0, 1, 1, 0}}), 2);
  EXPECT_EQ(a.transition(1, ObservedConfig{{0, 0, 1, 1}}), 2);
}

TEST(Transition, Table5Example) {
  auto a = reference::general_6_2_6();
  EXPECT_EQ(a.transition(1, ObservedConfig{{0, 0, 0, 1, 1, 1}}), 1);
}

TEST(Transition, NodeOutOfRange) {
  auto a = reference::cyclic_4_3_7();
  EXPECT_THROW(a.transition(4, ObservedConfig{{0, 0, 0, 0}}), std::out_of_range);
}

TEST(Transition, CyclicLawExhaustive) {
  auto a = reference::cyclic_4_3_7();
  const auto& space = a.space();
  for (std::uint64_t u = 0; u < space.size(); ++u) {
    for (int i = 0; i < 4; ++i) {
      for (int r = 0; r < 4; ++r) {
        // Node i + r reads rotate(u, -r) the way node i reads u.
        auto moved = space.rotate(u, (4 - r) % 4);
        ASSERT_EQ(a.transition(i, u), a.transition((i + r) % 4, moved));
      }
    }
  }
}

TEST(Transition, CyclicLawRandomTables) {
  std::mt19937_64 rng(11);
  Params p{.n = 4, .f = 1, .s = 3, .t = 7};
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_algorithm(p, AlgorithmClass::cyclic, rng);
    auto g = a.as_general();
    for (std::uint64_t u = 0; u < a.space().size(); ++u) {
      for (int i = 0; i < 4; ++i) {
        ASSERT_EQ(g.transition(i, u), g.transition(0, a.space().rotate(u, i)));
      }
    }
  }
}

TEST(ConfigSpace, LittleEndianIndex) {
  ConfigSpace space(3, 3);
  std::vector<State> c{2, 0, 1};
  EXPECT_EQ(space.index_of(c), 2u + 0u * 3 + 1u * 9);
  EXPECT_EQ(space.config_at(11), c);
  EXPECT_EQ(space.uniform(1), 1u + 3 + 9);
  // rotate(u, 1): v_j = u_{j+1}.
  auto r = space.config_at(space.rotate(space.index_of(c), 1));
  EXPECT_EQ(r, (std::vector<State>{0, 1, 2}));
}

TEST(EnumerateActuals, Sizes) {
  EXPECT_EQ(enumerate_actuals(4, 2, FaultSet{0}).size(), 8u);
  EXPECT_EQ(enumerate_actuals(4, 3, FaultSet{0}).size(), 27u);
  auto one = enumerate_actuals(1, 2, FaultSet{});
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].entries, (std::vector<State>{0}));
  EXPECT_EQ(one[1].entries, (std::vector<State>{1}));
}

TEST(EnumerateActuals, UniqueAndContainsGood) {
  for (const auto& faults : FaultSet::enumerate(4, 2)) {
    auto all = enumerate_actuals(4, 3, faults);
    ActualSpace space(4, 3, faults);
    EXPECT_EQ(all.size(), space.size());
    std::set<std::vector<State>> seen;
    for (const auto& x : all) seen.insert(x.entries);
    EXPECT_EQ(seen.size(), all.size());
    EXPECT_TRUE(seen.count(space.config_at(space.zero()).entries));
    EXPECT_TRUE(seen.count(space.config_at(space.one()).entries));
    for (std::uint64_t i = 0; i < space.size(); ++i) {
      EXPECT_EQ(space.index_of(space.config_at(i)), i);
    }
  }
}

TEST(FaultSet, ParseAndEnumerate) {
  EXPECT_EQ(FaultSet::parse("{0,2}"), (FaultSet{0, 2}));
  EXPECT_EQ(FaultSet::parse("{}"), FaultSet{});
  EXPECT_EQ((FaultSet{2, 0}).to_string(), "{0,2}");
  EXPECT_THROW(FaultSet({1, 1}), std::invalid_argument);
  auto sets = FaultSet::enumerate(4, 1);
  ASSERT_EQ(sets.size(), 5u);
  EXPECT_TRUE(sets[0].empty());
  EXPECT_EQ(FaultSet::enumerate(5, 2).size(), 1u + 5 + 10);
  EXPECT_EQ((FaultSet{3}).rotated(4, 2), (FaultSet{1}));
}

TEST(AlgorithmFile, RoundTrip) {
  for (const auto& a : {reference::cyclic_4_3_7(), reference::general_6_2_6(),
                        reference::follow_the_leader(3)}) {
    auto text = a.to_text();
    EXPECT_EQ(text.substr(0, 21), "counting-algorithm v1");
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(Algorithm::from_text(text), a);
  }
}

TEST(AlgorithmFile, RandomRoundTrip) {
  std::mt19937_64 rng(3);
  Params p{.n = 3, .f = 1, .s = 3, .t = 4};
  for (int trial = 0; trial < 50; ++trial) {
    auto cls = trial % 2 ? AlgorithmClass::cyclic : AlgorithmClass::general;
    auto a = oracle::random_algorithm(p, cls, rng);
    EXPECT_EQ(Algorithm::from_text(a.to_text()), a);
  }
}

TEST(AlgorithmFile, Rejects) {
  EXPECT_THROW(Algorithm::from_text("counting-algorithm v2\n"), FormatError);
  EXPECT_THROW(Algorithm::from_text("counting-algorithm v1\nn=1 f=0 s=2 t=0 class=general\n1 0"),
               FormatError);
  EXPECT_THROW(Algorithm::from_text("counting-algorithm v1\nn=1 f=0 s=2 t=0 class=general\n1 2\n"),
               FormatError);
  EXPECT_THROW(Algorithm::from_text("counting-algorithm v1\nn=1 f=0 s=2 t=0 class=general\n1\n"),
               FormatError);
  EXPECT_NO_THROW(
      Algorithm::from_text("counting-algorithm v1\nn=1 f=0 s=2 t=0 class=general\n1 0\n"));
}

TEST(AlgorithmTables, RejectBadEntries) {
  Params p{.n = 1, .f = 0, .s = 2, .t = 0};
  EXPECT_THROW(Algorithm(p, AlgorithmClass::general, {{1, 2}}), std::invalid_argument);
  EXPECT_THROW(Algorithm(p, AlgorithmClass::general, {{1}}), std::invalid_argument);
  EXPECT_THROW(Algorithm(p, AlgorithmClass::general, {{1, 0}, {1, 0}}), std::invalid_argument);
}
