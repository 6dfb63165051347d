#include <gtest/gtest.h>

#include "oracles.h"
#include "syncount/cegar.h"
#include "syncount/reference.h"
#include "syncount/synth_direct.h"
#include "syncount/verifier.h"

using namespace syncount;

namespace {

Params params(int n, int f, int s, int t) { return Params{.n = n, .f = f, .s = s, .t = t}; }

CegarOptions with(AlgorithmClass cls, CegarVariant variant, std::chrono::seconds limit) {
  CegarOptions o;
  o.algorithm_class = cls;
  o.variant = variant;
  o.time_limit = limit;
  return o;
}

std::unique_ptr<IncrementalSession> session_with(const std::vector<CnfFormula>& parts) {
  auto s = make_session();
  for (const auto& cnf : parts) {
    for (const auto& c : cnf.clauses) s->add_clause(c);
  }
  return s;
}

// Some candidate of the unrolled formula plus an execution of it at k that
// never reaches a good configuration.
struct Witness {
  Model rho;
  Model sigma;
};

std::optional<Witness> bad_execution(const CegarVars& v, IncrementalSession& s, int k) {
  auto r = s.solve_under();
  if (r.status != SolveStatus::sat) return std::nullopt;
  auto g = gamma(v, *r.model);
  g.push_back(-v.z(k));
  g.push_back(-v.o(k));
  auto c = s.solve_under(g);
  if (c.status != SolveStatus::sat) return std::nullopt;
  return Witness{*r.model, *c.model};
}

}  // namespace

TEST(CegarVars, Layout) {
  CegarVars v(params(4, 1, 3, 7), AlgorithmClass::cyclic);
  EXPECT_EQ(v.bits(), 2);
  EXPECT_EQ(v.table_count(), 1);
  EXPECT_EQ(v.a_count(), 81 * 2);
  const auto& space = v.space();
  for (std::uint64_t w = 0; w < space.size(); ++w) {
    EXPECT_EQ(v.a(w, 2, 1), v.a(space.rotate(w, 2), 0, 1));
  }
  EXPECT_EQ(v.num_vars(3) - v.num_vars(2), v.block_size());
  EXPECT_LT(v.q2(), v.base_size() + 1);
  EXPECT_GT(v.u(0, 0, 0, 0), v.base_size());
}

// Exactly f faulty nodes: the p-projection of psi_faulty has C(n, f) models.
TEST(Psi, FaultyModelCount) {
  for (auto [n, f, expected] : {std::tuple{5, 2, 10}, std::tuple{4, 1, 4}, std::tuple{3, 0, 1}}) {
    CegarVars v(params(n, f, 2, 1), AlgorithmClass::general);
    auto s = session_with({build_base(v)});
    std::set<std::vector<bool>> seen;
    while (true) {
      auto r = s->solve_under();
      if (r.status != SolveStatus::sat) break;
      std::vector<bool> pattern;
      std::vector<int> block;
      int count = 0;
      for (int i = 0; i < n; ++i) {
        bool on = r.model->value(v.p(i));
        pattern.push_back(on);
        count += on;
        block.push_back(on ? -v.p(i) : v.p(i));
      }
      EXPECT_EQ(count, f);
      EXPECT_TRUE(seen.insert(pattern).second);
      if (block.empty()) break;
      s->add_clause(block);
    }
    EXPECT_EQ(static_cast<int>(seen.size()), expected) << "n=" << n << " f=" << f;
  }
}

TEST(Psi, TrivialTransitions) {
  CegarVars v(params(3, 1, 3, 2), AlgorithmClass::general);
  auto s = session_with({build_base(v)});
  auto r = s->solve_under();
  ASSERT_EQ(r.status, SolveStatus::sat);
  auto alg = decode_candidate(v, *r.model, 2);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(alg.transition(i, 0), 1);
    EXPECT_EQ(alg.transition(i, alg.space().uniform(1)), 0);
  }
}

// Unrolled executions are real executions of the candidate.
TEST(Psi, ExecutionFidelity) {
  for (bool strengthen : {false, true}) {
    CegarVars v(params(4, 1, 3, 4), AlgorithmClass::cyclic);
    std::vector<CnfFormula> parts{build_base(v)};
    for (int k = 0; k <= 4; ++k) parts.push_back(build_tau(v, k, strengthen));
    auto s = session_with(parts);
    int checked = 0;
    for (int round = 0; round < 20; ++round) {
      auto w = bad_execution(v, *s, 4);
      if (!w) break;
      auto alg = decode_candidate(v, w->rho, 4);
      auto run = decode_run(v, w->sigma, 4);
      EXPECT_EQ(run.faults.size(), 1u);
      for (int r = 0; r < 4; ++r) {
        EXPECT_TRUE(is_reachable(alg, run.faults, run.configs[r], run.configs[r + 1]));
        for (int i = 0; i < 4; ++i) {
          if (run.faults.contains(i)) continue;
          auto u = run.observed[r][i];
          // The observation agrees with x^r on the correct nodes ...
          for (int j = 0; j < 4; ++j) {
            if (!run.faults.contains(j)) {
              EXPECT_EQ(alg.space().digit(u, j), run.configs[r].entries[j]);
            }
          }
          // ... and produces x^{r+1}.
          EXPECT_EQ(alg.transition(i, u), run.configs[r + 1].entries[i]);
        }
      }
      s->add_clause(forbid(v, w->sigma, 4));
      ++checked;
    }
    EXPECT_GT(checked, 0);
  }
}

// A forbid clause is falsified by the candidate it came from, so the next
// candidate differs on one of the touched transition bits.
TEST(Psi, ForbidMakesProgress) {
  CegarVars v(params(4, 1, 2, 3), AlgorithmClass::general);
  std::vector<CnfFormula> parts{build_base(v)};
  for (int k = 0; k <= 3; ++k) parts.push_back(build_tau(v, k));
  auto s = session_with(parts);
  for (int round = 0; round < 30; ++round) {
    auto w = bad_execution(v, *s, 3);
    if (!w) break;
    auto clause = forbid(v, w->sigma, 3);
    ASSERT_FALSE(clause.empty());
    EXPECT_FALSE(w->rho.satisfies(clause));
    EXPECT_FALSE(w->sigma.satisfies(clause));
    s->add_clause(clause);
    auto next = s->solve_under();
    if (next.status != SolveStatus::sat) break;
    EXPECT_TRUE(next.model->satisfies(clause));
    EXPECT_NE(gamma(v, *next.model), gamma(v, w->rho));
  }
}

TEST(Psi, ForbidExecutionMatchesVerifier) {
  auto alg = reference::cyclic_4_3_7();
  CegarVars v(alg.params(), AlgorithmClass::cyclic);
  auto report = check_stabilization(alg, 6);
  ASSERT_TRUE(report.counterexample);
  auto clause = forbid_execution(v, alg, *report.counterexample);
  ASSERT_FALSE(clause.empty());
  // Under alg's own bits every literal is false.
  std::vector<std::int8_t> values(v.num_vars(0) + 1, -1);
  const auto& space = alg.space();
  for (std::uint64_t w = 0; w < space.size(); ++w) {
    for (int b = 0; b < v.bits(); ++b) values[v.a(w, 0, b)] = alg.tables()[0][w] >> b & 1 ? 1 : -1;
  }
  EXPECT_FALSE(Model(values).satisfies(clause));
  EXPECT_THROW(forbid_execution(v, reference::identity(alg.params()), *report.counterexample),
               Error);
}

TEST(Psi, ForbidWalkRulesOutEveryFilling) {
  auto alg = reference::cyclic_4_3_7();
  CegarVars v(alg.params(), AlgorithmClass::cyclic);
  auto report = check_stabilization(alg, 6);
  ASSERT_TRUE(report.counterexample);
  int next = v.num_vars(25) + 1;
  const int first = next;
  auto clauses = forbid_walk(v, report.counterexample->faults, report.counterexample->configs, next);
  EXPECT_GT(next, first);
  auto s = make_session();
  for (const auto& c : clauses) s->add_clause(c);
  // alg admits the walk, so fixing its table contradicts the clauses ...
  const auto& space = alg.space();
  std::vector<int> fixed;
  for (std::uint64_t w = 0; w < space.size(); ++w) {
    for (int b = 0; b < v.bits(); ++b) {
      fixed.push_back(alg.tables()[0][w] >> b & 1 ? v.a(w, 0, b) : -v.a(w, 0, b));
    }
  }
  EXPECT_EQ(s->solve_under(fixed).status, SolveStatus::unsat);
  // ... while the clauses alone are satisfiable.
  EXPECT_EQ(s->solve_under().status, SolveStatus::sat);
}

TEST(BadWalks, Table4) {
  auto alg = reference::cyclic_4_3_7();
  EXPECT_TRUE(bad_walks(alg, 7, 100).empty());
  auto walks = bad_walks(alg, 6, 100);
  ASSERT_FALSE(walks.empty());
  for (const auto& ex : walks) {
    ASSERT_EQ(ex.rounds(), 6u);
    ActualSpace space(4, 3, ex.faults);
    for (std::size_t r = 0; r < ex.configs.size(); ++r) {
      EXPECT_FALSE(space.is_good(space.index_of(ex.configs[r])));
      if (r > 0) EXPECT_TRUE(is_reachable(alg, ex.faults, ex.configs[r - 1], ex.configs[r]));
    }
  }
  EXPECT_EQ(bad_walks(alg, 6, 1).size(), 1u);
}

TEST(BadWalks, IllegalSuccessor) {
  auto id = reference::identity(params(2, 0, 2, 2));
  auto walks = bad_walks(id, 2, 10);
  ASSERT_FALSE(walks.empty());
  EXPECT_EQ(walks.front().rounds(), 1u);
}

TEST(Cegar, ToyInstances) {
  for (auto variant : {CegarVariant::basic, CegarVariant::shortloop, CegarVariant::overshoot}) {
    auto r = run_cegar(params(1, 0, 2, 0), with(AlgorithmClass::general, variant, std::chrono::seconds(30)));
    ASSERT_EQ(r.outcome, CegarOutcome::found) << to_string(variant);
    EXPECT_EQ(r.algorithm->tables(), (std::vector<std::vector<State>>{{1, 0}}));
    EXPECT_EQ(r.achieved_t, 0);
  }
}

// Verdicts match the direct encoding (and brute force) on small instances.
TEST(Cegar, AgreesWithDirectSmall) {
  struct Case {
    Params p;
    AlgorithmClass cls;
  };
  std::vector<Case> cases{{params(2, 0, 2, 0), AlgorithmClass::general},
                          {params(2, 0, 2, 1), AlgorithmClass::general},
                          {params(2, 0, 2, 2), AlgorithmClass::general},
                          {params(3, 0, 2, 1), AlgorithmClass::cyclic},
                          {params(3, 0, 2, 2), AlgorithmClass::general},
                          {params(4, 1, 2, 6), AlgorithmClass::cyclic}};
  for (const auto& c : cases) {
    bool direct = synthesize(c.p, c.cls).outcome == SynthOutcome::found;
    for (auto variant : {CegarVariant::basic, CegarVariant::shortloop, CegarVariant::overshoot}) {
      for (bool generalize : {false, true}) {
        auto o = with(c.cls, variant, std::chrono::seconds(60));
        o.t = c.p.t;
        o.generalize = generalize;
        auto r = run_cegar(c.p, o);
        ASSERT_NE(r.outcome, CegarOutcome::timeout);
        EXPECT_EQ(r.outcome == CegarOutcome::found, direct)
            << "n=" << c.p.n << " t=" << c.p.t << ' ' << to_string(variant);
        if (r.algorithm) {
          EXPECT_EQ(check_stabilization(*r.algorithm, *r.achieved_t).verdict, Verdict::stabilizes);
          EXPECT_LE(*r.achieved_t, c.p.t);
        }
      }
    }
  }
}

TEST(Cegar, StrengthenDoesNotChangeVerdicts) {
  for (int t = 0; t <= 2; ++t) {
    auto p = params(2, 0, 2, t);
    std::optional<bool> verdict;
    for (bool strengthen : {false, true}) {
      auto o = with(AlgorithmClass::general, CegarVariant::basic, std::chrono::seconds(30));
      o.strengthen_observation = strengthen;
      auto r = run_cegar(p, o);
      ASSERT_NE(r.outcome, CegarOutcome::timeout);
      bool found = r.outcome == CegarOutcome::found;
      if (verdict) EXPECT_EQ(*verdict, found);
      verdict = found;
    }
  }
}

TEST(Cegar, GeneralTwoStatesUnrealizable) {
  for (auto variant : {CegarVariant::basic, CegarVariant::shortloop, CegarVariant::overshoot}) {
    auto o = with(AlgorithmClass::general, variant, std::chrono::seconds(300));
    o.t = 6;
    auto r = run_cegar(params(4, 1, 2, 6), o);
    EXPECT_EQ(r.outcome, CegarOutcome::unrealizable) << to_string(variant);
    EXPECT_EQ(r.unrealizable_bound, 6);
    EXPECT_FALSE(r.algorithm);
  }
}

TEST(Cegar, VerifierWalksKeepVerdict) {
  auto o = with(AlgorithmClass::general, CegarVariant::basic, std::chrono::seconds(300));
  o.t = 6;
  o.verifier_walks = 64;
  auto r = run_cegar(params(4, 1, 2, 6), o);
  EXPECT_EQ(r.outcome, CegarOutcome::unrealizable);
  EXPECT_GT(r.stats.verifier_refinements, 0);
}

TEST(Cegar, OvershootFindsCyclicAlgorithm) {
  std::vector<int> sequence;
  auto o = with(AlgorithmClass::cyclic, CegarVariant::overshoot, std::chrono::seconds(120));
  o.tighten = false;
  o.on_algorithm = [&](const Algorithm&, int t) { sequence.push_back(t); };
  auto r = run_overshoot(params(4, 1, 3, 0), o);
  ASSERT_EQ(r.outcome, CegarOutcome::found);
  ASSERT_TRUE(r.achieved_t);
  EXPECT_LE(*r.achieved_t, 25);
  EXPECT_EQ(sequence.size(), 1u);
  EXPECT_EQ(check_stabilization(*r.algorithm, *r.achieved_t).verdict, Verdict::stabilizes);
  EXPECT_EQ(check_stabilization(r.algorithm->as_general(), *r.achieved_t).verdict,
            Verdict::stabilizes);
}

TEST(Cegar, OvershootTightensMonotonically) {
  std::vector<int> sequence;
  auto o = with(AlgorithmClass::cyclic, CegarVariant::overshoot, std::chrono::seconds(20));
  o.generalize = true;
  o.on_algorithm = [&](const Algorithm& alg, int t) {
    sequence.push_back(t);
    EXPECT_EQ(check_stabilization(alg, t).verdict, Verdict::stabilizes);
  };
  auto r = run_overshoot(params(4, 1, 3, 0), o);
  ASSERT_TRUE(r.algorithm);
  ASSERT_FALSE(sequence.empty());
  for (std::size_t i = 1; i < sequence.size(); ++i) EXPECT_LT(sequence[i], sequence[i - 1]);
  EXPECT_EQ(r.achieved_t, sequence.back());
  EXPECT_GE(*r.achieved_t, 7);  // 6 is unrealizable for this class
}

TEST(Cegar, TimeoutReported) {
  auto o = with(AlgorithmClass::cyclic, CegarVariant::basic, std::chrono::seconds(1));
  o.t = 6;
  auto r = run_cegar(params(4, 1, 3, 6), o);
  EXPECT_EQ(r.outcome, CegarOutcome::timeout);
  EXPECT_LT(r.stats.seconds, 10.0);
}

TEST(Cegar, ParseVariant) {
  EXPECT_EQ(parse_cegar_variant("shortloop"), CegarVariant::shortloop);
  EXPECT_EQ(to_string(CegarVariant::overshoot), "overshoot");
  EXPECT_THROW(parse_cegar_variant("fast"), std::invalid_argument);
}
