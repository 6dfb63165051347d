#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "syncount/solver_backend.h"

using namespace syncount;

namespace {

CnfFormula formula(int vars, std::vector<std::vector<int>> clauses) {
  CnfFormula cnf;
  cnf.num_vars = vars;
  for (auto& c : clauses) cnf.add(std::move(c));
  return cnf;
}

// Pigeonhole: p pigeons in p-1 holes, unsatisfiable.
CnfFormula pigeonhole(int p) {
  int holes = p - 1;
  auto var = [&](int i, int j) { return 1 + i * holes + j; };
  CnfFormula cnf;
  cnf.num_vars = p * holes;
  for (int i = 0; i < p; ++i) {
    std::vector<int> c;
    for (int j = 0; j < holes; ++j) c.push_back(var(i, j));
    cnf.add(c);
  }
  for (int j = 0; j < holes; ++j) {
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) cnf.add({-var(a, j), -var(b, j)});
    }
  }
  return cnf;
}

CnfFormula random_3sat(int vars, int clauses, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CnfFormula cnf;
  cnf.num_vars = vars;
  for (int c = 0; c < clauses; ++c) {
    std::vector<int> clause;
    for (int k = 0; k < 3; ++k) {
      int v = 1 + static_cast<int>(rng() % vars);
      clause.push_back(rng() % 2 ? v : -v);
    }
    cnf.add(clause);
  }
  return cnf;
}

BackendConfig process_config() { return BackendConfig{BackendKind::process, SYNCOUNT_CADICAL, {}}; }

}  // namespace

TEST(OneShot, SatUnitClauses) {
  auto cnf = formula(2, {{1}, {-2}});
  for (const auto& r : {solve_in_process(cnf, {}), solve_oneshot(cnf, {}, SYNCOUNT_CADICAL)}) {
    ASSERT_EQ(r.status, SolveStatus::sat) << r.diagnostic;
    EXPECT_TRUE(r.model->value(1));
    EXPECT_FALSE(r.model->value(2));
  }
}

TEST(OneShot, Unsat) {
  auto cnf = formula(1, {{1}, {-1}});
  EXPECT_EQ(solve_in_process(cnf, {}).status, SolveStatus::unsat);
  EXPECT_EQ(solve_oneshot(cnf, {}, SYNCOUNT_CADICAL).status, SolveStatus::unsat);
  EXPECT_EQ(solve_in_process(pigeonhole(6), {}).status, SolveStatus::unsat);
}

TEST(OneShot, EmptyFormulaIsSat) {
  auto r = solve_in_process(CnfFormula{}, {});
  EXPECT_EQ(r.status, SolveStatus::sat);
}

TEST(OneShot, ProcessStatistics) {
  auto r = solve_oneshot(pigeonhole(7), {}, SYNCOUNT_CADICAL);
  EXPECT_EQ(r.status, SolveStatus::unsat);
  EXPECT_GE(r.stats.decisions, 0);
  EXPECT_GE(r.stats.conflicts, 0);
  EXPECT_GE(r.stats.seconds, 0.0);
}

TEST(OneShot, MissingBinary) {
  auto r = solve_oneshot(formula(1, {{1}}), {}, "/no/such/solver");
  EXPECT_EQ(r.status, SolveStatus::unknown);
  EXPECT_NE(r.diagnostic.find("missing"), std::string::npos);
}

TEST(OneShot, MalformedOutput) {
  auto dir = std::filesystem::temp_directory_path() / "syncount_fake_solver";
  std::filesystem::create_directories(dir);
  auto path = dir / "liar.sh";
  {
    std::ofstream out(path);
    out << "#!/bin/sh\necho 's SATISFIABLE'\necho 'v 1 x 0'\nexit 10\n";
  }
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  auto r = solve_oneshot(formula(1, {{1}}), {}, path.string());
  EXPECT_EQ(r.status, SolveStatus::unknown);
  {
    std::ofstream out(path);
    out << "#!/bin/sh\necho 's UNSATISFIABLE'\nexit 10\n";
  }
  r = solve_oneshot(formula(1, {{1}}), {}, path.string());
  EXPECT_EQ(r.status, SolveStatus::unknown);
  {
    std::ofstream out(path);
    out << "#!/bin/sh\nexit 3\n";
  }
  r = solve_oneshot(formula(1, {{1}}), {}, path.string());
  EXPECT_EQ(r.status, SolveStatus::unknown);
  {
    // A model that falsifies a clause is a backend fault, not an answer.
    std::ofstream out(path);
    out << "#!/bin/sh\necho 's SATISFIABLE'\necho 'v -1 0'\nexit 10\n";
  }
  EXPECT_THROW(solve_oneshot(formula(1, {{1}}), {}, path.string()), BackendError);
  std::filesystem::remove_all(dir);
}

TEST(OneShot, TimeLimit) {
  SolveLimits limits;
  limits.time = std::chrono::milliseconds(200);
  auto r = solve_oneshot(pigeonhole(12), limits, SYNCOUNT_CADICAL);
  EXPECT_EQ(r.status, SolveStatus::unknown);
  EXPECT_LT(r.stats.seconds, 10.0);
  auto in = solve_in_process(pigeonhole(12), limits);
  EXPECT_EQ(in.status, SolveStatus::unknown);
}

TEST(OneShot, BackendsAgreeOnRandomFormulas) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cnf = random_3sat(30, 128, seed);
    auto a = solve_in_process(cnf, {});
    auto b = solve_oneshot(cnf, {}, SYNCOUNT_CADICAL);
    ASSERT_NE(a.status, SolveStatus::unknown);
    ASSERT_EQ(a.status, b.status) << "seed " << seed;
    if (a.model) {
      for (const auto& c : cnf.clauses) EXPECT_TRUE(a.model->satisfies(c));
    }
  }
}

TEST(Session, AssumptionsDoNotPersist) {
  for (auto config : {BackendConfig{}, process_config()}) {
    auto s = make_session(config);
    s->add_clause({1, 2});
    EXPECT_EQ(s->solve_under({-1, -2}).status, SolveStatus::unsat);
    auto r = s->solve_under();
    ASSERT_EQ(r.status, SolveStatus::sat);
    EXPECT_TRUE(r.model->value(1) || r.model->value(2));
    r = s->solve_under({-1});
    ASSERT_EQ(r.status, SolveStatus::sat);
    EXPECT_TRUE(r.model->value(2));
    EXPECT_EQ(s->solve_calls(), 3);
  }
}

TEST(Session, IncrementalClauses) {
  for (auto config : {BackendConfig{}, process_config()}) {
    auto s = make_session(config);
    s->add_clause({1, 2, 3});
    EXPECT_EQ(s->solve_under().status, SolveStatus::sat);
    s->add_clause({-1});
    s->add_clause({-2});
    auto r = s->solve_under();
    ASSERT_EQ(r.status, SolveStatus::sat);
    EXPECT_TRUE(r.model->value(3));
    s->add_clause({-3});
    EXPECT_EQ(s->solve_under().status, SolveStatus::unsat);
    EXPECT_EQ(s->clause_count(), 4u);
    EXPECT_EQ(s->max_var(), 3);
  }
}

TEST(Session, ClosedSessionThrows) {
  auto s = make_session();
  s->add_clause({1});
  s->close();
  EXPECT_TRUE(s->closed());
  EXPECT_THROW(s->add_clause({2}), BackendError);
  EXPECT_THROW(s->solve_under(), BackendError);
}

TEST(Session, UnknownOptionRejected) {
  BackendConfig config{BackendKind::in_process, {}, {{"no-such-option", 1}}};
  EXPECT_THROW(make_session(config), BackendError);
}

TEST(Model, ParseAndPrint) {
  auto m = Model::parse("v 1 -2 3\nv -4 0\n", 4);
  EXPECT_TRUE(m.value(1));
  EXPECT_FALSE(m.value(2));
  EXPECT_TRUE(m.value(-2));
  EXPECT_FALSE(m.value(5));
  EXPECT_EQ(Model::parse(m.to_text(), 4).to_text(), m.to_text());
  EXPECT_THROW(Model::parse("1 2 x", 3), FormatError);
}

TEST(Dimacs, RoundTrip) {
  auto cnf = random_3sat(10, 20, 3);
  cnf.comments = {"hello", "params n=1"};
  auto text = to_dimacs(cnf);
  EXPECT_EQ(text.rfind("c hello\n", 0), 0u);
  auto back = parse_dimacs(text);
  EXPECT_EQ(back.num_vars, cnf.num_vars);
  EXPECT_EQ(back.clauses, cnf.clauses);
  EXPECT_EQ(back.comments, cnf.comments);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n1 2 0\n"), FormatError);
  EXPECT_THROW(parse_dimacs("1 0\n"), FormatError);
}
