#include <gtest/gtest.h>

#include "oracles.h"
#include "syncount/synth_direct.h"

using namespace syncount;

namespace {

Params params(int n, int f, int s, int t) { return Params{.n = n, .f = f, .s = s, .t = t}; }

bool sat(const Params& p, AlgorithmClass cls, const EncodeOptions& options = {}) {
  auto r = synthesize(p, cls, options);
  EXPECT_NE(r.outcome, SynthOutcome::unknown) << r.diagnostic;
  return r.outcome == SynthOutcome::found;
}

}  // namespace

TEST(Synth, SingleNodeFlip) {
  auto r = synthesize(params(1, 0, 2, 0), AlgorithmClass::general);
  ASSERT_EQ(r.outcome, SynthOutcome::found);
  ASSERT_TRUE(r.algorithm);
  EXPECT_EQ(r.algorithm->tables(), (std::vector<std::vector<State>>{{1, 0}}));
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->verdict, Verdict::stabilizes);
}

TEST(Synth, CyclicRealizable) {
  auto r = synthesize(params(4, 1, 3, 7), AlgorithmClass::cyclic);
  ASSERT_EQ(r.outcome, SynthOutcome::found) << r.diagnostic;
  EXPECT_EQ(r.algorithm->algorithm_class(), AlgorithmClass::cyclic);
  EXPECT_EQ(check_stabilization(*r.algorithm, 7).verdict, Verdict::stabilizes);
  EXPECT_EQ(check_stabilization(r.algorithm->as_general(), 7).verdict, Verdict::stabilizes);
}

TEST(Synth, CyclicUnrealizable) {
  EXPECT_FALSE(sat(params(4, 1, 3, 6), AlgorithmClass::cyclic));
}

TEST(Synth, GeneralTwoStatesUnrealizable) {
  // t = 6 is the largest bound worth asking for with n=4, f=1, s=2.
  ASSERT_EQ(params(4, 1, 2, 6).max_useful_t(), 6);
  EXPECT_FALSE(sat(params(4, 1, 2, 6), AlgorithmClass::general));
}

TEST(Synth, ProcessBackendAgrees) {
  BackendConfig process{BackendKind::process, SYNCOUNT_CADICAL, {}};
  auto r = synthesize(params(4, 1, 3, 7), AlgorithmClass::cyclic, {}, process);
  ASSERT_EQ(r.outcome, SynthOutcome::found) << r.diagnostic;
  EXPECT_EQ(check_stabilization(*r.algorithm, 7).verdict, Verdict::stabilizes);
  auto u = synthesize(params(3, 0, 2, 0), AlgorithmClass::general, {}, process);
  EXPECT_EQ(u.outcome, SynthOutcome::unrealizable);
}

TEST(Synth, MissingSolverIsUnknown) {
  BackendConfig process{BackendKind::process, "/nonexistent/solver", {}};
  auto r = synthesize(params(1, 0, 2, 0), AlgorithmClass::general, {}, process);
  EXPECT_EQ(r.outcome, SynthOutcome::unknown);
  EXPECT_FALSE(r.diagnostic.empty());
}

// SAT iff some algorithm in the full enumeration stabilizes.
TEST(Synth, BruteForceAgreement) {
  auto algs = oracle::all_general_algorithms(params(2, 0, 2, 0));
  for (int t = 0; t <= 2; ++t) {
    bool exists = false;
    for (const auto& a : algs) exists = exists || oracle::stabilizes(a, t);
    EXPECT_EQ(sat(params(2, 0, 2, t), AlgorithmClass::general), exists) << "t=" << t;
  }
  auto cyclic = oracle::all_general_algorithms(params(1, 0, 2, 0));
  EXPECT_TRUE(sat(params(1, 0, 2, 0), AlgorithmClass::cyclic));
  EXPECT_EQ(cyclic.size(), 4u);
}

TEST(Synth, BruteForceAgreementSmallStates) {
  // s=3, n=1: 27 algorithms.
  auto algs = oracle::all_general_algorithms(params(1, 0, 3, 0));
  for (int t = 0; t <= 2; ++t) {
    bool exists = false;
    for (const auto& a : algs) exists = exists || oracle::stabilizes(a, t);
    EXPECT_EQ(sat(params(1, 0, 3, t), AlgorithmClass::general), exists) << "t=" << t;
  }
}

TEST(Synth, MonotoneInT) {
  bool seen = false;
  for (int t = 0; t <= 3; ++t) {
    bool ok = sat(params(3, 0, 2, t), AlgorithmClass::general);
    if (seen) EXPECT_TRUE(ok) << "t=" << t;
    seen = seen || ok;
  }
  EXPECT_TRUE(seen);
}

TEST(Synth, NonUniformBound) {
  EncodeOptions opts{.non_uniform = true};
  auto p = params(4, 1, 3, 7);
  auto r = synthesize(p, AlgorithmClass::cyclic, opts);
  ASSERT_EQ(r.outcome, SynthOutcome::found);
  ASSERT_TRUE(r.algorithm->params().t0);
  EXPECT_EQ(*r.algorithm->params().t0, 3);
  auto g = build_projection_graph(*r.algorithm, FaultSet{});
  ASSERT_TRUE(g.stabilization_time());
  EXPECT_LE(*g.stabilization_time(), 3);
  EXPECT_TRUE(verify_with_t0(*r.algorithm));
}

TEST(Encode, VariableLayout) {
  auto inst = encode(params(4, 1, 3, 7), AlgorithmClass::cyclic);
  const auto& atlas = inst.atlas;
  EXPECT_EQ(atlas.fault_sets().size(), 2u);
  EXPECT_EQ(atlas.a(0, 0, 0), 1);
  // a(u, i, c) aliases to node 0 through the rotation.
  const auto& space = atlas.space();
  for (std::uint64_t u = 0; u < space.size(); ++u) {
    for (int i = 0; i < 4; ++i) EXPECT_EQ(atlas.a(u, i, 1), atlas.a(space.rotate(u, i), 0, 1));
  }
  EXPECT_EQ(inst.cnf.num_vars, atlas.num_vars());
  EXPECT_NE(atlas.describe(atlas.e(1, 0, 1)).find("F={0} e x="), std::string::npos);
  for (const auto& clause : inst.cnf.clauses) {
    for (int lit : clause) {
      ASSERT_NE(lit, 0);
      ASSERT_LE(std::abs(lit), atlas.num_vars());
    }
  }
}

TEST(Encode, SizeGuard) {
  EXPECT_THROW(encode(params(6, 1, 3, 20), AlgorithmClass::general, EncodeOptions{.max_vars = 1000}),
               SizeLimitError);
}

TEST(Decode, RejectsAllTrueModel) {
  auto inst = encode(params(2, 0, 2, 1), AlgorithmClass::general);
  Model all(std::vector<std::int8_t>(inst.cnf.num_vars + 1, 1));
  EXPECT_THROW(decode(all, inst), FormatError);
  Model none(std::vector<std::int8_t>(inst.cnf.num_vars + 1, -1));
  EXPECT_THROW(decode(none, inst), FormatError);
}

TEST(Decode, SolverModelRoundTrip) {
  auto inst = encode(params(4, 1, 3, 7), AlgorithmClass::cyclic);
  auto r = solve_in_process(inst.cnf, {});
  ASSERT_EQ(r.status, SolveStatus::sat);
  auto alg = decode(*r.model, inst);
  EXPECT_EQ(check_stabilization(alg, 7).verdict, Verdict::stabilizes);
  // The text form of the model decodes to the same algorithm.
  auto again = Model::parse(r.model->to_text(), inst.cnf.num_vars);
  EXPECT_EQ(decode(again, inst), alg);
}

TEST(Dimacs, RoundTripAndHeader) {
  auto inst = encode(params(3, 0, 2, 2), AlgorithmClass::general, EncodeOptions{.non_uniform = true});
  auto text = emit_dimacs(inst);
  auto parsed = parse_dimacs(text);
  EXPECT_EQ(parsed.num_vars, inst.cnf.num_vars);
  EXPECT_EQ(parsed.clauses, inst.cnf.clauses);
  auto header = parse_instance_header(text);
  EXPECT_EQ(header.params, inst.params);
  EXPECT_EQ(header.algorithm_class, AlgorithmClass::general);
  EXPECT_THROW(parse_instance_header("p cnf 1 1\n1 0\n"), FormatError);
}
