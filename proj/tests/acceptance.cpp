// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// SYNCOUNT_CEGAR_BUDGET (seconds) bounds each CEGAR unrealizability run of
// criterion 4.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.h"
#include "syncount/cegar.h"
#include "syncount/reference.h"
#include "syncount/simulator.h"
#include "syncount/synth_direct.h"
#include "syncount/transforms.h"
#include "syncount/verifier.h"

using namespace syncount;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Params params(int n, int f, int s, int t) { return Params{.n = n, .f = f, .s = s, .t = t}; }

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Check criterion1() {
  Check c;
  auto start = Clock::now();
  auto t4 = reference::cyclic_4_3_7();
  auto r7 = check_stabilization(t4, 7);
  auto r6 = check_stabilization(t4, 6);
  auto t5 = check_stabilization(reference::general_6_2_6(), 6);
  double secs = since(start);
  c.require(r7.verdict == Verdict::stabilizes, "table 4 at t=7");
  c.require(r7.stabilization_time() && *r7.stabilization_time() <= 7, "table 4 exact time <= 7");
  c.require(r6.verdict == Verdict::fails, "table 4 fails at t=6");
  c.require(t5.verdict == Verdict::stabilizes, "table 5 at t=6");
  c.require(secs < 5.0, "runtime < 5 s");
  c.detail << "table4 exact=" << r7.stabilization_time().value_or(-1)
           << " table5 exact=" << t5.stabilization_time().value_or(-1) << " time=" << secs << "s";
  return c;
}

Check criterion2() {
  Check c;
  auto start = Clock::now();
  SolveLimits limits;
  limits.time = std::chrono::seconds(60);
  auto r = synthesize(params(4, 1, 3, 7), AlgorithmClass::cyclic, {}, {}, limits);
  double secs = since(start);
  c.require(r.outcome == SynthOutcome::found, "SAT");
  if (r.algorithm) {
    c.require(check_stabilization(*r.algorithm, 7).verdict == Verdict::stabilizes,
              "re-verifies at t=7");
  }
  c.require(secs <= 60.0, "<= 60 s");
  c.detail << "cyclic (4,1,3,7) sat time=" << secs << "s";
  return c;
}

Check criterion3() {
  Check c;
  auto start = Clock::now();
  SolveLimits limits;
  limits.time = std::chrono::seconds(600);
  auto a = synthesize(params(4, 1, 3, 6), AlgorithmClass::cyclic, {}, {}, limits);
  double ta = since(start);
  auto b = synthesize(params(4, 1, 2, 6), AlgorithmClass::general, {}, {}, limits);
  double secs = since(start);
  c.require(a.outcome == SynthOutcome::unrealizable, "cyclic (4,1,3,6) UNSAT");
  c.require(b.outcome == SynthOutcome::unrealizable, "general (4,1,2,6) UNSAT");
  c.require(params(4, 1, 2, 6).max_useful_t() == 6, "t=6 is the maximal useful bound");
  c.require(secs <= 600.0, "<= 10 min combined");
  c.detail << "cyclic (4,1,3,6) unsat " << ta << "s, general (4,1,2,6) unsat " << secs - ta
           << "s";
  return c;
}

Check criterion4() {
  Check c;
  double budget = 600;
  if (const char* env = std::getenv("SYNCOUNT_CEGAR_BUDGET")) budget = std::atof(env);

  auto start = Clock::now();
  CegarOptions o;
  o.algorithm_class = AlgorithmClass::cyclic;
  o.tighten = false;
  o.time_limit = std::chrono::seconds(600);
  auto r = run_overshoot(params(4, 1, 3, 0), o);
  double secs = since(start);
  bool verified = r.algorithm &&
                  check_stabilization(*r.algorithm, *r.achieved_t).verdict == Verdict::stabilizes;
  c.require(r.outcome == CegarOutcome::found && verified, "overshoot finds a verified algorithm");
  c.require(r.achieved_t && *r.achieved_t <= 25, "achieved_t <= 25");
  c.require(secs <= 600.0, "within 10 min");
  c.detail << "overshoot achieved_t=" << r.achieved_t.value_or(-1) << " in " << secs << "s;";

  // Verdicts on the instances of criteria 2 and 3.
  struct Instance {
    Params p;
    AlgorithmClass cls;
    bool realizable;
  };
  for (const auto& inst : {Instance{params(4, 1, 3, 7), AlgorithmClass::cyclic, true},
                           Instance{params(4, 1, 2, 6), AlgorithmClass::general, false},
                           Instance{params(4, 1, 3, 6), AlgorithmClass::cyclic, false}}) {
    auto direct = synthesize(inst.p, inst.cls);
    CegarOptions v;
    v.algorithm_class = inst.cls;
    v.t = inst.p.t;
    v.generalize = true;
    v.tighten = false;
    v.time_limit = std::chrono::duration<double>(budget);
    auto t0 = Clock::now();
    auto cr = run_overshoot(inst.p, v);
    bool cegar_found = cr.outcome == CegarOutcome::found && cr.achieved_t <= inst.p.t;
    bool decided = cr.outcome != CegarOutcome::timeout;
    bool direct_found = direct.outcome == SynthOutcome::found;
    std::ostringstream name;
    name << to_string(inst.cls) << " (" << inst.p.n << ',' << inst.p.f << ',' << inst.p.s << ','
         << inst.p.t << ")";
    c.require(decided, "CEGAR decides " + name.str());
    c.require(!decided || cegar_found == direct_found, "CEGAR agrees with direct on " + name.str());
    c.require(direct_found == inst.realizable, "direct verdict on " + name.str());
    c.detail << ' ' << name.str() << " cegar=" << to_string(cr.outcome) << " ("
             << since(t0) << "s) direct=" << (direct_found ? "sat" : "unsat") << ';';
  }
  return c;
}

Check criterion5() {
  Check c;
  auto start = Clock::now();
  auto b = extend_node(reference::cyclic_4_3_7());
  auto report = check_stabilization(b, 7);
  double secs = since(start);
  c.require(b.params().n == 5 && b.params().f == 1, "n=5, f=1");
  c.require(report.verdict == Verdict::stabilizes, "verifies at t=7");
  c.require(report.per_fault_set.size() == 6, "6 fault sets checked");
  c.require(secs < 30.0, "< 30 s");
  c.detail << "n=5 exact=" << report.stabilization_time().value_or(-1)
           << " fault_sets=" << report.per_fault_set.size() << " time=" << secs << "s";
  return c;
}

Check criterion6() {
  Check c;
  auto counter = compose_layers({reference::cyclic_4_3_7(), reference::cyclic_4_3_7()});
  std::mt19937_64 rng(2024);
  int ok = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    FaultSet faults{static_cast<int>(rng() % 4)};
    RandomAdversary adv(3, mix_seed(7, trial));
    std::vector<std::vector<State>> init(2, std::vector<State>(4));
    for (auto& layer : init) {
      for (auto& x : layer) x = static_cast<State>(rng() % 3);
    }
    auto trace = run(counter, adv, faults, init, RunOptions{.rounds = 200, .window = 8});
    if (!trace.stabilized_at) continue;
    // Exact period: v(r+4) = v(r), while periods 1 and 2 are ruled out.
    bool period4 = true;
    bool moves = false;
    for (auto r = static_cast<std::size_t>(*trace.stabilized_at); r + 4 < trace.values.size();
         ++r) {
      period4 = period4 && trace.values[r] && trace.values[r + 4] == trace.values[r];
      moves = moves || trace.values[r + 1] != trace.values[r];
    }
    auto r0 = static_cast<std::size_t>(*trace.stabilized_at);
    bool not_two = trace.values[r0 + 2] != trace.values[r0];
    if (period4 && moves && not_two) ++ok;
  }
  c.require(ok == trials, "every trial eventually periodic with period 4");
  c.detail << ok << "/" << trials << " trials with period exactly 4";
  return c;
}

Check criterion7() {
  Check c;
  RandomizedOptions o;
  o.trials = 1000;
  o.seed = 1;
  o.adversary = AdversaryKind::random;
  auto stats = run_randomized(RandomizedCounter{4, 1}, o);
  c.require(stats.censored == 0, "no censored trials");
  c.require(stats.mean <= 9.0, "mean <= 9");
  c.require(stats.exclusion_violations == 0, "no rule-exclusion violations");
  c.detail << "mean=" << stats.mean << " max=" << stats.max
           << " violations=" << stats.exclusion_violations << " rounds=" << stats.rounds_checked;
  return c;
}

Check criterion8() {
  Check c;
  std::mt19937_64 rng(8);
  std::int64_t pairs = 0;
  std::int64_t mismatches = 0;
  Params p3 = params(3, 1, 2, 3);
  for (int sample = 0; sample < 1000; ++sample) {
    auto a = oracle::random_algorithm(p3, AlgorithmClass::general, rng);
    for (const auto& faults : FaultSet::enumerate(3, 1)) {
      auto all = oracle::actuals(3, 2, faults);
      for (const auto& x : all) {
        for (const auto& y : all) {
          ++pairs;
          mismatches += is_reachable(a, faults, x, y) != oracle::reachable(a, faults, x, y);
        }
      }
    }
  }
  auto algs = oracle::all_general_algorithms(params(2, 0, 2, 0));
  for (const auto& a : algs) {
    auto all = oracle::actuals(2, 2, FaultSet{});
    for (const auto& x : all) {
      for (const auto& y : all) {
        ++pairs;
        mismatches += is_reachable(a, FaultSet{}, x, y) != oracle::reachable(a, FaultSet{}, x, y);
      }
    }
  }
  c.require(mismatches == 0, "is_reachable matches the oracle");
  int synth_mismatch = 0;
  for (int t = 0; t <= 2; ++t) {
    bool exists = false;
    for (const auto& a : algs) exists = exists || oracle::stabilizes(a, t);
    bool sat = synthesize(params(2, 0, 2, t), AlgorithmClass::general).outcome ==
               SynthOutcome::found;
    synth_mismatch += sat != exists;
    c.detail << "t=" << t << ':' << (sat ? "sat" : "unsat") << ' ';
  }
  c.require(synth_mismatch == 0, "synth matches brute force");
  c.detail << "pairs=" << pairs << " mismatches=" << mismatches;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::function<Check()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8};
  // Optional argument: run a single criterion.
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Check c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " exception: " << e.what();
    }
    all_ok = all_ok && c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << c.detail.str()
              << std::endl;
  }
  return all_ok ? 0 : 1;
}
