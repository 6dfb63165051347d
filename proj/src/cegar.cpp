#include "syncount/cegar.h"

#include <algorithm>
#include <tuple>

#include "syncount/verifier.h"

namespace syncount {

namespace {

int bits_for(int s) {
  int bits = 1;
  while ((1 << bits) < s) ++bits;
  return bits;
}

void add_clause(CnfFormula& cnf, std::vector<int> clause) {
  cnf.clauses.push_back(std::move(clause));
}

// Forbid every bit pattern in [s, 2^B) on the given bit variables.
void forbid_invalid_patterns(CnfFormula& cnf, const std::vector<int>& bit_vars, int s) {
  int bits = static_cast<int>(bit_vars.size());
  for (int pattern = s; pattern < (1 << bits); ++pattern) {
    std::vector<int> clause;
    for (int b = 0; b < bits; ++b) {
      clause.push_back(pattern >> b & 1 ? -bit_vars[b] : bit_vars[b]);
    }
    add_clause(cnf, std::move(clause));
  }
}

State read_state(const Model& model, std::span<const int> bit_vars) {
  int value = 0;
  for (std::size_t b = 0; b < bit_vars.size(); ++b) {
    if (model.value(bit_vars[b])) value |= 1 << b;
  }
  return static_cast<State>(value);
}

struct Timeout {};

}  // namespace

// ---------------------------------------------------------------------------
// Variables and formulas

CegarVars::CegarVars(const Params& params, AlgorithmClass cls)
    : params_(params), class_(cls), space_(params.n, params.s), n_(params.n),
      f_(params.f), bits_(bits_for(params.s)) {
  a_base_ = 1 + n_ + 2 * f_ * n_;
  auto a_count = static_cast<std::uint64_t>(table_count()) * space_.size() * bits_;
  auto d_count = space_.size() * n_;
  if (a_count + d_count > (std::uint64_t{1} << 26)) {
    throw SizeLimitError("CEGAR encoding too large for these parameters");
  }
  a_count_ = static_cast<int>(a_count);
  base_size_ = a_base_ - 1 + a_count_ + 3;
  u_count_ = n_ * n_ * bits_;
  d_count_ = static_cast<int>(d_count);
  block_size_ = u_count_ + d_count_ + 2 + 2 * n_ + 1;
}

int CegarVars::a(std::uint64_t w, int i, int b) const {
  int table = i;
  if (class_ == AlgorithmClass::cyclic) {
    w = space_.rotate(w, i);
    table = 0;
  }
  return a_base_ + static_cast<int>((table * space_.size() + w) * bits_ + b);
}

std::vector<int> CegarVars::state_literals(std::span<const int> bit_vars, State state) const {
  std::vector<int> lits;
  for (std::size_t b = 0; b < bit_vars.size(); ++b) {
    lits.push_back(state >> b & 1 ? bit_vars[b] : -bit_vars[b]);
  }
  return lits;
}

CnfFormula build_base(const CegarVars& v) {
  const auto& p = v.params();
  const int n = p.n;
  const int f = p.f;
  CnfFormula cnf;
  cnf.num_vars = v.base_size();

  // psi_faulty: p_eq(k,.) selects the k-th faulty node, p_le(k,i) says it
  // is at most i.
  for (int k = 0; k < f; ++k) {
    for (int i = 0; i < n; ++i) add_clause(cnf, {-v.p_eq(k, i), v.p_le(k, i)});
    for (int j = 1; j < n; ++j) {
      add_clause(cnf, {-v.p_le(k, j), v.p_eq(k, j), v.p_le(k, j - 1)});
      add_clause(cnf, {-v.p_le(k, j - 1), v.p_le(k, j)});
      add_clause(cnf, {-v.p_le(k, j - 1), -v.p_eq(k, j)});
    }
    add_clause(cnf, {v.p_eq(k, 0), -v.p_le(k, 0)});
    add_clause(cnf, {v.p_le(k, n - 1)});
    if (k > 0) {
      for (int i = 0; i < n; ++i) add_clause(cnf, {-v.p_eq(k - 1, i), -v.p_le(k, i)});
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> some{-v.p(i)};
    for (int k = 0; k < f; ++k) {
      add_clause(cnf, {-v.p_eq(k, i), v.p(i)});
      some.push_back(v.p_eq(k, i));
    }
    add_clause(cnf, std::move(some));
  }

  // psi_trivial: all-0 goes to 1, all-1 goes to 0.
  const auto all_one = v.space().uniform(1);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < v.bits(); ++b) {
      add_clause(cnf, {b == 0 ? v.a(0, i, b) : -v.a(0, i, b)});
      add_clause(cnf, {-v.a(all_one, i, b)});
    }
  }

  if ((1 << v.bits()) != p.s) {
    for (int table = 0; table < v.table_count(); ++table) {
      for (std::uint64_t w = 0; w < v.space().size(); ++w) {
        std::vector<int> bit_vars;
        for (int b = 0; b < v.bits(); ++b) bit_vars.push_back(v.a(w, table, b));
        forbid_invalid_patterns(cnf, bit_vars, p.s);
      }
    }
  }
  return cnf;
}

CnfFormula build_tau(const CegarVars& v, int k, bool strengthen_observation) {
  const auto& p = v.params();
  const int n = p.n;
  const int bits = v.bits();
  const auto& space = v.space();
  CnfFormula cnf;
  cnf.num_vars = v.num_vars(k);

  // psi_state
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((1 << bits) != p.s) {
        std::vector<int> bit_vars;
        for (int b = 0; b < bits; ++b) bit_vars.push_back(v.u(i, j, b, k));
        forbid_invalid_patterns(cnf, bit_vars, p.s);
      }
      if (i == j) continue;
      for (int b = 0; b < bits; ++b) {
        add_clause(cnf, {v.p(i), -v.u(i, j, b, k), v.g(i, b, k)});
        add_clause(cnf, {v.p(i), v.u(i, j, b, k), -v.g(i, b, k)});
      }
    }
  }
  for (std::uint64_t w = 0; w < space.size(); ++w) {
    for (int j = 0; j < n; ++j) {
      std::vector<int> clause{v.d(w, j, k)};
      for (int i = 0; i < n; ++i) {
        State digit = space.digit(w, i);
        for (int b = 0; b < bits; ++b) {
          int lit = v.u(i, j, b, k);
          clause.push_back(digit >> b & 1 ? -lit : lit);
          if (strengthen_observation) {
            add_clause(cnf, {-v.d(w, j, k), digit >> b & 1 ? lit : -lit});
          }
        }
      }
      add_clause(cnf, std::move(clause));
    }
  }
  if (k > 0) {
    for (std::uint64_t w = 0; w < space.size(); ++w) {
      for (int i = 0; i < n; ++i) {
        for (int b = 0; b < bits; ++b) {
          add_clause(cnf, {-v.d(w, i, k - 1), -v.g(i, b, k), v.a(w, i, b)});
          add_clause(cnf, {-v.d(w, i, k - 1), v.g(i, b, k), -v.a(w, i, b)});
        }
      }
    }
  }

  // psi_indicator
  std::vector<int> some_not_zero{v.z(k)};
  std::vector<int> some_not_one{v.o(k)};
  for (int i = 0; i < n; ++i) {
    add_clause(cnf, {-v.z(k), v.z(i, k)});
    add_clause(cnf, {-v.o(k), v.o(i, k)});
    some_not_zero.push_back(-v.z(i, k));
    some_not_one.push_back(-v.o(i, k));
    add_clause(cnf, {-v.p(i), v.z(i, k)});
    add_clause(cnf, {-v.p(i), v.o(i, k)});
    std::vector<int> nonzero{v.z(i, k)};
    std::vector<int> not_one{v.o(i, k), -v.g(i, 0, k)};
    for (int b = 0; b < bits; ++b) {
      add_clause(cnf, {-v.z(i, k), v.p(i), -v.g(i, b, k)});
      nonzero.push_back(v.g(i, b, k));
      if (b == 0) {
        add_clause(cnf, {-v.o(i, k), v.p(i), v.g(i, 0, k)});
      } else {
        add_clause(cnf, {-v.o(i, k), v.p(i), -v.g(i, b, k)});
        not_one.push_back(v.g(i, b, k));
      }
    }
    add_clause(cnf, std::move(nonzero));
    add_clause(cnf, std::move(not_one));
  }
  add_clause(cnf, std::move(some_not_zero));
  add_clause(cnf, std::move(some_not_one));

  // l(k) -> x^0 = x^k on the correct nodes.
  if (k > 0) {
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < bits; ++b) {
        add_clause(cnf, {-v.loop(k), v.p(i), -v.g(i, b, 0), v.g(i, b, k)});
        add_clause(cnf, {-v.loop(k), v.p(i), v.g(i, b, 0), -v.g(i, b, k)});
      }
    }
  }
  return cnf;
}

CnfFormula build_illegal(const CegarVars& v) {
  CnfFormula cnf;
  cnf.num_vars = v.num_vars(1);
  add_clause(cnf, {-v.q(), v.q1(), v.q2()});
  add_clause(cnf, {-v.q1(), v.z(0)});
  add_clause(cnf, {-v.q1(), -v.o(1)});
  add_clause(cnf, {-v.q2(), v.o(0)});
  add_clause(cnf, {-v.q2(), -v.z(1)});
  return cnf;
}

// ---------------------------------------------------------------------------
// Decoding and refinement

Algorithm decode_candidate(const CegarVars& v, const Model& model, int t) {
  Params params = v.params();
  params.t = t;
  params.t0.reset();
  const auto& space = v.space();
  std::vector<std::vector<State>> tables(v.table_count(), std::vector<State>(space.size()));
  std::vector<int> bit_vars(v.bits());
  for (int table = 0; table < v.table_count(); ++table) {
    for (std::uint64_t w = 0; w < space.size(); ++w) {
      for (int b = 0; b < v.bits(); ++b) bit_vars[b] = v.a(w, table, b);
      State state = read_state(model, bit_vars);
      if (state >= params.s) throw FormatError("model encodes an invalid successor state");
      tables[table][w] = state;
    }
  }
  return Algorithm(params, v.algorithm_class(), std::move(tables));
}

DecodedRun decode_run(const CegarVars& v, const Model& model, int k) {
  const auto& p = v.params();
  DecodedRun run;
  std::vector<int> faulty;
  for (int i = 0; i < p.n; ++i) {
    if (model.value(v.p(i))) faulty.push_back(i);
  }
  run.faults = FaultSet(faulty);
  std::vector<int> bit_vars(v.bits());
  for (int r = 0; r <= k; ++r) {
    ActualConfig x;
    x.states = p.s;
    for (int i = 0; i < p.n; ++i) {
      if (run.faults.contains(i)) {
        x.entries.push_back(x.star());
        continue;
      }
      for (int b = 0; b < v.bits(); ++b) bit_vars[b] = v.g(i, b, r);
      x.entries.push_back(read_state(model, bit_vars));
    }
    run.configs.push_back(std::move(x));
  }
  for (int r = 0; r < k; ++r) {
    std::vector<std::uint64_t> seen(p.n, 0);
    for (int j = 0; j < p.n; ++j) {
      if (run.faults.contains(j)) continue;
      std::uint64_t w = 0;
      for (int i = p.n - 1; i >= 0; --i) {
        for (int b = 0; b < v.bits(); ++b) bit_vars[b] = v.u(i, j, b, r);
        w = w * p.s + read_state(model, bit_vars);
      }
      seen[j] = w;
    }
    run.observed.push_back(std::move(seen));
  }
  return run;
}

std::vector<int> gamma(const CegarVars& v, const Model& model) {
  std::vector<int> lits;
  lits.reserve(v.a_count());
  for (int var = v.a_first(); var < v.a_first() + v.a_count(); ++var) {
    lits.push_back(model.value(var) ? var : -var);
  }
  return lits;
}

namespace {

std::vector<int> sorted_unique(std::vector<int> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return lits;
}

}  // namespace

std::vector<int> forbid(const CegarVars& v, const Model& sigma, int k) {
  auto run = decode_run(v, sigma, k);
  std::vector<int> lits;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < v.params().n; ++i) {
      if (run.faults.contains(i)) continue;
      for (int b = 0; b < v.bits(); ++b) {
        int var = v.a(run.observed[j][i], i, b);
        lits.push_back(sigma.value(var) ? -var : var);
      }
    }
  }
  return sorted_unique(std::move(lits));
}

std::vector<int> forbid_execution(const CegarVars& v, const Algorithm& alg, const Execution& ex) {
  const auto& p = v.params();
  ActualSpace vf(p.n, p.s, ex.faults);
  const auto& space = alg.space();
  std::vector<int> lits;
  for (std::size_t r = 0; r + 1 < ex.configs.size(); ++r) {
    auto x = vf.index_of(ex.configs[r]);
    for (int i : vf.correct_nodes()) {
      State target = ex.configs[r + 1].entries[i];
      std::optional<std::uint64_t> used;
      for (std::uint64_t fill = 0; fill < vf.filling_count() && !used; ++fill) {
        auto u = vf.fill(space, x, fill);
        if (alg.transition(i, u) == target) used = u;
      }
      if (!used) throw Error("execution is not reachable under the algorithm");
      for (int b = 0; b < v.bits(); ++b) {
        int var = v.a(*used, i, b);
        lits.push_back(target >> b & 1 ? -var : var);
      }
    }
  }
  return sorted_unique(std::move(lits));
}

std::vector<std::vector<int>> forbid_walk(const CegarVars& v, const FaultSet& faults,
                                          const std::vector<ActualConfig>& configs,
                                          int& next_var) {
  const auto& p = v.params();
  ActualSpace vf(p.n, p.s, faults);
  const auto& space = v.space();
  std::vector<std::vector<int>> clauses;
  std::vector<int> some;
  // Identical (x, node, target) triples share one selector.
  std::vector<std::tuple<std::uint64_t, int, State, int>> seen;
  for (std::size_t r = 0; r + 1 < configs.size(); ++r) {
    auto x = vf.index_of(configs[r]);
    for (int i : vf.correct_nodes()) {
      State target = configs[r + 1].entries[i];
      auto hit = std::find_if(seen.begin(), seen.end(), [&](const auto& e) {
        return std::get<0>(e) == x && std::get<1>(e) == i && std::get<2>(e) == target;
      });
      if (hit != seen.end()) continue;
      int c = next_var++;
      seen.emplace_back(x, i, target, c);
      some.push_back(c);
      for (std::uint64_t fill = 0; fill < vf.filling_count(); ++fill) {
        auto u = vf.fill(space, x, fill);
        std::vector<int> differs{-c};
        for (int b = 0; b < v.bits(); ++b) {
          int var = v.a(u, i, b);
          differs.push_back(target >> b & 1 ? -var : var);
        }
        clauses.push_back(sorted_unique(std::move(differs)));
      }
    }
  }
  clauses.push_back(std::move(some));
  return clauses;
}

std::vector<Execution> bad_walks(const Algorithm& alg, int t, std::size_t limit) {
  std::vector<Execution> out;
  for (const auto& faults : fault_sets_to_check(alg)) {
    auto g = build_projection_graph(alg, faults);
    const auto& space = g.space();
    for (auto start : {g.zero(), g.one()}) {
      auto expected = start == g.zero() ? g.one() : g.zero();
      for (auto y : g.successors(start)) {
        if (y != expected && out.size() < limit) {
          out.push_back({faults, {space.config_at(start), space.config_at(y)}});
        }
      }
    }
    for (std::uint32_t x = 0; x < g.node_count() && out.size() < limit; ++x) {
      if (g.bad_depth(x) == ProjectionGraph::kGood || g.bad_depth(x) < t) continue;
      Execution ex{faults, {space.config_at(x)}};
      auto at = x;
      for (int remaining = t; remaining > 0; --remaining) {
        for (auto y : g.successors(at)) {
          int d = g.bad_depth(y);
          if (d != ProjectionGraph::kGood && d >= remaining - 1) {
            at = y;
            break;
          }
        }
        ex.configs.push_back(space.config_at(at));
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Search loops

std::string_view to_string(CegarVariant variant) {
  switch (variant) {
    case CegarVariant::basic:
      return "basic";
    case CegarVariant::shortloop:
      return "shortloop";
    case CegarVariant::overshoot:
      break;
  }
  return "overshoot";
}

CegarVariant parse_cegar_variant(std::string_view text) {
  if (text == "basic") return CegarVariant::basic;
  if (text == "shortloop") return CegarVariant::shortloop;
  if (text == "overshoot") return CegarVariant::overshoot;
  throw std::invalid_argument("unknown CEGAR variant '" + std::string(text) + "'");
}

std::string_view to_string(CegarOutcome outcome) {
  switch (outcome) {
    case CegarOutcome::found:
      return "found";
    case CegarOutcome::unrealizable:
      return "unrealizable";
    case CegarOutcome::timeout:
      break;
  }
  return "timeout";
}

namespace {

using Clock = std::chrono::steady_clock;

class Search {
 public:
  Search(const Params& params, const CegarOptions& options)
      : vars_(params, options.algorithm_class), options_(options), start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(options.time_limit)),
        session_(make_session(options.backend, options.limits)),
        next_var_(vars_.num_vars(std::max(params.max_useful_t(), options.t.value_or(params.t))) +
                  1) {}

  CegarResult finish(CegarOutcome outcome) {
    result_.outcome = outcome;
    result_.stats.solve_calls = session_->solve_calls();
    result_.stats.clauses = session_->clause_count();
    result_.stats.max_k = unrolled_;
    result_.stats.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(result_);
  }

  // Steps 1-2 of every variant.
  void prepare() {
    add(build_base(vars_));
    unroll_to(1);
    add(build_illegal(vars_));
    while (auto rho = solve({vars_.q()})) {
      if (!refine(*rho, 1, "illegal")) throw Unrealizable{};
    }
  }

  void unroll_to(int k) {
    while (unrolled_ < k) {
      ++unrolled_;
      add(build_tau(vars_, unrolled_, options_.strengthen_observation));
    }
  }

  // Returns the model, or nullopt if unsatisfiable. Throws Timeout.
  std::optional<Model> solve(std::vector<int> assumptions) {
    auto remaining = deadline_ - Clock::now();
    if (remaining <= Clock::duration::zero()) throw Timeout{};
    auto limits = options_.limits;
    limits.time = std::min<std::chrono::duration<double>>(limits.time, remaining);
    session_->set_limits(limits);
    auto r = session_->solve_under(assumptions);
    if (r.status == SolveStatus::unknown) throw Timeout{};
    if (r.status == SolveStatus::unsat) return std::nullopt;
    return std::move(r.model);
  }

  std::optional<Model> counterexample(const std::vector<int>& gamma_lits, int k) {
    auto assumptions = gamma_lits;
    assumptions.push_back(-vars_.z(k));
    assumptions.push_back(-vars_.o(k));
    return solve(std::move(assumptions));
  }

  std::optional<Model> loop_counterexample(const std::vector<int>& gamma_lits, int k) {
    auto assumptions = gamma_lits;
    assumptions.push_back(vars_.loop(k));
    assumptions.push_back(-vars_.z(0));
    assumptions.push_back(-vars_.o(0));
    return solve(std::move(assumptions));
  }

  // False when the clause is empty, i.e. Psi became unsatisfiable.
  bool refine(std::vector<int> clause, const char* why) {
    ++result_.stats.refinements;
    if (clause.empty()) return false;
    session_->add_clause(clause);
    report(why);
    return true;
  }

  // Forbids the execution in sigma over steps 0..k-1.
  bool refine(const Model& sigma, int k, const char* why) {
    if (!options_.generalize) return refine(forbid(vars_, sigma, k), why);
    auto run = decode_run(vars_, sigma, k);
    return refine_walk(run.faults, run.configs, why);
  }

  bool refine(const Algorithm& alg, const Execution& ex, const char* why) {
    if (!options_.generalize) return refine(forbid_execution(vars_, alg, ex), why);
    return refine_walk(ex.faults, ex.configs, why);
  }

  bool refine_walk(const FaultSet& faults, const std::vector<ActualConfig>& configs,
                   const char* why) {
    ++result_.stats.refinements;
    auto clauses = forbid_walk(vars_, faults, configs, next_var_);
    if (clauses.back().empty()) return false;
    for (const auto& clause : clauses) session_->add_clause(clause);
    report(why);
    return true;
  }

  // Independent check of a candidate the encoding accepted; the verifier
  // also covers fault sets smaller than f, which the encoding does not.
  bool accept(const Algorithm& alg) {
    auto report = check_stabilization(alg, alg.params().t);
    if (report.verdict == Verdict::stabilizes) return true;
    ++result_.stats.verifier_refinements;
    if (!refine(alg, *report.counterexample, "verifier")) {
      throw Unrealizable{};
    }
    return false;
  }

  // Supplementary refinements from the candidate's own projection graphs.
  void refine_with_walks(const Model& rho, int t) {
    if (options_.verifier_walks <= 0) return;
    auto alg = decode_candidate(vars_, rho, t);
    for (const auto& ex : bad_walks(alg, t, options_.verifier_walks)) {
      ++result_.stats.verifier_refinements;
      if (!refine(alg, ex, "walk")) throw Unrealizable{};
    }
  }

  void found(Algorithm alg, int t) {
    result_.achieved_t = t;
    if (options_.on_algorithm) options_.on_algorithm(alg, t);
    result_.algorithm = std::move(alg);
    report("found", t);
  }

  void report(const char* kind, int t = -1) {
    if (!options_.on_progress) return;
    CegarEvent e;
    e.kind = kind;
    e.iteration = result_.stats.iterations;
    e.k = unrolled_;
    e.t = t;
    e.clauses = session_->clause_count();
    e.solve_calls = session_->solve_calls();
    options_.on_progress(e);
  }

  struct Unrealizable {};

  CegarVars vars_;
  CegarOptions options_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::unique_ptr<IncrementalSession> session_;
  CegarResult result_;
  int unrolled_ = -1;
  int next_var_;

 private:
  void add(const CnfFormula& cnf) {
    for (const auto& clause : cnf.clauses) session_->add_clause(clause);
  }
};

int target_bound(const Params& params, const CegarOptions& options, bool allow_unbounded) {
  if (options.t) return *options.t;
  if (allow_unbounded) return params.max_useful_t();
  return params.t;
}

// Figures 6 and 7 differ only in the short-loop search of step 4a.
CegarResult run_fixed(const Params& params, const CegarOptions& options, bool short_loops) {
  params.validate();
  const int t = target_bound(params, options, false);
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  Search search(params, options);
  try {
    search.prepare();
    search.unroll_to(t);
    while (auto rho = search.solve({})) {
      ++search.result_.stats.iterations;
      search.report("candidate", t);
      auto gamma_lits = gamma(search.vars_, *rho);
      bool refined = false;
      if (short_loops) {
        for (int k = 1; k <= t && !refined; ++k) {
          if (auto sigma = search.loop_counterexample(gamma_lits, k)) {
            if (!search.refine(*sigma, k, "loop")) {
              throw Search::Unrealizable{};
            }
            search.refine_with_walks(*rho, t);
            refined = true;
          }
        }
      }
      if (refined) continue;
      if (auto sigma = search.counterexample(gamma_lits, t)) {
        if (!search.refine(*sigma, t, "refine")) {
          throw Search::Unrealizable{};
        }
        search.refine_with_walks(*rho, t);
        continue;
      }
      auto alg = decode_candidate(search.vars_, *rho, t);
      if (!search.accept(alg)) continue;
      search.found(std::move(alg), t);
      return search.finish(CegarOutcome::found);
    }
  } catch (const Search::Unrealizable&) {
  } catch (const Timeout&) {
    return search.finish(CegarOutcome::timeout);
  }
  search.result_.unrealizable_bound = t;
  return search.finish(CegarOutcome::unrealizable);
}

}  // namespace

CegarResult run_basic(const Params& params, CegarOptions options) {
  options.variant = CegarVariant::basic;
  return run_fixed(params, options, false);
}

CegarResult run_shortloop(const Params& params, CegarOptions options) {
  options.variant = CegarVariant::shortloop;
  return run_fixed(params, options, true);
}

CegarResult run_overshoot(const Params& params, CegarOptions options) {
  options.variant = CegarVariant::overshoot;
  params.validate();
  int t = std::min(target_bound(params, options, true), params.max_useful_t());
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  Search search(params, options);
  try {
    search.prepare();
    int k = std::min(1, t);
    while (auto rho = search.solve({search.vars_.z(0)})) {
      ++search.result_.stats.iterations;
      search.report("candidate", t);
      auto gamma_lits = gamma(search.vars_, *rho);

      // Step 4a/4b: the shortest bad loop of length at most k.
      bool refined = false;
      int checked_loops = 0;
      auto find_loops = [&]() {
        for (int j = checked_loops + 1; j <= k && !refined; ++j) {
          if (auto sigma = search.loop_counterexample(gamma_lits, j)) {
            if (!search.refine(*sigma, j, "loop")) {
              throw Search::Unrealizable{};
            }
            search.refine_with_walks(*rho, t);
            refined = true;
          }
        }
        checked_loops = std::max(checked_loops, k);
      };
      find_loops();

      // Step 4c/4d, re-entered after unrolling or after tightening.
      while (!refined) {
        if (auto pi = search.counterexample(gamma_lits, k)) {
          if (k < t) {
            ++k;
            search.unroll_to(k);
            search.report("unroll", t);
            find_loops();
            continue;
          }
          if (!search.refine(*pi, k, "refine")) {
            throw Search::Unrealizable{};
          }
          search.refine_with_walks(*rho, t);
          refined = true;
          continue;
        }
        auto alg = decode_candidate(search.vars_, *rho, k);
        if (!search.accept(alg)) {
          refined = true;
          continue;
        }
        search.found(std::move(alg), k);
        if (!options.tighten || k == 0) return search.finish(CegarOutcome::found);
        --k;
        t = k;
      }
    }
  } catch (const Search::Unrealizable&) {
  } catch (const Timeout&) {
    return search.finish(search.result_.algorithm ? CegarOutcome::found : CegarOutcome::timeout);
  }
  search.result_.unrealizable_bound = t;
  return search.finish(search.result_.algorithm ? CegarOutcome::found
                                                 : CegarOutcome::unrealizable);
}

CegarResult run_cegar(const Params& params, const CegarOptions& options) {
  switch (options.variant) {
    case CegarVariant::basic:
      return run_basic(params, options);
    case CegarVariant::shortloop:
      return run_shortloop(params, options);
    case CegarVariant::overshoot:
      break;
  }
  return run_overshoot(params, options);
}

}  // namespace syncount
