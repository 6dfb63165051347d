// Counter-example guided synthesis over a bounded unrolling.
//
// One incremental formula Psi holds the adversary's choice of exactly f
// faulty nodes, the transition bits a(w,i,b) and an execution x^0..x^k of
// the encoded algorithm. A model rho fixes a candidate A(rho); a second
// query under the assumptions Gamma(rho) looks for a bad execution of that
// candidate, whose touched transition bits are then forbidden.

#ifndef SYNCOUNT_CEGAR_H
#define SYNCOUNT_CEGAR_H

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "syncount/core_model.h"
#include "syncount/solver_backend.h"

namespace syncount {

/// Variable numbering. Everything not tied to a timepoint lives in the base
/// block; timepoint k occupies base_size() + k * block_size() onwards.
class CegarVars {
 public:
  CegarVars(const Params& params, AlgorithmClass cls);

  const Params& params() const { return params_; }
  AlgorithmClass algorithm_class() const { return class_; }
  const ConfigSpace& space() const { return space_; }
  int bits() const { return bits_; }
  int table_count() const { return class_ == AlgorithmClass::cyclic ? 1 : params_.n; }

  int p(int i) const { return 1 + i; }
  int p_eq(int k, int i) const { return 1 + n_ + k * n_ + i; }
  int p_le(int k, int i) const { return 1 + n_ + f_ * n_ + k * n_ + i; }
  /// Bit b of A_i(w); cyclic tables alias to node 0 through the rotation.
  int a(std::uint64_t w, int i, int b) const;
  int a_first() const { return a_base_; }
  int a_count() const { return a_count_; }
  /// Tseitin variables of psi_illegal.
  int q() const { return a_base_ + a_count_; }
  int q1() const { return q() + 1; }
  int q2() const { return q() + 2; }

  int u(int i, int j, int b, int k) const { return at(k, (i * n_ + j) * bits_ + b); }
  int g(int i, int b, int k) const { return u(i, i, b, k); }
  int d(std::uint64_t w, int j, int k) const {
    return at(k, u_count_ + static_cast<int>(w) * n_ + j);
  }
  int z(int k) const { return at(k, u_count_ + d_count_); }
  int o(int k) const { return z(k) + 1; }
  int z(int i, int k) const { return z(k) + 2 + i; }
  int o(int i, int k) const { return z(k) + 2 + n_ + i; }
  int loop(int k) const { return z(k) + 2 + 2 * n_; }

  int base_size() const { return base_size_; }
  int block_size() const { return block_size_; }
  int num_vars(int k_max) const { return base_size_ + (k_max + 1) * block_size_; }

  /// Literals stating that `bits` (low bit first) encode `state`.
  std::vector<int> state_literals(std::span<const int> bit_vars, State state) const;

 private:
  int at(int k, int offset) const { return base_size_ + k * block_size_ + offset + 1; }

  Params params_;
  AlgorithmClass class_;
  ConfigSpace space_;
  int n_;
  int f_;
  int bits_;
  int a_base_;
  int a_count_;
  int base_size_;
  int u_count_;
  int d_count_;
  int block_size_;
};

/// psi_faulty and psi_trivial, plus the valid-state restriction on a-bits.
CnfFormula build_base(const CegarVars& vars);

/// psi_state and psi_indicator for timepoint k, and the loop variable l(k)
/// for k > 0. With strengthen_observation, d(w,j,k) also implies that j
/// observes exactly w.
CnfFormula build_tau(const CegarVars& vars, int k, bool strengthen_observation = false);

/// q -> (q1 or q2), q1 -> z(0) and not o(1), q2 -> o(0) and not z(1); solving
/// under the assumption q looks for psi_illegal.
CnfFormula build_illegal(const CegarVars& vars);

/// What a model says about the candidate and the execution it contains.
struct DecodedRun {
  FaultSet faults;
  std::vector<ActualConfig> configs;  // x^0..x^k
  /// observed[j][i]: index of the configuration node i sees at time j, for
  /// correct nodes (unused entries for faulty nodes).
  std::vector<std::vector<std::uint64_t>> observed;
};

Algorithm decode_candidate(const CegarVars& vars, const Model& model, int t);
DecodedRun decode_run(const CegarVars& vars, const Model& model, int k);

/// Gamma(rho): one literal per transition bit.
std::vector<int> gamma(const CegarVars& vars, const Model& model);

/// psi_forbid(sigma, k): at least one transition bit used by the correct
/// nodes in steps 0..k-1 of the execution in sigma must change. Duplicate
/// literals (cyclic aliasing) are merged; an empty result means that no
/// algorithm avoids this execution.
std::vector<int> forbid(const CegarVars& vars, const Model& sigma, int k);

/// The same kind of clause for an execution given explicitly, e.g. a
/// counterexample reported by the verifier.
std::vector<int> forbid_execution(const CegarVars& vars, const Algorithm& alg,
                                  const Execution& ex);

/// Clauses forbidding every algorithm under which the correct nodes can
/// follow `configs` for some adversary behaviour: one fresh selector per
/// (step, node) means "no filling of x^r leads node i to its next state",
/// and at least one selector must hold. Fresh variables are taken from
/// next_var onwards.
std::vector<std::vector<int>> forbid_walk(const CegarVars& vars, const FaultSet& faults,
                                          const std::vector<ActualConfig>& configs,
                                          int& next_var);

/// Executions of alg that have not stabilized after t rounds, at most one
/// per start configuration and fault set, plus wrong successors of 0_F/1_F.
std::vector<Execution> bad_walks(const Algorithm& alg, int t, std::size_t limit);

enum class CegarVariant { basic, shortloop, overshoot };
std::string_view to_string(CegarVariant v);
CegarVariant parse_cegar_variant(std::string_view text);

enum class CegarOutcome { found, unrealizable, timeout };
std::string_view to_string(CegarOutcome o);

struct CegarEvent {
  std::string kind;  // "illegal", "candidate", "refine", "unroll", "found", ...
  std::int64_t iteration = 0;
  int k = 0;
  int t = 0;
  std::size_t clauses = 0;
  std::int64_t solve_calls = 0;
};

struct CegarOptions {
  AlgorithmClass algorithm_class = AlgorithmClass::general;
  CegarVariant variant = CegarVariant::overshoot;
  /// Target bound; nullopt means s^(n-f) - 2 (overshoot only).
  std::optional<int> t;
  bool strengthen_observation = false;
  /// Overshoot: keep tightening the bound after the first algorithm.
  bool tighten = true;
  /// Extra refinements per candidate: up to this many bad walks of length t
  /// taken from the candidate's projection graphs (0 = off).
  int verifier_walks = 0;
  /// Refine with forbid_walk instead of forbid: rule out every candidate
  /// admitting the counterexample's actual-configuration walk, whatever the
  /// adversary reports.
  bool generalize = false;
  /// Initial phase false: candidates start from the all-zero tables and
  /// move away from them only as far as refinements force.
  BackendConfig backend{BackendKind::in_process, {}, {{"phase", 0}}};
  /// Per-solve limits; the seed is passed to the backend.
  SolveLimits limits;
  std::chrono::duration<double> time_limit = std::chrono::seconds(600);
  std::function<void(const CegarEvent&)> on_progress;
  /// Called for every verified algorithm (overshoot emits a sequence).
  std::function<void(const Algorithm&, int t)> on_algorithm;
};

struct CegarStats {
  std::int64_t iterations = 0;
  std::int64_t refinements = 0;
  std::int64_t verifier_refinements = 0;
  std::int64_t solve_calls = 0;
  std::size_t clauses = 0;
  int max_k = 0;
  double seconds = 0.0;
};

struct CegarResult {
  CegarOutcome outcome = CegarOutcome::timeout;
  std::optional<Algorithm> algorithm;  // best verified algorithm
  std::optional<int> achieved_t;
  /// Bound for which no algorithm exists (overshoot: the last bound tried).
  std::optional<int> unrealizable_bound;
  CegarStats stats;
};

/// params.t is the target unless options.t overrides it; options.variant
/// selects the search loop.
CegarResult run_cegar(const Params& params, const CegarOptions& options);

CegarResult run_basic(const Params& params, CegarOptions options);
CegarResult run_shortloop(const Params& params, CegarOptions options);
CegarResult run_overshoot(const Params& params, CegarOptions options);

}  // namespace syncount

#endif  // SYNCOUNT_CEGAR_H
