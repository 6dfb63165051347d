// SAT solving behind one interface: an in-process incremental CaDiCaL
// session and a runner for external DIMACS solver processes.
//
// Every model handed out is re-evaluated against the clauses the backend
// received; a model that falsifies a stored clause aborts with
// BackendError.

#ifndef SYNCOUNT_SOLVER_BACKEND_H
#define SYNCOUNT_SOLVER_BACKEND_H

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "syncount/core_model.h"

namespace syncount {

class BackendError : public Error {
 public:
  using Error::Error;
};

enum class SolveStatus { sat, unsat, unknown };

std::string_view to_string(SolveStatus status);

/// Truth values for variables 1..num_vars().
class Model {
 public:
  Model() = default;
  explicit Model(std::vector<std::int8_t> values) : values_(std::move(values)) {}

  int num_vars() const { return static_cast<int>(values_.size()) - 1; }
  /// Value of a literal; variables outside the model read as false.
  bool value(int lit) const {
    int var = lit < 0 ? -lit : lit;
    bool v = var < static_cast<int>(values_.size()) && values_[var] > 0;
    return lit < 0 ? !v : v;
  }
  bool satisfies(std::span<const int> clause) const;

  /// Whitespace-separated literal list ("v ... 0" lines are accepted).
  static Model parse(std::string_view text, int num_vars);
  /// Solver-style "v" lines terminated by 0.
  std::string to_text() const;

 private:
  std::vector<std::int8_t> values_;
};

struct SolveStats {
  std::int64_t conflicts = -1;  // -1: not reported by the backend
  std::int64_t decisions = -1;
  double seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::unknown;
  std::optional<Model> model;  // present iff status == sat
  SolveStats stats;
  std::string diagnostic;
};

struct SolveLimits {
  std::chrono::duration<double> time = std::chrono::seconds(300);
  std::uint64_t memory_bytes = std::uint64_t{4} << 30;
  int seed = 0;
  /// DRAT proof output; passed through to the backend when non-empty.
  std::string proof_path;
};

/// A plain clause list in DIMACS terms.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<std::string> comments;  // without the leading "c "

  void add(std::vector<int> clause);
};

std::string to_dimacs(const CnfFormula& cnf);
CnfFormula parse_dimacs(std::string_view text);

/// Incremental solving: clauses persist, assumptions last for one call.
class IncrementalSession {
 public:
  virtual ~IncrementalSession() = default;

  void add_clause(std::span<const int> clause);
  void add_clause(std::initializer_list<int> clause) {
    add_clause(std::span<const int>(clause.begin(), clause.size()));
  }
  SolveResult solve_under(std::span<const int> assumptions = {});
  SolveResult solve_under(std::initializer_list<int> assumptions) {
    return solve_under(std::span<const int>(assumptions.begin(), assumptions.size()));
  }

  /// Further calls throw BackendError.
  void close() { closed_ = true; }
  bool closed() const { return closed_; }

  std::size_t clause_count() const { return clauses_.size(); }
  int max_var() const { return max_var_; }
  std::int64_t solve_calls() const { return solve_calls_; }

  /// Per-call limits; the time limit applies to each solve.
  void set_limits(const SolveLimits& limits) { limits_ = limits; }
  const SolveLimits& limits() const { return limits_; }

 protected:
  virtual void backend_add(std::span<const int> clause) = 0;
  virtual SolveResult backend_solve(std::span<const int> assumptions) = 0;

  const std::vector<std::vector<int>>& stored_clauses() const { return clauses_; }

 private:
  std::vector<std::vector<int>> clauses_;
  int max_var_ = 0;
  bool closed_ = false;
  std::int64_t solve_calls_ = 0;
  SolveLimits limits_;
};

enum class BackendKind { in_process, process };

struct BackendConfig {
  BackendKind kind = BackendKind::in_process;
  /// External solver binary for BackendKind::process; empty means
  /// solver_path_from_env().
  std::string solver_path;
  /// Option name/value pairs for the in-process solver, e.g. {"phase", 0}.
  std::vector<std::pair<std::string, int>> options;
};

std::unique_ptr<IncrementalSession> make_session(const BackendConfig& config = {},
                                                 const SolveLimits& limits = {});

/// $SYNCOUNT_SOLVER, else the bundled cadical binary when it was built.
std::string solver_path_from_env();

/// Runs an external DIMACS solver (exit codes 10/20, "s" and "v" lines).
/// Missing binaries, malformed output and exceeded limits give unknown.
SolveResult solve_oneshot(const CnfFormula& cnf, const SolveLimits& limits,
                          const std::string& solver_path);

/// Same contract, solved with the in-process backend.
SolveResult solve_in_process(const CnfFormula& cnf, const SolveLimits& limits);

}  // namespace syncount

#endif  // SYNCOUNT_SOLVER_BACKEND_H
