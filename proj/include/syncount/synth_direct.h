// Direct propositional encoding of "an algorithm with these parameters
// exists": transition tables, adversary closure, projection-graph edges and
// bad-set depths for every fault set, all in one CNF.
//
// Variables:
//   a(u,i,c)   A_i(u) = c
//   h(F,x,i,c) node i can move to c from x under F
//   e(F,x,y)   y is reachable from x under F
//   b(F,x,d)   a length-d walk from x avoids 0_F and 1_F

#ifndef SYNCOUNT_SYNTH_DIRECT_H
#define SYNCOUNT_SYNTH_DIRECT_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncount/core_model.h"
#include "syncount/solver_backend.h"
#include "syncount/verifier.h"

namespace syncount {

struct EncodeOptions {
  /// Use the fault-free bound t0 (params.t0, or kDefaultT0 capped at t)
  /// for F = {}.
  bool non_uniform = false;
  std::uint64_t max_vars = std::uint64_t{1} << 27;

  static constexpr int kDefaultT0 = 3;
};

/// Dense variable numbering, reproducible from the parameters alone. The
/// a-block comes first, then h, e and b blocks for each fault set in
/// enumeration order.
class VarAtlas {
 public:
  VarAtlas(const Params& params, AlgorithmClass cls,
           std::uint64_t max_vars = EncodeOptions{}.max_vars);

  const Params& params() const { return params_; }
  AlgorithmClass algorithm_class() const { return class_; }
  const ConfigSpace& space() const { return space_; }
  const std::vector<FaultSet>& fault_sets() const { return fault_sets_; }
  const ActualSpace& actual_space(std::size_t fi) const { return blocks_[fi].space; }
  int num_vars() const { return num_vars_; }

  /// Number of distinct transition tables (1 for cyclic algorithms).
  int table_count() const { return class_ == AlgorithmClass::cyclic ? 1 : params_.n; }

  /// a(u,i,c); for cyclic algorithms resolves to a(rotate(u,i),0,c).
  int a(std::uint64_t u, int node, int c) const;
  int h(std::size_t fi, std::uint64_t x, int node, int c) const;
  int e(std::size_t fi, std::uint64_t x, std::uint64_t y) const;
  int b(std::size_t fi, std::uint64_t x, int d) const;

  /// Human-readable name of a variable, e.g. "F={0} e x=*012 y=*120".
  std::string describe(int var) const;

  /// Comment lines explaining the numbering.
  std::vector<std::string> legend() const;

 private:
  struct Block {
    ActualSpace space;
    std::vector<int> slot;  // node -> position among correct nodes, or -1
    int h_base = 0;
    int e_base = 0;
    int b_base = 0;
  };

  Params params_;
  AlgorithmClass class_;
  ConfigSpace space_;
  std::vector<FaultSet> fault_sets_;
  std::vector<Block> blocks_;
  int num_vars_ = 0;
};

struct CnfInstance {
  Params params;  // t0 set iff the non-uniform bound is encoded
  AlgorithmClass algorithm_class;
  VarAtlas atlas;
  CnfFormula cnf;
};

/// Throws SizeLimitError when the variable count exceeds options.max_vars.
CnfInstance encode(const Params& params, AlgorithmClass cls,
                   const EncodeOptions& options = {});

/// Reads the transition tables off a model. Throws FormatError unless every
/// (u, i) has exactly one true a(u,i,c).
Algorithm decode(const Model& model, const CnfInstance& instance);

/// DIMACS text whose comments carry the parameters and the atlas legend.
std::string emit_dimacs(const CnfInstance& instance);

/// Recovers the instance parameters from the comments of emit_dimacs
/// output; the atlas is rebuilt from them.
struct InstanceHeader {
  Params params;
  AlgorithmClass algorithm_class;
};
InstanceHeader parse_instance_header(std::string_view dimacs);

enum class SynthOutcome { found, unrealizable, unknown };

struct SynthResult {
  SynthOutcome outcome = SynthOutcome::unknown;
  std::optional<Algorithm> algorithm;
  std::optional<VerificationReport> report;  // re-verification of algorithm
  SolveStats stats;
  int num_vars = 0;
  std::size_t num_clauses = 0;
  std::string diagnostic;
};

/// encode, solve, decode and re-verify. An algorithm that fails
/// re-verification raises Error.
SynthResult synthesize(const Params& params, AlgorithmClass cls,
                       const EncodeOptions& options = {},
                       const BackendConfig& backend = {},
                       const SolveLimits& limits = {});

/// check_stabilization plus the fault-free bound t0 when present.
bool verify_with_t0(const Algorithm& alg, VerificationReport* report = nullptr);

}  // namespace syncount

#endif  // SYNCOUNT_SYNTH_DIRECT_H
