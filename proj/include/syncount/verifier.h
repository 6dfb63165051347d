// Exact correctness checking through projection graphs.
//
// For a fault set F the projection graph has the actual configurations V_F
// as nodes and an edge x -> y whenever the adversary can drive the system
// from x to y in one round. An algorithm stabilizes in time t iff, for every
// F, the only successor of 0_F is 1_F (and vice versa) and every walk of
// length t reaches 0_F or 1_F.

#ifndef SYNCOUNT_VERIFIER_H
#define SYNCOUNT_VERIFIER_H

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "syncount/core_model.h"

namespace syncount {

struct VerifierLimits {
  /// Cap on |V_F| per projection graph.
  std::uint64_t max_nodes = std::uint64_t{1} << 22;
};

bool is_reachable(const Algorithm& alg, const FaultSet& faults,
                  const ActualConfig& x, const ActualConfig& y);

class ProjectionGraph {
 public:
  /// Longest bad walk of unbounded length (a cycle avoiding 0_F and 1_F).
  static constexpr int kUnbounded = std::numeric_limits<int>::max();
  /// bad_depth() of 0_F and 1_F.
  static constexpr int kGood = -1;

  const FaultSet& fault_set() const { return space_.faults(); }
  const ActualSpace& space() const { return space_; }
  std::size_t node_count() const { return successors_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::uint32_t>& successors(std::uint32_t x) const {
    return successors_[x];
  }
  std::uint32_t zero() const { return static_cast<std::uint32_t>(space_.zero()); }
  std::uint32_t one() const { return static_cast<std::uint32_t>(space_.one()); }

  /// Condition 1: succ(0_F) = {1_F} and succ(1_F) = {0_F}.
  bool good_cycle_exclusive() const;

  /// Largest d with x in B_F(d), kUnbounded if walks of every length avoid
  /// the good configurations, kGood for 0_F and 1_F.
  int bad_depth(std::uint32_t x) const { return depth_[x]; }

  /// B_F(d): configurations from which a length-d walk avoids 0_F and 1_F.
  std::vector<std::uint32_t> bad_set(int d) const;

  /// Smallest d with B_F(d) empty; nullopt when condition 1 fails or the
  /// bad sets never empty.
  std::optional<int> stabilization_time() const;

 private:
  friend ProjectionGraph build_projection_graph(const Algorithm&,
                                                const FaultSet&,
                                                const VerifierLimits&);
  explicit ProjectionGraph(ActualSpace space) : space_(std::move(space)) {}
  void compute_depths();

  ActualSpace space_;
  std::vector<std::vector<std::uint32_t>> successors_;
  std::size_t edge_count_ = 0;
  std::vector<int> depth_;
};

/// Throws SizeLimitError when |V_F| exceeds limits.max_nodes.
ProjectionGraph build_projection_graph(const Algorithm& alg,
                                       const FaultSet& faults,
                                       const VerifierLimits& limits = {});

/// Fault sets the verifier has to inspect: all |F| <= f for general
/// algorithms; for cyclic ones a single representative per rotation class
/// (the lexicographically smallest rotation).
std::vector<FaultSet> fault_sets_to_check(const Algorithm& alg);
std::vector<FaultSet> fault_sets_to_check(int n, int f, AlgorithmClass cls);

enum class Verdict { stabilizes, fails };

struct FaultSetResult {
  FaultSet faults;
  bool good_cycle_exclusive = false;
  std::optional<int> stabilization_time;  // nullopt = inf
};

struct VerificationReport {
  Verdict verdict = Verdict::fails;
  int t = 0;
  std::vector<FaultSetResult> per_fault_set;
  std::optional<Execution> counterexample;

  /// Maximum over fault sets; nullopt if some fault set never stabilizes.
  std::optional<int> stabilization_time() const;

  /// One `F=<set> stab_time=<d|inf>` line per fault set, then an optional
  /// counterexample block.
  std::string to_text() const;
};

VerificationReport check_stabilization(const Algorithm& alg, int t,
                                       const VerifierLimits& limits = {});

/// A walk that has not stabilized after t rounds, or a two-configuration
/// execution leaving 0_F/1_F wrongly. Throws Error if g stabilizes in t.
Execution extract_counterexample(const ProjectionGraph& g, int t);

/// DOT rendering with one cluster per bad depth; node and edge order follow
/// configuration indices.
std::string export_dot(const ProjectionGraph& g);

}  // namespace syncount

#endif  // SYNCOUNT_VERIFIER_H
