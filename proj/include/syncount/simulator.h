// Round-by-round execution under a Byzantine adversary.
//
// Each round the adversary sees the actual configuration and then chooses,
// for every (faulty node, correct recipient) pair, the state that recipient
// observes. Correct nodes apply their transition function to what they
// observe. Layered counters expose one channel per layer.

#ifndef SYNCOUNT_SIMULATOR_H
#define SYNCOUNT_SIMULATOR_H

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "syncount/core_model.h"
#include "syncount/transforms.h"

namespace syncount {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Called once per round and channel before any report; `actual` has the
  /// star value at faulty positions.
  virtual void prepare(int round, int channel, std::span<const State> actual,
                       const FaultSet& faults) {
    (void)round, (void)channel, (void)actual, (void)faults;
  }
  /// State that `victim` observes for `faulty` in this round.
  virtual State report(int round, int channel, int faulty, int victim) = 0;
};

enum class AdversaryKind { none, random, greedy };
std::string_view to_string(AdversaryKind k);
AdversaryKind parse_adversary_kind(std::string_view text);

/// Faulty nodes always report 0.
class SilentAdversary : public Adversary {
 public:
  State report(int, int, int, int) override { return 0; }
};

/// Independent uniform reports per recipient.
class RandomAdversary : public Adversary {
 public:
  RandomAdversary(int states, std::uint64_t seed) : states_(states), rng_(mix_seed(seed)) {}
  State report(int, int, int, int) override;

 private:
  int states_;
  std::mt19937_64 rng_;
};

/// Steers a deterministic algorithm towards the successor with the largest
/// bad depth in its projection graph, then picks for every victim a report
/// that produces that victim's part of the successor. Channels other than 0
/// get random reports.
class GreedyAdversary : public Adversary {
 public:
  GreedyAdversary(const Algorithm& alg, std::uint64_t seed);
  ~GreedyAdversary() override;

  void prepare(int round, int channel, std::span<const State> actual,
               const FaultSet& faults) override;
  State report(int round, int channel, int faulty, int victim) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `alg` is needed for the greedy kind only; without it greedy degrades to
/// random.
std::unique_ptr<Adversary> make_adversary(AdversaryKind kind, int states, std::uint64_t seed,
                                          const Algorithm* alg = nullptr);

struct RunOptions {
  int rounds = 50;
  /// Consecutive alternating good configurations that confirm stabilization.
  int window = 4;
  /// Check every step of a deterministic trace with is_reachable.
  bool check_steps = true;
};

struct Trace {
  FaultSet faults;
  int states = 2;
  std::vector<ActualConfig> configs;  // configs[r] after r rounds
  /// First r from which every configuration is good and alternates with its
  /// successor, provided at least `window` configurations remain.
  std::optional<int> stabilized_at;

  /// One line per round: "<round> <config>".
  std::string to_text() const;
};

/// First r such that configs r..end alternate between 0_F and 1_F and at
/// least `window` of them exist.
std::optional<int> find_stabilization(const std::vector<ActualConfig>& configs, int window);

/// init holds one state per node; entries of faulty nodes are ignored.
Trace run(const Algorithm& alg, Adversary& adversary, const FaultSet& faults,
          std::span<const State> init, const RunOptions& options = {});
Trace run(const TopologyAlgorithm& alg, Adversary& adversary, const FaultSet& faults,
          std::span<const State> init, const RunOptions& options = {});

struct LayeredTrace {
  FaultSet faults;
  /// layers[i][r]: layer-i configuration after r rounds.
  std::vector<std::vector<ActualConfig>> layers;
  /// Counter value agreed by all correct nodes (bit i = layer i), nullopt
  /// while they disagree or some layer is outside {0,1}.
  std::vector<std::optional<std::uint64_t>> values;
  /// First r from which the value increases by one modulo 2^b every round,
  /// with at least `window` values remaining.
  std::optional<int> stabilized_at;

  std::string to_text() const;
};

/// init[i] is the initial configuration of layer i.
LayeredTrace run(const LayeredCounter& counter, Adversary& adversary, const FaultSet& faults,
                 const std::vector<std::vector<State>>& init, const RunOptions& options = {});

/// The randomized 2-counter: more than (n+f)/2 zeros in the observed
/// configuration (own entry included) -> 1; otherwise more than (n+f)/2
/// ones -> 0; otherwise a fair coin.
struct RandomizedCounter {
  int n = 4;
  int f = 1;

  void validate() const;  // n >= 4, 3f <= n
  /// Rule applied for an observed configuration: 1, 2 or 3 (coin).
  int rule(std::span<const State> observed) const;
};

struct RandomizedOptions {
  int trials = 1000;
  int round_cap = 1000;
  int window = 4;
  std::uint64_t seed = 1;
  AdversaryKind adversary = AdversaryKind::random;
  FaultSet faults;  // defaults to the last f nodes when empty and f > 0
  /// Fixed initial configuration; random per trial when absent.
  std::optional<std::vector<State>> init;
};

struct RandomizedStats {
  std::vector<std::optional<int>> times;  // per trial; nullopt = censored
  int censored = 0;
  double mean = 0.0;   // over uncensored trials
  double median = 0.0;
  int max = 0;
  /// Rounds in which one correct node applied rule 1 and another rule 2.
  std::int64_t exclusion_violations = 0;
  std::int64_t rounds_checked = 0;

  std::string to_text() const;
};

/// One trial; returns its trace. Coins come from per-node streams derived
/// from (seed, trial, node).
Trace run_randomized_trial(const RandomizedCounter& rc, Adversary& adversary,
                           const FaultSet& faults, std::span<const State> init,
                           std::uint64_t seed, int trial, int rounds, int window,
                           std::int64_t* exclusion_violations = nullptr);

RandomizedStats run_randomized(const RandomizedCounter& rc, const RandomizedOptions& options);

}  // namespace syncount

#endif  // SYNCOUNT_SIMULATOR_H
