// Domain types for synchronous 2-counting algorithms: parameters, fault
// sets, observed and actual configurations, transition tables and
// executions.
//
// Configuration indexing: an observed configuration u in [s]^n has index
// sum_i u_i * s^i (node 0 is the least significant digit). Actual
// configurations for a fault set F are indexed the same way over the
// non-faulty nodes in ascending order. The faulty marker `*` is stored as
// the sentinel value s.

#ifndef SYNCOUNT_CORE_MODEL_H
#define SYNCOUNT_CORE_MODEL_H

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace syncount {

using State = std::uint8_t;

/// Counters are 2-counters; larger moduli come from composing layers.
inline constexpr int kModulus = 2;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed algorithm file, DIMACS text, model or graph description.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A construction would exceed a configured size cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

enum class AlgorithmClass { cyclic, general };

std::string_view to_string(AlgorithmClass c);
AlgorithmClass parse_algorithm_class(std::string_view text);

struct Params {
  int n = 1;  // nodes
  int f = 0;  // tolerated Byzantine nodes
  int s = 2;  // states per node
  int t = 0;  // stabilization bound
  std::optional<int> t0;  // fault-free bound, <= t

  /// Throws std::invalid_argument when the parameters are inconsistent.
  void validate() const;

  std::uint64_t observed_count() const;
  std::uint64_t actual_count(int faulty) const;

  /// s^(n-f) - 2: no algorithm needs a longer bound than this.
  int max_useful_t() const;

  bool operator==(const Params&) const = default;
};

std::uint64_t checked_pow(std::uint64_t base, int exp);

class FaultSet {
 public:
  FaultSet() = default;
  FaultSet(std::initializer_list<int> members);
  explicit FaultSet(std::vector<int> members);

  bool contains(int node) const;
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<int>& members() const { return members_; }

  /// Every member lies in [0, n).
  bool fits(int n) const;

  /// Rotates every member by `by` modulo n.
  FaultSet rotated(int n, int by) const;

  /// Renders as "{0,2}".
  std::string to_string() const;
  static FaultSet parse(std::string_view text);

  /// All fault sets with at most f members, ordered by size then
  /// lexicographically.
  static std::vector<FaultSet> enumerate(int n, int f);

  auto operator<=>(const FaultSet&) const = default;

 private:
  std::vector<int> members_;
};

struct ObservedConfig {
  std::vector<State> entries;

  bool operator==(const ObservedConfig&) const = default;
};

struct ActualConfig {
  std::vector<State> entries;  // entries[i] == star() iff node i is faulty
  int states = 2;

  State star() const { return static_cast<State>(states); }
  bool is_faulty(int node) const { return entries[node] == star(); }
  std::size_t size() const { return entries.size(); }
  /// e.g. "*110"; states above 9 are not supported by this rendering.
  std::string to_string() const;

  bool operator==(const ActualConfig&) const = default;
};

ActualConfig project(const ObservedConfig& u, const FaultSet& faults,
                     int states);

/// Index arithmetic over [s]^n.
class ConfigSpace {
 public:
  ConfigSpace(int n, int s);

  int nodes() const { return n_; }
  int states() const { return s_; }
  std::uint64_t size() const { return size_; }

  std::uint64_t index_of(std::span<const State> config) const;
  std::vector<State> config_at(std::uint64_t index) const;
  State digit(std::uint64_t index, int node) const;
  std::uint64_t with_digit(std::uint64_t index, int node, State value) const;
  std::uint64_t place(int node) const { return powers_[node]; }

  /// Index of v with v_j = u_{(j + by) mod n}; rotate(u, i) puts node i
  /// first, which is how a cyclic algorithm's node i reads its view.
  std::uint64_t rotate(std::uint64_t index, int by) const;

  /// All-equal configuration (c, c, ..., c).
  std::uint64_t uniform(State c) const;

 private:
  int n_;
  int s_;
  std::uint64_t size_;
  std::vector<std::uint64_t> powers_;
};

/// V_F: the actual configurations for one fault set.
class ActualSpace {
 public:
  ActualSpace(int n, int s, FaultSet faults);

  int nodes() const { return n_; }
  int states() const { return s_; }
  const FaultSet& faults() const { return faults_; }
  const std::vector<int>& correct_nodes() const { return correct_; }
  std::uint64_t size() const { return size_; }

  std::uint64_t index_of(const ActualConfig& x) const;
  ActualConfig config_at(std::uint64_t index) const;
  /// State of node `node` in configuration `index`; star for faulty nodes.
  State digit(std::uint64_t index, int node) const;

  std::uint64_t zero() const;  // 0_F
  std::uint64_t one() const;   // 1_F
  bool is_good(std::uint64_t index) const {
    return index == zero() || index == one();
  }

  /// pi_F as an index map from [s]^n to V_F.
  std::uint64_t project_index(const ConfigSpace& observed,
                              std::uint64_t u) const;

  /// Number of ways to fill the faulty slots: s^|F|.
  std::uint64_t filling_count() const { return fillings_; }

  /// Observed configuration obtained from x by writing `filling` (base-s,
  /// faulty nodes in ascending order) into the faulty slots.
  std::uint64_t fill(const ConfigSpace& observed, std::uint64_t x,
                     std::uint64_t filling) const;

 private:
  int n_;
  int s_;
  FaultSet faults_;
  std::vector<int> correct_;
  std::vector<int> position_;  // node -> digit position among correct nodes
  std::vector<std::uint64_t> powers_;
  std::uint64_t size_;
  std::uint64_t fillings_;
};

/// V_F in index order; contains 0_F and 1_F.
std::vector<ActualConfig> enumerate_actuals(int n, int s,
                                            const FaultSet& faults);

class Algorithm {
 public:
  using TransitionFn = std::function<State(int node, std::span<const State>)>;

  /// tables.size() must be n for general and 1 for cyclic algorithms; every
  /// table has s^n entries below s.
  Algorithm(Params params, AlgorithmClass cls,
            std::vector<std::vector<State>> tables);

  static Algorithm from_function(Params params, AlgorithmClass cls,
                                 const TransitionFn& fn);

  const Params& params() const { return params_; }
  AlgorithmClass algorithm_class() const { return class_; }
  const ConfigSpace& space() const { return space_; }
  const std::vector<std::vector<State>>& tables() const { return tables_; }

  State transition(int node, const ObservedConfig& u) const;
  State transition(int node, std::uint64_t index) const {
    if (class_ == AlgorithmClass::cyclic) {
      return tables_[0][space_.rotate(index, node)];
    }
    return tables_[node][index];
  }

  /// Table of node i, expanded through the rotation for cyclic algorithms.
  std::vector<State> node_table(int node) const;

  /// Same transition functions, stored as n explicit tables.
  Algorithm as_general() const;

  Algorithm with_params(Params params) const;

  std::string to_text() const;
  static Algorithm from_text(std::string_view text);

  bool operator==(const Algorithm& other) const {
    return params_ == other.params_ && class_ == other.class_ &&
           tables_ == other.tables_;
  }

 private:
  Params params_;
  AlgorithmClass class_;
  ConfigSpace space_;
  std::vector<std::vector<State>> tables_;
};

Algorithm load_algorithm(const std::string& path);
void save_algorithm(const Algorithm& alg, const std::string& path);

struct Execution {
  FaultSet faults;
  std::vector<ActualConfig> configs;

  std::size_t rounds() const {
    return configs.empty() ? 0 : configs.size() - 1;
  }
};

}  // namespace syncount

#endif  // SYNCOUNT_CORE_MODEL_H
