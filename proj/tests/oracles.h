// Brute-force references for the property tests. Nothing here uses the
// projection-graph machinery: successors are found by trying every observed
// configuration, stabilization by explicit walk-length iteration.

#ifndef SYNCOUNT_TESTS_ORACLES_H
#define SYNCOUNT_TESTS_ORACLES_H

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "syncount/core_model.h"

namespace oracle {

using syncount::ActualConfig;
using syncount::Algorithm;
using syncount::AlgorithmClass;
using syncount::FaultSet;
using syncount::ObservedConfig;
using syncount::Params;
using syncount::State;

inline std::vector<State> digits(std::uint64_t index, int n, int s) {
  std::vector<State> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = static_cast<State>(index % s);
    index /= s;
  }
  return out;
}

/// For every correct node, the set of states it can move to from x.
inline std::vector<std::set<State>> successor_states(const Algorithm& alg, const FaultSet& faults,
                                                     const ActualConfig& x) {
  const auto& p = alg.params();
  std::vector<std::set<State>> out(p.n);
  std::uint64_t total = 1;
  for (int i = 0; i < p.n; ++i) total *= p.s;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    ObservedConfig u{digits(idx, p.n, p.s)};
    bool matches = true;
    for (int i = 0; i < p.n && matches; ++i) {
      matches = faults.contains(i) ? x.entries[i] == p.s : x.entries[i] == u.entries[i];
    }
    if (!matches) continue;
    for (int i = 0; i < p.n; ++i) {
      if (!faults.contains(i)) out[i].insert(alg.transition(i, u));
    }
  }
  return out;
}

inline bool reachable(const Algorithm& alg, const FaultSet& faults, const ActualConfig& x,
                      const ActualConfig& y) {
  auto succ = successor_states(alg, faults, x);
  for (int i = 0; i < alg.params().n; ++i) {
    if (faults.contains(i)) continue;
    if (!succ[i].count(y.entries[i])) return false;
  }
  return true;
}

/// All actual configurations for F, star = s.
inline std::vector<ActualConfig> actuals(int n, int s, const FaultSet& faults) {
  std::vector<ActualConfig> out;
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= s;
  std::set<std::vector<State>> seen;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    auto d = digits(idx, n, s);
    for (int i = 0; i < n; ++i) {
      if (faults.contains(i)) d[i] = static_cast<State>(s);
    }
    if (seen.insert(d).second) out.push_back(ActualConfig{d, s});
  }
  return out;
}

inline bool good(const ActualConfig& x, State c) {
  for (auto e : x.entries) {
    if (e != x.star() && e != c) return false;
  }
  return true;
}

/// Exact stabilization time for one fault set, nullopt if never.
inline std::optional<int> stabilization_time(const Algorithm& alg, const FaultSet& faults) {
  const auto& p = alg.params();
  auto all = actuals(p.n, p.s, faults);
  const std::size_t m = all.size();
  std::vector<std::vector<char>> edge(m, std::vector<char>(m, 0));
  std::size_t zero = 0;
  std::size_t one = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (good(all[a], 0)) zero = a;
    if (good(all[a], 1)) one = a;
    auto succ = successor_states(alg, faults, all[a]);
    for (std::size_t b = 0; b < m; ++b) {
      bool ok = true;
      for (int i = 0; i < p.n && ok; ++i) {
        if (!faults.contains(i)) ok = succ[i].count(all[b].entries[i]) > 0;
      }
      edge[a][b] = ok;
    }
  }
  for (std::size_t b = 0; b < m; ++b) {
    if (edge[zero][b] != (b == one) || edge[one][b] != (b == zero)) return std::nullopt;
  }
  // bad[x]: a walk of the current length avoiding the good pair starts at x.
  std::vector<char> bad(m, 1);
  bad[zero] = bad[one] = 0;
  for (int d = 0; d <= static_cast<int>(m) + 1; ++d) {
    if (std::count(bad.begin(), bad.end(), 1) == 0) return d;
    std::vector<char> next(m, 0);
    for (std::size_t a = 0; a < m; ++a) {
      if (a == zero || a == one) continue;
      for (std::size_t b = 0; b < m && !next[a]; ++b) next[a] = edge[a][b] && bad[b];
    }
    bad = std::move(next);
  }
  return std::nullopt;
}

/// Stabilizes within t for every F with |F| <= f (all of them, no symmetry).
inline bool stabilizes(const Algorithm& alg, int t) {
  for (const auto& faults : FaultSet::enumerate(alg.params().n, alg.params().f)) {
    auto d = stabilization_time(alg, faults);
    if (!d || *d > t) return false;
  }
  return true;
}

/// Every general algorithm for the given parameters (small sizes only).
inline std::vector<Algorithm> all_general_algorithms(const Params& p) {
  std::uint64_t entries = 1;
  for (int i = 0; i < p.n; ++i) entries *= p.s;
  const std::uint64_t cells = entries * p.n;
  std::uint64_t count = 1;
  for (std::uint64_t c = 0; c < cells; ++c) count *= p.s;
  std::vector<Algorithm> out;
  for (std::uint64_t code = 0; code < count; ++code) {
    std::vector<std::vector<State>> tables(p.n, std::vector<State>(entries));
    auto rest = code;
    for (int i = 0; i < p.n; ++i) {
      for (auto& v : tables[i]) {
        v = static_cast<State>(rest % p.s);
        rest /= p.s;
      }
    }
    out.emplace_back(p, AlgorithmClass::general, std::move(tables));
  }
  return out;
}

inline Algorithm random_algorithm(const Params& p, AlgorithmClass cls, std::mt19937_64& rng) {
  std::uint64_t entries = 1;
  for (int i = 0; i < p.n; ++i) entries *= p.s;
  int tables = cls == AlgorithmClass::cyclic ? 1 : p.n;
  std::vector<std::vector<State>> t(tables, std::vector<State>(entries));
  for (auto& table : t) {
    for (auto& v : table) v = static_cast<State>(rng() % p.s);
  }
  return Algorithm(p, cls, std::move(t));
}

}  // namespace oracle

#endif  // SYNCOUNT_TESTS_ORACLES_H
