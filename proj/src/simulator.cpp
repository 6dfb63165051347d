#include "syncount/simulator.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "syncount/verifier.h"

namespace syncount {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto step = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return step(step(step(seed) ^ a) ^ b);
}

std::string_view to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::none: return "none";
    case AdversaryKind::random: return "random";
    case AdversaryKind::greedy: return "greedy";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(std::string_view text) {
  if (text == "none") return AdversaryKind::none;
  if (text == "random") return AdversaryKind::random;
  if (text == "greedy") return AdversaryKind::greedy;
  throw std::invalid_argument("unknown adversary '" + std::string(text) + "'");
}

State RandomAdversary::report(int, int, int, int) {
  return static_cast<State>(std::uniform_int_distribution<int>(0, states_ - 1)(rng_));
}

struct GreedyAdversary::Impl {
  const Algorithm& alg;
  std::mt19937_64 rng;
  std::map<FaultSet, ProjectionGraph> graphs;
  std::vector<std::uint64_t> filling;  // per victim, for channel 0
  FaultSet faults;

  const ProjectionGraph& graph(const FaultSet& f) {
    auto it = graphs.find(f);
    if (it == graphs.end()) it = graphs.emplace(f, build_projection_graph(alg, f)).first;
    return it->second;
  }
};

GreedyAdversary::GreedyAdversary(const Algorithm& alg, std::uint64_t seed)
    : impl_(new Impl{alg, std::mt19937_64(mix_seed(seed)), {}, {}, {}}) {}

GreedyAdversary::~GreedyAdversary() = default;

void GreedyAdversary::prepare(int, int channel, std::span<const State> actual,
                              const FaultSet& faults) {
  if (channel != 0) return;
  auto& im = *impl_;
  const auto& g = im.graph(faults);
  const auto& space = g.space();
  const auto& observed = im.alg.space();
  im.faults = faults;
  ActualConfig x{{actual.begin(), actual.end()}, space.states()};
  auto xi = space.index_of(x);
  // Largest bad depth wins; ties are broken at random.
  std::vector<std::uint32_t> best;
  int best_depth = ProjectionGraph::kGood - 1;
  for (auto y : g.successors(static_cast<std::uint32_t>(xi))) {
    int d = g.bad_depth(y);
    if (d > best_depth) {
      best_depth = d;
      best.clear();
    }
    if (d == best_depth) best.push_back(y);
  }
  auto target = best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(im.rng)];
  const int n = space.nodes();
  im.filling.assign(n, 0);
  for (int victim : space.correct_nodes()) {
    State want = space.digit(target, victim);
    for (std::uint64_t w = 0; w < space.filling_count(); ++w) {
      if (im.alg.transition(victim, space.fill(observed, xi, w)) == want) {
        im.filling[victim] = w;
        break;
      }
    }
  }
}

State GreedyAdversary::report(int, int channel, int faulty, int victim) {
  auto& im = *impl_;
  const int s = im.alg.params().s;
  if (channel != 0) return static_cast<State>(std::uniform_int_distribution<int>(0, s - 1)(im.rng));
  const auto& members = im.faults.members();
  auto pos = std::find(members.begin(), members.end(), faulty) - members.begin();
  std::uint64_t w = im.filling[victim];
  for (long k = 0; k < pos; ++k) w /= s;
  return static_cast<State>(w % s);
}

std::unique_ptr<Adversary> make_adversary(AdversaryKind kind, int states, std::uint64_t seed,
                                          const Algorithm* alg) {
  switch (kind) {
    case AdversaryKind::none:
      return std::make_unique<SilentAdversary>();
    case AdversaryKind::greedy:
      if (alg) return std::make_unique<GreedyAdversary>(*alg, seed);
      [[fallthrough]];
    case AdversaryKind::random:
      break;
  }
  return std::make_unique<RandomAdversary>(states, seed);
}

// ---------------------------------------------------------------------------

namespace {

bool alternating_good(const ActualConfig& a, const ActualConfig& b) {
  State first = 0;
  bool seen = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_faulty(i)) continue;
    if (!seen) {
      first = a.entries[i];
      seen = true;
    }
    if (first > 1 || a.entries[i] != first || b.entries[i] != 1 - first) return false;
  }
  return true;
}

bool is_good(const ActualConfig& a) {
  State first = 2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_faulty(i)) continue;
    if (first == 2) first = a.entries[i];
    if (a.entries[i] != first || first > 1) return false;
  }
  return true;
}

ActualConfig initial(std::span<const State> init, const FaultSet& faults, int s) {
  ActualConfig x{{init.begin(), init.end()}, s};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (faults.contains(static_cast<int>(i))) {
      x.entries[i] = x.star();
    } else if (x.entries[i] >= s) {
      throw std::invalid_argument("initial state out of range");
    }
  }
  return x;
}

void check_faults(const FaultSet& faults, int n, int f) {
  if (!faults.fits(n)) throw std::invalid_argument("fault set does not fit n");
  if (static_cast<int>(faults.size()) > f) {
    throw std::invalid_argument("more faulty nodes than the algorithm tolerates");
  }
}

// One synchronous round: every correct node reads `x` with faulty entries
// replaced by the adversary's per-victim reports.
template <typename Step>
ActualConfig step_once(const ActualConfig& x, const FaultSet& faults, Adversary& adversary,
                       int round, int channel, int s, Step&& next) {
  adversary.prepare(round, channel, x.entries, faults);
  ActualConfig y = x;
  std::vector<State> view(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x.is_faulty(v)) continue;
    for (std::size_t w = 0; w < x.size(); ++w) {
      if (!x.is_faulty(w)) {
        view[w] = x.entries[w];
        continue;
      }
      State r = adversary.report(round, channel, static_cast<int>(w), static_cast<int>(v));
      if (r >= s) throw std::out_of_range("adversary reported state " + std::to_string(r));
      view[w] = r;
    }
    y.entries[v] = next(static_cast<int>(v), std::span<const State>(view));
  }
  return y;
}

}  // namespace

std::optional<int> find_stabilization(const std::vector<ActualConfig>& configs, int window) {
  if (configs.empty() || window < 1) return std::nullopt;
  int last = static_cast<int>(configs.size()) - 1;
  if (!is_good(configs[last])) return std::nullopt;
  int r = last;
  while (r > 0 && alternating_good(configs[r - 1], configs[r])) --r;
  if (last - r + 1 < window) return std::nullopt;
  return r;
}

std::string Trace::to_text() const {
  std::ostringstream out;
  out << "F=" << faults.to_string() << '\n';
  for (std::size_t r = 0; r < configs.size(); ++r) out << r << ' ' << configs[r].to_string() << '\n';
  out << "stabilized_at=" << (stabilized_at ? std::to_string(*stabilized_at) : "none") << '\n';
  return out.str();
}

Trace run(const Algorithm& alg, Adversary& adversary, const FaultSet& faults,
          std::span<const State> init, const RunOptions& options) {
  const auto& p = alg.params();
  if (static_cast<int>(init.size()) != p.n) throw std::invalid_argument("init size != n");
  check_faults(faults, p.n, p.f);
  Trace trace{faults, p.s, {initial(init, faults, p.s)}, std::nullopt};
  for (int r = 0; r < options.rounds; ++r) {
    auto y = step_once(trace.configs.back(), faults, adversary, r, 0, p.s,
                       [&](int v, std::span<const State> u) {
                         return alg.transition(v, alg.space().index_of(u));
                       });
    if (options.check_steps && !is_reachable(alg, faults, trace.configs.back(), y)) {
      throw Error("simulated step is not an edge of the projection graph");
    }
    trace.configs.push_back(std::move(y));
  }
  trace.stabilized_at = find_stabilization(trace.configs, options.window);
  return trace;
}

Trace run(const TopologyAlgorithm& alg, Adversary& adversary, const FaultSet& faults,
          std::span<const State> init, const RunOptions& options) {
  if (static_cast<int>(init.size()) != alg.nodes()) throw std::invalid_argument("init size != n");
  check_faults(faults, alg.nodes(), alg.faults());
  Trace trace{faults, alg.states(), {initial(init, faults, alg.states())}, std::nullopt};
  for (int r = 0; r < options.rounds; ++r) {
    trace.configs.push_back(step_once(trace.configs.back(), faults, adversary, r, 0,
                                      alg.states(), [&](int v, std::span<const State> u) {
                                        return alg.transition(v, u);
                                      }));
  }
  trace.stabilized_at = find_stabilization(trace.configs, options.window);
  return trace;
}

std::string LayeredTrace::to_text() const {
  std::ostringstream out;
  out << "F=" << faults.to_string() << '\n';
  for (std::size_t r = 0; r < values.size(); ++r) {
    out << r;
    for (const auto& layer : layers) out << ' ' << layer[r].to_string();
    out << " value=" << (values[r] ? std::to_string(*values[r]) : "-") << '\n';
  }
  out << "stabilized_at=" << (stabilized_at ? std::to_string(*stabilized_at) : "none") << '\n';
  return out.str();
}

LayeredTrace run(const LayeredCounter& counter, Adversary& adversary, const FaultSet& faults,
                 const std::vector<std::vector<State>>& init, const RunOptions& options) {
  const int b = counter.bits();
  if (static_cast<int>(init.size()) != b) throw std::invalid_argument("one init per layer");
  check_faults(faults, counter.nodes(), counter.faults());
  LayeredTrace trace;
  trace.faults = faults;
  trace.layers.resize(b);
  for (int i = 0; i < b; ++i) {
    const auto& alg = counter.layers[i];
    if (static_cast<int>(init[i].size()) != alg.params().n) {
      throw std::invalid_argument("init size != n");
    }
    trace.layers[i].push_back(initial(init[i], faults, alg.params().s));
  }
  auto value_of = [&](int r) -> std::optional<std::uint64_t> {
    std::optional<std::uint64_t> agreed;
    for (int v = 0; v < counter.nodes(); ++v) {
      if (faults.contains(v)) continue;
      std::uint64_t value = 0;
      for (int i = 0; i < b; ++i) {
        State st = trace.layers[i][r].entries[v];
        if (st > 1) return std::nullopt;
        value |= std::uint64_t{st} << i;
      }
      if (agreed && *agreed != value) return std::nullopt;
      agreed = value;
    }
    return agreed;
  };
  trace.values.push_back(value_of(0));
  for (int r = 0; r < options.rounds; ++r) {
    std::vector<char> ticks(counter.nodes(), 1);
    for (int i = 0; i < b; ++i) {
      const auto& alg = counter.layers[i];
      const auto& x = trace.layers[i].back();
      auto y = step_once(x, faults, adversary, r, i, alg.params().s,
                         [&](int v, std::span<const State> u) {
                           return ticks[v] ? alg.transition(v, alg.space().index_of(u))
                                           : x.entries[v];
                         });
      for (int v = 0; v < counter.nodes(); ++v) {
        ticks[v] = ticks[v] && !x.is_faulty(v) && x.entries[v] == 1 && y.entries[v] == 0;
      }
      trace.layers[i].push_back(std::move(y));
    }
    trace.values.push_back(value_of(r + 1));
  }
  const auto& values = trace.values;
  int last = static_cast<int>(values.size()) - 1;
  if (values[last]) {
    int r = last;
    while (r > 0 && values[r - 1] && (*values[r - 1] + 1) % counter.modulus() == *values[r]) --r;
    if (last - r + 1 >= options.window) trace.stabilized_at = r;
  }
  return trace;
}

// ---------------------------------------------------------------------------

void RandomizedCounter::validate() const {
  if (n < 4 || f < 0 || 3 * f > n) {
    throw std::invalid_argument("randomized counter needs n >= 4 and f <= n/3");
  }
}

int RandomizedCounter::rule(std::span<const State> observed) const {
  int zeros = 0;
  int ones = 0;
  for (State st : observed) {
    zeros += st == 0;
    ones += st == 1;
  }
  if (2 * zeros > n + f) return 1;
  if (2 * ones > n + f) return 2;
  return 3;
}

Trace run_randomized_trial(const RandomizedCounter& rc, Adversary& adversary,
                           const FaultSet& faults, std::span<const State> init,
                           std::uint64_t seed, int trial, int rounds, int window,
                           std::int64_t* exclusion_violations) {
  rc.validate();
  if (static_cast<int>(init.size()) != rc.n) throw std::invalid_argument("init size != n");
  check_faults(faults, rc.n, rc.f);
  std::vector<std::mt19937_64> coins;
  for (int v = 0; v < rc.n; ++v) coins.emplace_back(mix_seed(seed, trial, v));
  Trace trace{faults, 2, {initial(init, faults, 2)}, std::nullopt};
  for (int r = 0; r < rounds; ++r) {
    bool rule1 = false;
    bool rule2 = false;
    trace.configs.push_back(step_once(trace.configs.back(), faults, adversary, r, 0, 2,
                                      [&](int v, std::span<const State> u) -> State {
                                        switch (rc.rule(u)) {
                                          case 1: rule1 = true; return 1;
                                          case 2: rule2 = true; return 0;
                                          default: return coins[v]() & 1;
                                        }
                                      }));
    if (rule1 && rule2 && exclusion_violations) ++*exclusion_violations;
    // Once all correct nodes agree they stay in agreement, so a confirmed
    // window ends the trial.
    if (auto s = find_stabilization(trace.configs, window)) {
      trace.stabilized_at = s;
      break;
    }
  }
  return trace;
}

std::string RandomizedStats::to_text() const {
  std::ostringstream out;
  out << "trials=" << times.size() << " censored=" << censored << " mean=" << mean
      << " median=" << median << " max=" << max << " exclusion_violations="
      << exclusion_violations << " rounds_checked=" << rounds_checked << '\n';
  return out.str();
}

RandomizedStats run_randomized(const RandomizedCounter& rc, const RandomizedOptions& options) {
  rc.validate();
  FaultSet faults = options.faults;
  if (faults.empty() && rc.f > 0) {
    std::vector<int> last(rc.f);
    std::iota(last.begin(), last.end(), rc.n - rc.f);
    faults = FaultSet(last);
  }
  RandomizedStats stats;
  std::vector<int> done;
  for (int trial = 0; trial < options.trials; ++trial) {
    std::vector<State> init;
    if (options.init) {
      init = *options.init;
    } else {
      std::mt19937_64 rng(mix_seed(options.seed, trial, ~std::uint64_t{0}));
      for (int v = 0; v < rc.n; ++v) init.push_back(static_cast<State>(rng() & 1));
    }
    auto adversary = make_adversary(options.adversary, 2, mix_seed(options.seed, trial, 1 << 20));
    auto trace = run_randomized_trial(rc, *adversary, faults, init, options.seed, trial,
                                      options.round_cap, options.window,
                                      &stats.exclusion_violations);
    stats.rounds_checked += static_cast<std::int64_t>(trace.configs.size() - 1);
    stats.times.push_back(trace.stabilized_at);
    if (trace.stabilized_at) {
      done.push_back(*trace.stabilized_at);
    } else {
      ++stats.censored;
    }
  }
  if (!done.empty()) {
    std::sort(done.begin(), done.end());
    stats.mean = std::accumulate(done.begin(), done.end(), 0.0) / done.size();
    auto m = done.size();
    stats.median = m % 2 ? done[m / 2] : (done[m / 2 - 1] + done[m / 2]) / 2.0;
    stats.max = done.back();
  }
  return stats;
}

}  // namespace syncount
