#include "syncount/verifier.h"

#include <algorithm>
#include <sstream>

namespace syncount {

namespace {

// Bit i set iff node can be driven to state i from x.
using StateMask = std::uint32_t;

StateMask reachable_states(const Algorithm& alg, const ActualSpace& space,
                           std::uint64_t x, int node) {
  StateMask mask = 0;
  const auto& observed = alg.space();
  for (std::uint64_t fill = 0; fill < space.filling_count(); ++fill) {
    mask |= StateMask{1} << alg.transition(node, space.fill(observed, x, fill));
  }
  return mask;
}

}  // namespace

bool is_reachable(const Algorithm& alg, const FaultSet& faults,
                  const ActualConfig& x, const ActualConfig& y) {
  const auto& p = alg.params();
  ActualSpace space(p.n, p.s, faults);
  auto xi = space.index_of(x);
  space.index_of(y);  // validates y against F
  for (int node : space.correct_nodes()) {
    if (!(reachable_states(alg, space, xi, node) >> y.entries[node] & 1)) {
      return false;
    }
  }
  return true;
}

ProjectionGraph build_projection_graph(const Algorithm& alg,
                                       const FaultSet& faults,
                                       const VerifierLimits& limits) {
  const auto& p = alg.params();
  if (!faults.fits(p.n)) throw std::invalid_argument("fault set outside [n]");
  if (checked_pow(p.s, p.n - static_cast<int>(faults.size())) > limits.max_nodes) {
    throw SizeLimitError("projection graph for F=" + faults.to_string() +
                         " exceeds the node cap");
  }
  ProjectionGraph g(ActualSpace(p.n, p.s, faults));
  const auto& space = g.space_;
  const auto& correct = space.correct_nodes();
  g.successors_.resize(space.size());

  std::vector<std::vector<State>> choices(correct.size());
  std::vector<std::size_t> cursor(correct.size());
  for (std::uint64_t x = 0; x < space.size(); ++x) {
    for (std::size_t k = 0; k < correct.size(); ++k) {
      choices[k].clear();
      StateMask mask = reachable_states(alg, space, x, correct[k]);
      for (int c = 0; c < p.s; ++c) {
        if (mask >> c & 1) choices[k].push_back(static_cast<State>(c));
      }
    }
    // Cartesian product of the per-node choices, in ascending index order
    // (node 0 is the least significant digit, so iterate it fastest).
    auto& out = g.successors_[x];
    std::fill(cursor.begin(), cursor.end(), 0);
    while (true) {
      std::uint64_t y = 0;
      std::uint64_t place = 1;
      for (std::size_t k = 0; k < correct.size(); ++k) {
        y += choices[k][cursor[k]] * place;
        place *= p.s;
      }
      out.push_back(static_cast<std::uint32_t>(y));
      std::size_t k = 0;
      while (k < correct.size() && ++cursor[k] == choices[k].size()) {
        cursor[k] = 0;
        ++k;
      }
      if (k == correct.size()) break;
    }
    std::sort(out.begin(), out.end());
    g.edge_count_ += out.size();
  }
  g.compute_depths();
  return g;
}

void ProjectionGraph::compute_depths() {
  const std::size_t count = successors_.size();
  depth_.assign(count, kUnbounded);
  depth_[zero()] = kGood;
  depth_[one()] = kGood;

  // current[x] <=> x in B(d). B(d+1) = {x in B(0) : succ(x) meets B(d)} is
  // monotone decreasing, so it either empties or reaches a fixed point.
  std::vector<char> current(count, 0);
  std::size_t members = 0;
  for (std::size_t x = 0; x < count; ++x) {
    if (depth_[x] != kGood) {
      current[x] = 1;
      ++members;
    }
  }
  std::vector<char> next(count, 0);
  for (int d = 0; members > 0; ++d) {
    std::size_t next_members = 0;
    for (std::size_t x = 0; x < count; ++x) {
      next[x] = 0;
      if (!current[x]) continue;
      for (auto y : successors_[x]) {
        if (current[y]) {
          next[x] = 1;
          break;
        }
      }
      if (next[x]) {
        ++next_members;
      } else {
        depth_[x] = d;
      }
    }
    if (next_members == members) break;  // fixed point: remaining depths unbounded
    current.swap(next);
    members = next_members;
  }
}

bool ProjectionGraph::good_cycle_exclusive() const {
  const auto& z = successors_[zero()];
  const auto& o = successors_[one()];
  return z.size() == 1 && z[0] == one() && o.size() == 1 && o[0] == zero();
}

std::vector<std::uint32_t> ProjectionGraph::bad_set(int d) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < depth_.size(); ++x) {
    if (depth_[x] != kGood && depth_[x] >= d) out.push_back(x);
  }
  return out;
}

std::optional<int> ProjectionGraph::stabilization_time() const {
  if (!good_cycle_exclusive()) return std::nullopt;
  int worst = -1;
  for (int d : depth_) {
    if (d == kUnbounded) return std::nullopt;
    worst = std::max(worst, d);
  }
  return worst + 1;
}

std::vector<FaultSet> fault_sets_to_check(const Algorithm& alg) {
  const auto& p = alg.params();
  return fault_sets_to_check(p.n, p.f, alg.algorithm_class());
}

std::vector<FaultSet> fault_sets_to_check(int n, int f, AlgorithmClass cls) {
  auto all = FaultSet::enumerate(n, f);
  if (cls == AlgorithmClass::general) return all;
  std::vector<FaultSet> out;
  for (const auto& faults : all) {
    bool canonical = true;
    for (int r = 1; r < n && canonical; ++r) {
      if (faults.rotated(n, r) < faults) canonical = false;
    }
    if (canonical) out.push_back(faults);
  }
  return out;
}

Execution extract_counterexample(const ProjectionGraph& g, int t) {
  Execution ex;
  ex.faults = g.fault_set();
  const auto& space = g.space();
  if (!g.good_cycle_exclusive()) {
    for (auto start : {g.zero(), g.one()}) {
      auto expected = start == g.zero() ? g.one() : g.zero();
      for (auto y : g.successors(start)) {
        if (y != expected) {
          ex.configs = {space.config_at(start), space.config_at(y)};
          return ex;
        }
      }
    }
  }
  std::optional<std::uint32_t> start;
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    if (g.bad_depth(x) != ProjectionGraph::kGood && g.bad_depth(x) >= t) {
      start = x;
      break;
    }
  }
  if (!start) {
    throw Error("projection graph for F=" + g.fault_set().to_string() +
                " stabilizes within " + std::to_string(t) + " rounds");
  }
  std::uint32_t x = *start;
  ex.configs.push_back(space.config_at(x));
  for (int remaining = t; remaining > 0; --remaining) {
    // Follow a successor that still has a bad walk of length remaining - 1.
    std::optional<std::uint32_t> next;
    for (auto y : g.successors(x)) {
      int d = g.bad_depth(y);
      if (d != ProjectionGraph::kGood && d >= remaining - 1) {
        next = y;
        break;
      }
    }
    if (!next) throw Error("inconsistent bad-depth certificate");
    x = *next;
    ex.configs.push_back(space.config_at(x));
  }
  return ex;
}

VerificationReport check_stabilization(const Algorithm& alg, int t,
                                       const VerifierLimits& limits) {
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  VerificationReport report;
  report.t = t;
  report.verdict = Verdict::stabilizes;
  for (const auto& faults : fault_sets_to_check(alg)) {
    auto g = build_projection_graph(alg, faults, limits);
    FaultSetResult result{faults, g.good_cycle_exclusive(),
                          g.stabilization_time()};
    bool ok = result.stabilization_time && *result.stabilization_time <= t;
    if (!ok && report.verdict == Verdict::stabilizes) {
      report.verdict = Verdict::fails;
      report.counterexample = extract_counterexample(g, t);
    }
    report.per_fault_set.push_back(std::move(result));
  }
  return report;
}

std::optional<int> VerificationReport::stabilization_time() const {
  int worst = 0;
  for (const auto& r : per_fault_set) {
    if (!r.stabilization_time) return std::nullopt;
    worst = std::max(worst, *r.stabilization_time);
  }
  return worst;
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  for (const auto& r : per_fault_set) {
    out << "F=" << r.faults.to_string() << " stab_time=";
    if (r.stabilization_time) {
      out << *r.stabilization_time;
    } else {
      out << "inf";
    }
    out << '\n';
  }
  if (counterexample) {
    out << "counterexample F=" << counterexample->faults.to_string()
        << " rounds=" << counterexample->rounds() << '\n';
    for (std::size_t r = 0; r < counterexample->configs.size(); ++r) {
      out << r << ": " << counterexample->configs[r].to_string() << '\n';
    }
  }
  return out.str();
}

std::string export_dot(const ProjectionGraph& g) {
  const auto& space = g.space();
  auto name = [&](std::uint32_t x) {
    return '"' + space.config_at(x).to_string() + '"';
  };
  std::ostringstream out;
  out << "digraph projection_graph {\n";
  out << "  label=\"F=" << g.fault_set().to_string() << "\";\n";
  out << "  subgraph cluster_good {\n    label=\"good\";\n";
  out << "    " << name(g.zero()) << ";\n    " << name(g.one()) << ";\n  }\n";

  std::vector<int> depths;
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    if (g.bad_depth(x) != ProjectionGraph::kGood) depths.push_back(g.bad_depth(x));
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  for (int d : depths) {
    std::string tag = d == ProjectionGraph::kUnbounded ? "inf" : std::to_string(d);
    out << "  subgraph cluster_depth_" << tag << " {\n";
    out << "    label=\"depth " << tag << "\";\n";
    for (std::uint32_t x = 0; x < g.node_count(); ++x) {
      if (g.bad_depth(x) == d) out << "    " << name(x) << ";\n";
    }
    out << "  }\n";
  }
  for (std::uint32_t x = 0; x < g.node_count(); ++x) {
    for (auto y : g.successors(x)) {
      out << "  " << name(x) << " -> " << name(y) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace syncount
