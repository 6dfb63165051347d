#include "syncount/transforms.h"

#include <algorithm>
#include <sstream>

#include "syncount/verifier.h"

namespace syncount {

Algorithm extend_node(const Algorithm& alg) {
  const auto& p = alg.params();
  if (p.s < 2) throw std::invalid_argument("extend_node needs s >= 2");
  if (2 * p.f >= p.n) throw std::invalid_argument("extend_node needs f < n/2");
  Params q = p;
  q.n = p.n + 1;
  const auto& inner = alg.space();
  const int n = p.n;
  return Algorithm::from_function(
      q, AlgorithmClass::general, [&](int node, std::span<const State> u) -> State {
        auto first = inner.index_of(u.first(n));
        if (node < n) return alg.transition(node, first);
        int ones = 0;
        for (int i = 0; i < n; ++i) ones += alg.transition(i, first) == 1;
        return 2 * ones > n ? 1 : 0;
      });
}

// ---------------------------------------------------------------------------

TopologyGraph::TopologyGraph(int vertices) {
  for (int v = 0; v < vertices; ++v) add_vertex(v);
}

int TopologyGraph::add_vertex(int id) {
  if (std::find(ids_.begin(), ids_.end(), id) != ids_.end()) {
    throw FormatError("duplicate vertex id " + std::to_string(id));
  }
  ids_.push_back(id);
  for (auto& row : adj_) row.push_back(0);
  adj_.emplace_back(ids_.size(), 0);
  nbrs_.emplace_back();
  return size() - 1;
}

void TopologyGraph::add_edge(int a, int b) {
  if (a < 0 || b < 0 || a >= size() || b >= size()) throw std::out_of_range("edge endpoint");
  if (a == b) throw FormatError("self-loop at vertex " + std::to_string(id(a)));
  if (adj_[a][b]) return;
  adj_[a][b] = adj_[b][a] = 1;
  nbrs_[a].insert(std::upper_bound(nbrs_[a].begin(), nbrs_[a].end(), b), b);
  nbrs_[b].insert(std::upper_bound(nbrs_[b].begin(), nbrs_[b].end(), a), a);
}

int TopologyGraph::index_of(int vertex_id) const {
  auto it = std::find(ids_.begin(), ids_.end(), vertex_id);
  if (it == ids_.end()) throw FormatError("unknown vertex id " + std::to_string(vertex_id));
  return static_cast<int>(it - ids_.begin());
}

std::size_t TopologyGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : nbrs_) twice += n.size();
  return twice / 2;
}

TopologyGraph TopologyGraph::complete(int n) {
  TopologyGraph g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) g.add_edge(a, b);
  }
  return g;
}

TopologyGraph TopologyGraph::star(int n) {
  TopologyGraph g(n);
  for (int v = 1; v < n; ++v) g.add_edge(0, v);
  return g;
}

TopologyGraph TopologyGraph::circulant(int n, int reach) {
  TopologyGraph g(n);
  for (int v = 0; v < n; ++v) {
    for (int r = 1; r <= reach; ++r) {
      int w = (v + r) % n;
      if (w != v) g.add_edge(v, w);
    }
  }
  return g;
}

std::vector<int> Partition::layer_of(int vertices) const {
  std::vector<int> out(vertices, -1);
  for (std::size_t a = 0; a < layers.size(); ++a) {
    for (int v : layers[a]) {
      if (v >= 0 && v < vertices) out[v] = static_cast<int>(a);
    }
  }
  return out;
}

TopologyFile parse_topology(std::string_view text) {
  TopologyFile file;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<int, std::vector<int>>> layers;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    auto fail = [&]() {
      return FormatError("topology line " + std::to_string(line_no) + ": '" + line + "'");
    };
    std::vector<int> values;
    int value = 0;
    while (fields >> value) values.push_back(value);
    if (!fields.eof()) throw fail();
    if (kind == "v" && values.size() == 1) {
      file.graph.add_vertex(values[0]);
    } else if (kind == "e" && values.size() == 2) {
      edges.emplace_back(values[0], values[1]);
    } else if (kind == "p" && !values.empty()) {
      layers.emplace_back(values[0], std::vector<int>(values.begin() + 1, values.end()));
    } else {
      throw fail();
    }
  }
  for (auto [a, b] : edges) file.graph.add_edge(file.graph.index_of(a), file.graph.index_of(b));
  if (!layers.empty()) {
    Partition p;
    for (auto& [layer, ids] : layers) {
      if (layer < 0) throw FormatError("negative layer index");
      if (static_cast<std::size_t>(layer) >= p.layers.size()) p.layers.resize(layer + 1);
      for (int id : ids) p.layers[layer].push_back(file.graph.index_of(id));
    }
    for (auto& l : p.layers) std::sort(l.begin(), l.end());
    file.partition = std::move(p);
  }
  return file;
}

std::string topology_to_text(const TopologyGraph& g, const Partition* partition) {
  std::ostringstream out;
  for (int v = 0; v < g.size(); ++v) out << "v " << g.id(v) << '\n';
  for (int v = 0; v < g.size(); ++v) {
    for (int w : g.neighbours(v)) {
      if (v < w) out << "e " << g.id(v) << ' ' << g.id(w) << '\n';
    }
  }
  if (partition) {
    for (std::size_t a = 0; a < partition->layers.size(); ++a) {
      out << "p " << a;
      for (int v : partition->layers[a]) out << ' ' << g.id(v);
      out << '\n';
    }
  }
  return out.str();
}

bool is_valid_partition(const TopologyGraph& g, const Partition& p, int k, int m) {
  if (p.layers.empty() || static_cast<int>(p.layers[0].size()) != k) return false;
  std::vector<int> seen(g.size(), 0);
  for (const auto& layer : p.layers) {
    for (int v : layer) {
      if (v < 0 || v >= g.size() || seen[v]++) return false;
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != g.size()) return false;
  const auto& core = p.layers[0];
  for (std::size_t a = 0; a < core.size(); ++a) {
    for (std::size_t b = a + 1; b < core.size(); ++b) {
      if (!g.adjacent(core[a], core[b])) return false;
    }
  }
  auto layer = p.layer_of(g.size());
  for (std::size_t a = 1; a < p.layers.size(); ++a) {
    for (int v : p.layers[a]) {
      int earlier = 0;
      for (int w : g.neighbours(v)) earlier += layer[w] < static_cast<int>(a);
      if (earlier < m) return false;
    }
  }
  return true;
}

namespace {

std::optional<Partition> blacken(const TopologyGraph& g, const std::vector<int>& core, int m,
                                 int d) {
  Partition p;
  p.layers.push_back(core);
  std::vector<char> black(g.size(), 0);
  for (int v : core) black[v] = 1;
  int remaining = g.size() - static_cast<int>(core.size());
  for (int round = 1; round <= d && remaining > 0; ++round) {
    std::vector<int> turned;
    for (int v = 0; v < g.size(); ++v) {
      if (black[v]) continue;
      int count = 0;
      for (int w : g.neighbours(v)) count += black[w];
      if (count >= m) turned.push_back(v);
    }
    if (turned.empty()) return std::nullopt;
    for (int v : turned) black[v] = 1;
    remaining -= static_cast<int>(turned.size());
    p.layers.push_back(std::move(turned));
  }
  if (remaining > 0) return std::nullopt;
  return p;
}

bool next_clique(const TopologyGraph& g, std::vector<int>& pick, int k) {
  // Depth-first enumeration of k-cliques in lexicographic order; `pick`
  // holds the previous clique (empty on the first call).
  std::vector<int> stack = pick;
  bool resume = !stack.empty();
  auto extendable = [&](int v) {
    for (int w : stack) {
      if (!g.adjacent(v, w)) return false;
    }
    return true;
  };
  int next = 0;
  if (resume) {
    next = stack.back() + 1;
    stack.pop_back();
  }
  while (true) {
    if (static_cast<int>(stack.size()) == k) {
      pick = stack;
      return true;
    }
    while (next < g.size() && !extendable(next)) ++next;
    if (next < g.size()) {
      stack.push_back(next);
      next = next + 1;
      continue;
    }
    if (stack.empty()) return false;
    next = stack.back() + 1;
    stack.pop_back();
  }
}

}  // namespace

std::optional<Partition> check_topology(const TopologyGraph& g, int k, int m, int d,
                                        const std::optional<std::vector<int>>& core,
                                        int clique_search_cap) {
  if (k < 1 || m < 1 || d < 0) throw std::invalid_argument("k, m must be positive, d >= 0");
  if (core) {
    auto sorted = *core;
    std::sort(sorted.begin(), sorted.end());
    if (static_cast<int>(sorted.size()) != k ||
        std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      return std::nullopt;
    }
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      if (sorted[a] < 0 || sorted[a] >= g.size()) return std::nullopt;
      for (std::size_t b = a + 1; b < sorted.size(); ++b) {
        if (!g.adjacent(sorted[a], sorted[b])) return std::nullopt;
      }
    }
    return blacken(g, sorted, m, d);
  }
  if (g.size() > clique_search_cap) {
    throw SizeLimitError("clique search limited to " + std::to_string(clique_search_cap) +
                         " vertices; supply a core");
  }
  std::vector<int> pick;
  while (next_clique(g, pick, k)) {
    if (auto p = blacken(g, pick, m, d)) return p;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

TopologyAlgorithm::TopologyAlgorithm(Algorithm core, TopologyGraph graph, Partition partition)
    : core_(std::move(core)), graph_(std::move(graph)), partition_(std::move(partition)) {
  const auto& p = core_.params();
  for (auto& layer : partition_.layers) std::sort(layer.begin(), layer.end());
  if (!is_valid_partition(graph_, partition_, p.n, 2 * p.f + 1)) {
    throw std::invalid_argument("partition is not valid for G(" + std::to_string(p.n) + ", " +
                                std::to_string(2 * p.f + 1) + ", d)");
  }
  const int size = graph_.size();
  rules_.assign(size, Rule::follow);
  core_slot_.assign(size, -1);
  earlier_.assign(size, {});
  const auto& v0 = partition_.layers[0];
  for (std::size_t i = 0; i < v0.size(); ++i) {
    rules_[v0[i]] = Rule::core;
    core_slot_[v0[i]] = static_cast<int>(i);
  }
  auto layer = partition_.layer_of(size);
  for (int v = 0; v < size; ++v) {
    if (layer[v] == 0) continue;
    for (int w : graph_.neighbours(v)) {
      if (layer[w] < layer[v]) earlier_[v].push_back(w);
    }
    if (layer[v] == 1 && earlier_[v].size() == v0.size()) rules_[v] = Rule::predict;
  }
}

int TopologyAlgorithm::bound() const {
  int d = partition_.depth();
  if (d == 0) return core_.params().t;
  // Followers in V_1 settle one round after the core; predictors do not.
  bool all_predict = std::all_of(partition_.layers[1].begin(), partition_.layers[1].end(),
                                 [&](int v) { return rules_[v] == Rule::predict; });
  return core_.params().t + d - (all_predict ? 1 : 0);
}

State TopologyAlgorithm::transition(int v, std::span<const State> observed) const {
  const auto& v0 = partition_.layers[0];
  const auto& space = core_.space();
  auto core_index = [&]() {
    std::uint64_t index = 0;
    for (std::size_t i = v0.size(); i-- > 0;) index = index * space.states() + observed[v0[i]];
    return index;
  };
  switch (rules_[v]) {
    case Rule::core:
      return core_.transition(core_slot_[v], core_index());
    case Rule::predict: {
      auto u = core_index();
      int n = static_cast<int>(v0.size());
      int ones = 0;
      for (int i = 0; i < n; ++i) ones += core_.transition(i, u) == 1;
      return 2 * ones > n ? 1 : 0;
    }
    case Rule::follow:
      break;
  }
  int zeros = 0;
  int ones = 0;
  for (int w : earlier_[v]) {
    zeros += observed[w] == 0;
    ones += observed[w] == 1;
  }
  int total = static_cast<int>(earlier_[v].size());
  if (2 * zeros > total) return 1;
  if (2 * ones > total) return 0;
  return observed[v];
}

Algorithm TopologyAlgorithm::to_algorithm() const {
  Params p = core_.params();
  p.n = nodes();
  p.t = bound();
  p.t0.reset();
  return Algorithm::from_function(p, AlgorithmClass::general,
                                  [&](int v, std::span<const State> u) { return transition(v, u); });
}

TopologyAlgorithm generalize_topology(const Algorithm& alg, const TopologyGraph& g,
                                      const Partition& partition) {
  return TopologyAlgorithm(alg, g, partition);
}

// ---------------------------------------------------------------------------

LayeredCounter compose_layers(std::vector<Algorithm> layers) {
  if (layers.empty()) throw std::invalid_argument("compose_layers needs at least one layer");
  const auto& first = layers.front().params();
  for (const auto& alg : layers) {
    if (alg.params().n != first.n || alg.params().f != first.f) {
      throw std::invalid_argument("all layers must share n and f");
    }
    auto report = check_stabilization(alg, alg.params().t);
    if (report.verdict != Verdict::stabilizes) {
      throw std::invalid_argument("layer does not stabilize within its t=" +
                                  std::to_string(alg.params().t));
    }
  }
  return LayeredCounter{std::move(layers)};
}

}  // namespace syncount
