// Constructions on verified algorithms: one more node, sparse topologies
// grown from a clique core, and 2^b-counters from stacked 2-counters.

#ifndef SYNCOUNT_TRANSFORMS_H
#define SYNCOUNT_TRANSFORMS_H

#include <optional>
#include <string>
#include <vector>

#include "syncount/core_model.h"

namespace syncount {

/// B_i = A_i on the first n nodes for i < n; the new node n predicts the
/// strict majority of those successors (ties give 0). Requires 2f < n.
Algorithm extend_node(const Algorithm& alg);

/// Undirected simple graph with caller-chosen vertex ids; internally
/// vertices are numbered 0..size()-1 in order of appearance.
class TopologyGraph {
 public:
  TopologyGraph() = default;
  explicit TopologyGraph(int vertices);

  int size() const { return static_cast<int>(ids_.size()); }
  int add_vertex(int id);
  void add_edge(int a, int b);  // dense indices
  bool adjacent(int a, int b) const { return adj_[a][b]; }
  const std::vector<int>& neighbours(int v) const { return nbrs_[v]; }
  int id(int v) const { return ids_[v]; }
  int index_of(int id) const;  // throws FormatError for unknown ids
  std::size_t edge_count() const;

  static TopologyGraph complete(int n);
  static TopologyGraph star(int n);
  /// Cycle on n vertices plus chords to every vertex within `reach` steps.
  static TopologyGraph circulant(int n, int reach);

 private:
  std::vector<int> ids_;
  std::vector<std::vector<char>> adj_;
  std::vector<std::vector<int>> nbrs_;
};

/// V_0 (the clique core), V_1, ..., V_d as dense vertex indices.
struct Partition {
  std::vector<std::vector<int>> layers;

  int depth() const { return static_cast<int>(layers.size()) - 1; }
  /// Layer of every vertex, -1 if uncovered.
  std::vector<int> layer_of(int vertices) const;
};

/// `v <id>` and `e <a> <b>` lines; optional `p <layer> <id...>` lines give a
/// partition. Blank lines and `#` comments are ignored.
struct TopologyFile {
  TopologyGraph graph;
  std::optional<Partition> partition;
};
TopologyFile parse_topology(std::string_view text);
std::string topology_to_text(const TopologyGraph& g, const Partition* partition = nullptr);

/// Partition rules: V_0 is a k-clique, every vertex of V_a (a > 0) has at
/// least m neighbours in earlier layers, layers are disjoint and cover G.
bool is_valid_partition(const TopologyGraph& g, const Partition& p, int k, int m);

/// The blackening game from a k-clique core: a white vertex with at least m
/// black neighbours turns black; V_a is the set turned in round a. Returns
/// the partition if everything is black after at most d rounds. Without a
/// given core, k-cliques are tried in lexicographic order; graphs larger than
/// clique_search_cap vertices raise SizeLimitError.
std::optional<Partition> check_topology(const TopologyGraph& g, int k, int m, int d,
                                        const std::optional<std::vector<int>>& core = {},
                                        int clique_search_cap = 64);

/// An algorithm for a graph in G(n, 2f+1, d). Core vertices (V_0 in
/// ascending order) run A. A vertex of V_1 adjacent to the whole core
/// predicts the core's next output as extend_node does; every other vertex
/// of V_a looks at its neighbours in earlier layers and, if a strict
/// majority of them outputs y in {0,1}, moves to 1 - y, else keeps its
/// state.
class TopologyAlgorithm {
 public:
  enum class Rule { core, predict, follow };

  TopologyAlgorithm(Algorithm core, TopologyGraph graph, Partition partition);

  int nodes() const { return graph_.size(); }
  int states() const { return core_.params().s; }
  int faults() const { return core_.params().f; }
  /// t + d - 1 when every vertex of V_1 sees the whole core, else t + d.
  int bound() const;
  Rule rule(int v) const { return rules_[v]; }
  const Algorithm& core() const { return core_; }
  const TopologyGraph& graph() const { return graph_; }
  const Partition& partition() const { return partition_; }

  /// Next state of vertex v given the states it observes for all vertices;
  /// entries of non-neighbours are ignored.
  State transition(int v, std::span<const State> observed) const;

  /// The same system as a general algorithm on a complete graph, so that
  /// the verifier can check it exactly. params.t is bound().
  Algorithm to_algorithm() const;

 private:
  Algorithm core_;
  TopologyGraph graph_;
  Partition partition_;
  std::vector<Rule> rules_;
  std::vector<int> core_slot_;  // vertex -> node index of A, or -1
  std::vector<std::vector<int>> earlier_;  // neighbours in earlier layers
};

TopologyAlgorithm generalize_topology(const Algorithm& alg, const TopologyGraph& g,
                                      const Partition& partition);

/// b layers of 2-counters on the same nodes. Layer 0 steps every round;
/// layer i+1 steps at a node exactly when that node's layer-i state went
/// from 1 to 0 in this round. Output bit i is the layer-i state.
struct LayeredCounter {
  std::vector<Algorithm> layers;

  int nodes() const { return layers.front().params().n; }
  int faults() const { return layers.front().params().f; }
  int bits() const { return static_cast<int>(layers.size()); }
  std::uint64_t modulus() const { return std::uint64_t{1} << bits(); }
};

/// Every layer is re-verified at its own t; all layers must share n and f.
LayeredCounter compose_layers(std::vector<Algorithm> layers);

}  // namespace syncount

#endif  // SYNCOUNT_TRANSFORMS_H
