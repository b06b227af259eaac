#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace elfs {

/// Undirected edge stored canonically with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

/// Ordered arc (x, y). Arc 2k is (edge k).u -> (edge k).v, arc 2k+1 the reverse.
struct Arc {
  int from = 0;
  int to = 0;
  double w = 0.0;
};

struct Neighbor {
  int vertex = 0;
  double w = 0.0;
  int arc = 0;  // index of the arc (x, vertex)
};

/// Weighted undirected graph with a source vertex and a sink set.
///
/// Immutable after construction. Edges are kept sorted by (min endpoint,
/// max endpoint); that order fixes the arc basis used by the edge space.
class Graph {
 public:
  enum class Check { full, structural_only };

  static Graph from_edges(int n, std::vector<Edge> edges, int source, std::vector<int> sinks,
                          Check check = Check::full);

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_arcs() const { return 2 * num_edges(); }
  const std::vector<Edge>& edges() const { return edges_; }
  Arc arc(int index) const;
  const std::vector<Neighbor>& neighbors(int x) const { return adj_[x]; }

  double degree(int x) const { return degree_[x]; }
  const std::vector<double>& degrees() const { return degree_; }
  /// W = sum_x d_x (twice the total edge weight).
  double total_weight() const { return total_weight_; }
  double weight(int x, int y) const;

  int source() const { return source_; }
  const std::vector<int>& sinks() const { return sinks_; }
  bool is_sink(int x) const { return sink_mask_[x] != 0; }
  bool is_regular() const;

  /// Same graph and sink, different source (s must not be a sink).
  Graph with_source(int s) const;

  /// Vertices that cannot reach the sink set, empty when the graph is valid.
  std::vector<int> stranded_vertices() const;

 private:
  Graph() = default;

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
  int source_ = 0;
  std::vector<int> sinks_;
  std::vector<char> sink_mask_;
};

/// Graph with an extra vertex sigma = n attached to the source s by an edge of
/// weight eta * d_s; sigma becomes the new source.
struct ModifiedGraph {
  Graph graph;
  double eta = 1.0;
  int sigma = 0;
  int original_source = 0;
  /// arc_embedding[a] = index in graph of arc a of the original graph.
  std::vector<int> arc_embedding;
  /// Index in graph of the arc (sigma, s).
  int stub_arc = 0;
};

Graph load_graph(const std::string& text);
Graph load_graph_file(const std::string& path);
/// Canonical edge-list text; load_graph(serialize_graph(g)) reproduces g.
std::string serialize_graph(const Graph& g);

ModifiedGraph attach_source_stub(const Graph& g, double eta);
/// Removes sigma again; the result has the original source and weights.
Graph detach_source_stub(const ModifiedGraph& mg);

/// Connected simple d-regular unit-weight graph from the pairing model.
Graph random_regular_graph(int n, int d, int m, std::uint64_t seed, int max_attempts = 2000);

namespace fixtures {
Graph single_edge();                       // FIX-A
Graph path3();                             // FIX-B
Graph lower_bound(double delta);           // FIX-C
Graph path4_middle();                      // FIX-D: 0-1-2-3, s = 1, M = {0, 3}
Graph cycle6();                            // FIX-E: C_6, s = 0, M = {2, 4}
Graph path(int n);                         // s = 0, M = {n - 1}
}  // namespace fixtures

}  // namespace elfs
