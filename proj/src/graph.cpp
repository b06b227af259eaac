#include "elfs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "elfs/errors.hpp"
#include "elfs/rng.hpp"

namespace elfs {
namespace {

std::string edge_name(int u, int v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Graph Graph::from_edges(int n, std::vector<Edge> edges, int source, std::vector<int> sinks,
                        Check check) {
  if (n < 2) throw ValidationError("graph needs at least 2 vertices, got " + std::to_string(n));
  if (source < 0 || source >= n) {
    throw ValidationError("source " + std::to_string(source) + " out of range");
  }
  if (sinks.empty()) throw ValidationError("sink set M is empty");

  Graph g;
  g.n_ = n;
  g.source_ = source;
  g.sink_mask_.assign(n, 0);
  for (int m : sinks) {
    if (m < 0 || m >= n) throw ValidationError("sink vertex " + std::to_string(m) + " out of range");
    if (g.sink_mask_[m]) throw ValidationError("sink vertex " + std::to_string(m) + " listed twice");
    g.sink_mask_[m] = 1;
  }
  if (g.sink_mask_[source]) {
    throw ValidationError("source " + std::to_string(source) + " lies in the sink set");
  }
  std::sort(sinks.begin(), sinks.end());
  g.sinks_ = std::move(sinks);

  for (Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw ValidationError("edge " + edge_name(e.u, e.v) + " has a vertex index >= n = " +
                            std::to_string(n));
    }
    if (e.u == e.v) throw ValidationError("self-loop at vertex " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw ValidationError("edge " + edge_name(e.u, e.v) + " has nonpositive weight");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v) {
      throw ValidationError("duplicate edge " + edge_name(edges[k].u, edges[k].v));
    }
  }
  g.edges_ = std::move(edges);

  g.adj_.assign(n, {});
  g.degree_.assign(n, 0.0);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges_[k];
    g.adj_[e.u].push_back({e.v, e.w, 2 * k});
    g.adj_[e.v].push_back({e.u, e.w, 2 * k + 1});
    g.degree_[e.u] += e.w;
    g.degree_[e.v] += e.w;
  }
  g.total_weight_ = std::accumulate(g.degree_.begin(), g.degree_.end(), 0.0);

  if (check == Check::full) {
    const auto stranded = g.stranded_vertices();
    if (!stranded.empty()) {
      std::string list;
      for (std::size_t i = 0; i < stranded.size() && i < 10; ++i) {
        list += (i ? ", " : "") + std::to_string(stranded[i]);
      }
      throw ValidationError("vertices without a path to the sink set: {" + list +
                            (stranded.size() > 10 ? ", ..." : "") + "}");
    }
  }
  return g;
}

Arc Graph::arc(int index) const {
  const Edge& e = edges_[index / 2];
  return index % 2 == 0 ? Arc{e.u, e.v, e.w} : Arc{e.v, e.u, e.w};
}

double Graph::weight(int x, int y) const {
  for (const Neighbor& nb : adj_[x]) {
    if (nb.vertex == y) return nb.w;
  }
  return 0.0;
}

bool Graph::is_regular() const {
  for (int x = 1; x < n_; ++x) {
    if (std::abs(degree_[x] - degree_[0]) > 1e-12 * std::max(1.0, degree_[0])) return false;
  }
  return true;
}

Graph Graph::with_source(int s) const {
  if (s < 0 || s >= n_) throw ValidationError("source " + std::to_string(s) + " out of range");
  if (is_sink(s)) throw ValidationError("source " + std::to_string(s) + " lies in the sink set");
  Graph g = *this;
  g.source_ = s;
  return g;
}

std::vector<int> Graph::stranded_vertices() const {
  std::vector<char> seen(n_, 0);
  std::queue<int> q;
  for (int m : sinks_) {
    seen[m] = 1;
    q.push(m);
  }
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (const Neighbor& nb : adj_[x]) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        q.push(nb.vertex);
      }
    }
  }
  std::vector<int> out;
  for (int x = 0; x < n_; ++x) {
    if (!seen[x]) out.push_back(x);
  }
  return out;
}

Graph load_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  int n = 0, s = 0;
  std::vector<int> sinks;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string sink_list;
      if (!(ls >> n >> s >> sink_list)) {
        throw ValidationError("line " + std::to_string(line_no) + ": expected header 'n s M-list'");
      }
      std::replace(sink_list.begin(), sink_list.end(), ',', ' ');
      std::istringstream ss(sink_list);
      int m;
      while (ss >> m) sinks.push_back(m);
      int extra;
      while (ls >> extra) sinks.push_back(extra);
      have_header = true;
      continue;
    }
    Edge e;
    if (!(ls >> e.u >> e.v >> e.w)) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'u v w'");
    }
    edges.push_back(e);
  }
  if (!have_header) throw ValidationError("empty graph document");
  return Graph::from_edges(n, std::move(edges), s, std::move(sinks));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open graph file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return load_graph(buf.str());
}

std::string serialize_graph(const Graph& g) {
  std::string out = std::to_string(g.num_vertices()) + " " + std::to_string(g.source()) + " ";
  for (std::size_t i = 0; i < g.sinks().size(); ++i) {
    out += (i ? "," : "") + std::to_string(g.sinks()[i]);
  }
  out += "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + format_double(e.w) + "\n";
  }
  return out;
}

ModifiedGraph attach_source_stub(const Graph& g, double eta) {
  if (!(eta >= 1.0)) {
    throw ValidationError("stub parameter eta must be >= 1, got " + format_double(eta));
  }
  const int s = g.source();
  const int sigma = g.num_vertices();
  std::vector<Edge> edges = g.edges();
  edges.push_back({s, sigma, eta * g.degree(s)});
  ModifiedGraph mg{Graph::from_edges(sigma + 1, edges, sigma, g.sinks()), eta, sigma, s, {}, 0};

  // Original edges keep their relative order; the stub edge (s, sigma) slots in
  // after every edge whose smaller endpoint is <= s.
  int stub_edge = 0;
  for (int k = 0; k < mg.graph.num_edges(); ++k) {
    const Edge& e = mg.graph.edges()[k];
    if (e.u == s && e.v == sigma) stub_edge = k;
  }
  mg.arc_embedding.resize(g.num_arcs());
  for (int k = 0; k < g.num_edges(); ++k) {
    const int kk = k < stub_edge ? k : k + 1;
    mg.arc_embedding[2 * k] = 2 * kk;
    mg.arc_embedding[2 * k + 1] = 2 * kk + 1;
  }
  mg.stub_arc = 2 * stub_edge + 1;  // (sigma, s): edge stored as (s, sigma)
  return mg;
}

Graph detach_source_stub(const ModifiedGraph& mg) {
  std::vector<Edge> edges;
  for (const Edge& e : mg.graph.edges()) {
    if (e.v != mg.sigma) edges.push_back(e);
  }
  return Graph::from_edges(mg.sigma, std::move(edges), mg.original_source, mg.graph.sinks());
}

Graph random_regular_graph(int n, int d, int m, std::uint64_t seed, int max_attempts) {
  if (n <= 0 || d < 3 || d >= n || (n * d) % 2 != 0) {
    throw ValidationError("random_regular_graph needs n*d even and 3 <= d < n");
  }
  if (m < 1 || m >= n) throw ValidationError("sink size m must satisfy 1 <= m < n");
  Rng rng = make_rng(seed);
  std::vector<int> points(static_cast<std::size_t>(n) * d);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    for (int i = 0; i < n * d; ++i) points[i] = i / d;
    std::shuffle(points.begin(), points.end(), rng);
    std::vector<Edge> edges;
    std::map<std::pair<int, int>, int> seen;
    bool simple = true;
    for (int i = 0; i < n * d && simple; i += 2) {
      int a = points[i], b = points[i + 1];
      if (a == b) simple = false;
      if (a > b) std::swap(a, b);
      if (simple && seen[{a, b}]++ > 0) simple = false;
      edges.push_back({a, b, 1.0});
    }
    if (!simple) continue;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> sinks(perm.begin(), perm.begin() + m);
    std::uniform_int_distribution<int> pick(m, n - 1);
    const int source = perm[pick(rng)];

    Graph g = Graph::from_edges(n, edges, source, sinks, Graph::Check::structural_only);
    // Connected: every vertex reaches M and M's vertices reach each other.
    std::vector<char> seen_v(n, 0);
    std::vector<int> stack{0};
    seen_v[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : g.neighbors(x)) {
        if (!seen_v[nb.vertex]) {
          seen_v[nb.vertex] = 1;
          ++count;
          stack.push_back(nb.vertex);
        }
      }
    }
    if (count == n) return g;
  }
  throw BudgetError("pairing model failed to give a simple connected graph after " +
                    std::to_string(max_attempts) + " attempts");
}

namespace fixtures {

Graph single_edge() { return load_graph("2 0 1\n0 1 1.0\n"); }
Graph path3() { return load_graph("3 0 2\n0 1 1\n1 2 1\n"); }

Graph lower_bound(double delta) {
  if (!(delta > -0.5 && delta < 0.5)) throw ValidationError("need |delta| < 1/2");
  return Graph::from_edges(3, {{0, 1, 0.5 + delta}, {1, 2, 0.5 - delta}}, 0, {2});
}

Graph path4_middle() { return Graph::from_edges(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}, 1, {0, 3}); }

Graph cycle6() {
  std::vector<Edge> e;
  for (int i = 0; i < 6; ++i) e.push_back({i, (i + 1) % 6, 1.0});
  return Graph::from_edges(6, e, 0, {2, 4});
}

Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, e, 0, {n - 1});
}

}  // namespace fixtures
}  // namespace elfs
