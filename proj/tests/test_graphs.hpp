#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "elfs/graph.hpp"

namespace elfs::testing {

// Connected random weighted graph: random spanning tree plus extra edges,
// weights uniform in [0.2, 2], one or more sinks, source outside the sinks.
inline Graph random_connected_graph(int n, std::uint64_t seed, int num_sinks = 1,
                                    double extra_edge_prob = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> used;
  for (int x = 1; x < n; ++x) {
    const int y = std::uniform_int_distribution<int>(0, x - 1)(rng);
    edges.push_back({y, x, weight(rng)});
    used.insert({y, x});
  }
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (!used.count({x, y}) && coin(rng) < extra_edge_prob) edges.push_back({x, y, weight(rng)});
    }
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> sinks(perm.begin(), perm.begin() + num_sinks);
  return Graph::from_edges(n, edges, perm[num_sinks], sinks);
}

inline std::vector<Graph> named_fixtures() {
  return {fixtures::single_edge(), fixtures::path3(), fixtures::lower_bound(0.1),
          fixtures::path4_middle(), fixtures::cycle6()};
}

}  // namespace elfs::testing
