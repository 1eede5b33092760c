#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavspin {

using Edge = std::pair<int, int>;

/// Undirected, unweighted cavity coupling graph. Edges are stored canonically
/// as (min, max) pairs in sorted order.
class CavityGraph {
 public:
  CavityGraph() = default;

  int n_cavities() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const CavityGraph&, const CavityGraph&) = default;

  /// Validates and canonicalizes. Throws std::invalid_argument on self-loops,
  /// duplicates or out-of-range indices.
  static CavityGraph from_edge_list(int n_cavities, std::vector<Edge> edges) {
    if (n_cavities < 1) throw std::invalid_argument("graph: n_cavities must be >= 1");
    for (auto& [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n_cavities || b >= n_cavities)
        throw std::invalid_argument("graph: edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
      if (a == b) throw std::invalid_argument("graph: self-loop at node " + std::to_string(a));
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end())
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(it->first) + "," + std::to_string(it->second) + ")");
    CavityGraph g;
    g.n_ = n_cavities;
    g.edges_ = std::move(edges);
    return g;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

/// Open chain 0-1-...-(N-1), or a ring when `periodic`.
inline CavityGraph chain(int n, bool periodic) {
  if (n < 2) throw std::invalid_argument("chain: N must be >= 2");
  if (periodic && n < 3) throw std::invalid_argument("chain: periodic chain needs N >= 3");
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  if (periodic) e.emplace_back(n - 1, 0);
  return CavityGraph::from_edge_list(n, std::move(e));
}

/// Graph with a single cavity and no edges.
inline CavityGraph single_cavity() { return CavityGraph::from_edge_list(1, {}); }

}  // namespace cavspin
