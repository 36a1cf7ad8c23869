#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace specmix {

/// Simple undirected graph on vertices 0..n-1.  No self-loops, no duplicate
/// edges.  Immutable after construction.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int max_degree() const { return max_degree_; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }

  /// Bitmask of neighbors of v (valid for n <= 32).
  std::uint32_t neighbor_mask(int v) const { return neighbor_masks_[v]; }

  bool adjacent(int u, int v) const { return (neighbor_masks_[u] >> v) & 1u; }

  /// Parses {"n": int, "edges": [[u,v],...]}.
  static Graph from_json(const std::string& text);
  std::string to_json() const;

  static Graph path(int n);
  static Graph cycle(int n);
  static Graph clique(int n);
  static Graph edgeless(int n);
  static Graph star(int leaves);
  static Graph complete_bipartite(int a, int b);
  static Graph hypercube(int dim);
  static Graph petersen();
  static Graph erdos_renyi(int n, double p, std::uint64_t seed);

  /// Accepts builtin names like "path4", "cycle5", "clique3"/"K3",
  /// "empty4", "triangle", "star3", "k33", "cube", "petersen".
  static Graph named(const std::string& name);

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::uint32_t> neighbor_masks_;
  int max_degree_ = 0;
};

}  // namespace specmix
