#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmean {

// Simple undirected connected graph on vertices 0..m-1, no self-loops.
class Graph {
 public:
  static Graph complete(int m);
  static Graph path(int m);
  static Graph cycle(int m);

  // Erdos-Renyi G(m, edge_prob) conditioned on connectivity: candidate edge
  // sets are drawn from a generator seeded with `seed` until one connects.
  static Graph random_connected(int m, double edge_prob, std::uint64_t seed);

  static Graph from_edges(int m, std::span<const std::pair<int, int>> edges);

  // Text format: header "m <vertex-count>", then one "i j" pair per line
  // (0-indexed endpoints). Blank lines and lines starting with '#' are
  // ignored. Each edge may be listed in either or both directions.
  static Graph parse_edge_list(std::istream& in);
  static Graph load_edge_list(const std::string& path);

  int size() const { return m_; }
  bool adjacent(int i, int j) const;
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }

  // Hop distances from `source` to every vertex.
  std::vector<int> bfs_distances(int source) const;
  int diameter() const;

 private:
  Graph(int m, std::vector<std::uint8_t> adjacency);

  int m_;
  std::vector<std::uint8_t> adjacency_;      // m*m, symmetric, zero diagonal
  std::vector<std::vector<int>> neighbors_;  // exclusive (no self)
};

}  // namespace rmean
