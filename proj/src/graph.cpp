#include "rmean/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "rmean/rng.hpp"

namespace rmean {

namespace {

bool connected(int m, const std::vector<std::uint8_t>& adjacency) {
  if (m == 0) return false;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < m; ++v) {
      if (adjacency[static_cast<std::size_t>(u) * m + v] && !seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == m;
}

}  // namespace

Graph::Graph(int m, std::vector<std::uint8_t> adjacency)
    : m_(m), adjacency_(std::move(adjacency)) {
  if (m_ < 1) throw std::invalid_argument("Graph: need at least one vertex");
  for (int i = 0; i < m_; ++i) {
    if (adjacency_[static_cast<std::size_t>(i) * m_ + i]) {
      throw std::invalid_argument("Graph: self-loops are not allowed");
    }
    for (int j = 0; j < m_; ++j) {
      if (adjacency_[static_cast<std::size_t>(i) * m_ + j] !=
          adjacency_[static_cast<std::size_t>(j) * m_ + i]) {
        throw std::invalid_argument("Graph: adjacency must be symmetric");
      }
    }
  }
  if (!connected(m_, adjacency_)) {
    throw std::invalid_argument("Graph: must be connected");
  }
  neighbors_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      if (adjacency_[static_cast<std::size_t>(i) * m_ + j]) {
        neighbors_[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
}

bool Graph::adjacent(int i, int j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= m_) {
    throw std::out_of_range("Graph::adjacent: vertex out of range");
  }
  return adjacency_[static_cast<std::size_t>(i) * m_ + j] != 0;
}

Graph Graph::complete(int m) {
  if (m < 1) throw std::invalid_argument("Graph::complete: m must be >= 1");
  std::vector<std::uint8_t> adjacency(static_cast<std::size_t>(m) * m, 1);
  for (int i = 0; i < m; ++i) adjacency[static_cast<std::size_t>(i) * m + i] = 0;
  return Graph(m, std::move(adjacency));
}

Graph Graph::path(int m) {
  if (m < 1) throw std::invalid_argument("Graph::path: m must be >= 1");
  std::vector<std::uint8_t> adjacency(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i + 1 < m; ++i) {
    adjacency[static_cast<std::size_t>(i) * m + i + 1] = 1;
    adjacency[static_cast<std::size_t>(i + 1) * m + i] = 1;
  }
  return Graph(m, std::move(adjacency));
}

Graph Graph::cycle(int m) {
  if (m < 3) throw std::invalid_argument("Graph::cycle: m must be >= 3");
  std::vector<std::uint8_t> adjacency(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    adjacency[static_cast<std::size_t>(i) * m + j] = 1;
    adjacency[static_cast<std::size_t>(j) * m + i] = 1;
  }
  return Graph(m, std::move(adjacency));
}

Graph Graph::random_connected(int m, double edge_prob, std::uint64_t seed) {
  if (m < 1) {
    throw std::invalid_argument("Graph::random_connected: m must be >= 1");
  }
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument(
        "Graph::random_connected: edge_prob must lie in [0, 1]");
  }
  Xoshiro256PlusPlus rng(seed);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::uint8_t> adjacency(static_cast<std::size_t>(m) * m, 0);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (rng.uniform01() < edge_prob) {
          adjacency[static_cast<std::size_t>(i) * m + j] = 1;
          adjacency[static_cast<std::size_t>(j) * m + i] = 1;
        }
      }
    }
    if (connected(m, adjacency)) return Graph(m, std::move(adjacency));
  }
  throw std::runtime_error(
      "Graph::random_connected: no connected draw found; edge_prob too small");
}

Graph Graph::from_edges(int m, std::span<const std::pair<int, int>> edges) {
  if (m < 1) throw std::invalid_argument("Graph::from_edges: m must be >= 1");
  std::vector<std::uint8_t> adjacency(static_cast<std::size_t>(m) * m, 0);
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= m || j < 0 || j >= m) {
      throw std::invalid_argument("Graph::from_edges: endpoint out of range");
    }
    if (i == j) {
      throw std::invalid_argument("Graph::from_edges: self-loop");
    }
    adjacency[static_cast<std::size_t>(i) * m + j] = 1;
    adjacency[static_cast<std::size_t>(j) * m + i] = 1;
  }
  return Graph(m, std::move(adjacency));
}

Graph Graph::parse_edge_list(std::istream& in) {
  std::string line;
  int m = -1;
  std::vector<std::pair<int, int>> edges;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (m < 0) {
      std::string tag;
      fields >> tag >> m;
      if (fields.fail() || tag != "m" || m < 1) {
        throw std::invalid_argument(
            "edge list: expected header 'm <vertex-count>' at line " +
            std::to_string(line_number));
      }
      continue;
    }
    int i = 0, j = 0;
    fields >> i >> j;
    std::string extra;
    if (fields.fail() || (fields >> extra)) {
      throw std::invalid_argument("edge list: expected 'i j' at line " +
                                  std::to_string(line_number));
    }
    edges.emplace_back(i, j);
  }
  if (m < 0) throw std::invalid_argument("edge list: missing header");
  return from_edges(m, edges);
}

Graph Graph::load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("edge list: cannot open '" + path + "'");
  }
  return parse_edge_list(in);
}

std::vector<int> Graph::bfs_distances(int source) const {
  if (source < 0 || source >= m_) {
    throw std::out_of_range("Graph::bfs_distances: source out of range");
  }
  std::vector<int> dist(static_cast<std::size_t>(m_), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : neighbors_[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

int Graph::diameter() const {
  int diameter = 0;
  for (int i = 0; i < m_; ++i) {
    const auto dist = bfs_distances(i);
    diameter = std::max(diameter, *std::max_element(dist.begin(), dist.end()));
  }
  return diameter;
}

}  // namespace rmean
