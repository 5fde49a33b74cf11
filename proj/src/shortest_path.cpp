#include "manet/shortest_path.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace manet {

namespace {

void check_id(const AdjacencyLists& adj, NodeId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= adj.size()) {
    throw std::out_of_range("shortest_path_oracle: unknown node id " + std::to_string(id));
  }
}

} // namespace

std::vector<int> bfs_hops(const AdjacencyLists& adjacency, NodeId src,
                          const std::vector<NodeId>& blocked) {
  check_id(adjacency, src);
  std::vector<int> dist(adjacency.size(), -1);
  std::vector<char> stop(adjacency.size(), 0);
  for (NodeId b : blocked) {
    check_id(adjacency, b);
    stop[static_cast<std::size_t>(b)] = 1;
  }
  std::deque<NodeId> frontier{src};
  dist[static_cast<std::size_t>(src)] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : adjacency[static_cast<std::size_t>(u)]) {
      check_id(adjacency, v);
      auto& d = dist[static_cast<std::size_t>(v)];
      if (d < 0 && !stop[static_cast<std::size_t>(v)]) {
        d = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<std::vector<NodeId>> shortest_path_oracle(const AdjacencyLists& adjacency, NodeId src,
                                                        NodeId dst) {
  check_id(adjacency, src);
  check_id(adjacency, dst);
  // Distances measured from dst let a greedy walk from src pick, at every
  // step, the smallest neighbour that is one hop closer. That walk yields the
  // lexicographically smallest among all minimum-hop paths.
  const std::vector<int> to_dst = bfs_hops(adjacency, dst);
  if (to_dst[static_cast<std::size_t>(src)] < 0) {
    return std::nullopt;
  }
  std::vector<NodeId> path{src};
  NodeId cur = src;
  while (cur != dst) {
    const int want = to_dst[static_cast<std::size_t>(cur)] - 1;
    NodeId next = -1;
    for (NodeId v : adjacency[static_cast<std::size_t>(cur)]) {
      if (to_dst[static_cast<std::size_t>(v)] == want && (next < 0 || v < next)) {
        next = v;
      }
    }
    path.push_back(next);
    cur = next;
  }
  return path;
}

} // namespace manet
