#pragma once

#include <optional>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Undirected graph given as adjacency lists indexed by node id.
using AdjacencyLists = std::vector<std::vector<NodeId>>;

/// Minimum-hop path from src to dst, ties broken by the lexicographically
/// smallest node sequence. std::nullopt when dst is unreachable. Throws
/// std::out_of_range for ids outside the graph.
std::optional<std::vector<NodeId>> shortest_path_oracle(const AdjacencyLists& adjacency, NodeId src,
                                                        NodeId dst);

/// Hop distances from src; -1 marks unreachable nodes. Nodes in `blocked`
/// are neither entered nor expanded.
std::vector<int> bfs_hops(const AdjacencyLists& adjacency, NodeId src,
                          const std::vector<NodeId>& blocked = {});

} // namespace manet
