#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agentsim {

using NodeId = std::uint32_t;

/// Simple undirected graph on nodes 0..n-1. Adjacency lists are kept ascending;
/// self loops and multi-edges are rejected.
class Graph
{
public:
    Graph() = default;
    explicit Graph(std::size_t node_count) : adjacency_(node_count) {}

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept;
    bool contains(NodeId node) const noexcept { return node < adjacency_.size(); }

    void add_edge(NodeId a, NodeId b);
    bool has_edge(NodeId a, NodeId b) const;

    const std::vector<NodeId>& neighbors(NodeId node) const { return adjacency_.at(node); }
    const std::vector<std::vector<NodeId>>& adjacency() const noexcept { return adjacency_; }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::vector<NodeId>> adjacency_;
};

/// G(n, p): visits pairs (i, j), i < j, in lexicographic order and keeps the edge
/// when a fresh uniform draw is below p.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// One line per node, ascending:
///   "Node i is connected to nodes a, b, c." or "Node i is not connected to any node."
/// Lines are joined with '\n' and there is no trailing newline.
std::string encode_incident(const Graph& graph);

} // namespace agentsim
