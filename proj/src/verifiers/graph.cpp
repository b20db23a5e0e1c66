#include "agentsim/graph.hpp"
#include "agentsim/rng.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace agentsim {

std::size_t Graph::edge_count() const noexcept
{
    std::size_t total = 0;
    for (const auto& list : adjacency_) {
        total += list.size();
    }
    return total / 2;
}

void Graph::add_edge(NodeId a, NodeId b)
{
    if (!contains(a) || !contains(b)) {
        throw std::invalid_argument("edge endpoint out of range");
    }
    if (a == b) {
        throw std::invalid_argument("self loops are not supported");
    }
    if (has_edge(a, b)) {
        throw std::invalid_argument("multi-edges are not supported");
    }
    auto insert_sorted = [](std::vector<NodeId>& list, NodeId v) {
        list.insert(std::lower_bound(list.begin(), list.end(), v), v);
    };
    insert_sorted(adjacency_[a], b);
    insert_sorted(adjacency_[b], a);
}

bool Graph::has_edge(NodeId a, NodeId b) const
{
    const auto& list = adjacency_.at(a);
    return std::binary_search(list.begin(), list.end(), b);
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("edge probability must be in [0, 1]");
    }
    Graph g(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.uniform01() < p) {
                g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    }
    return g;
}

std::string encode_incident(const Graph& graph)
{
    std::ostringstream out;
    for (NodeId i = 0; i < graph.node_count(); ++i) {
        if (i != 0) {
            out << '\n';
        }
        const auto& nbrs = graph.neighbors(i);
        if (nbrs.empty()) {
            out << "Node " << i << " is not connected to any node.";
            continue;
        }
        out << "Node " << i << " is connected to nodes ";
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            out << (k == 0 ? "" : ", ") << nbrs[k];
        }
        out << '.';
    }
    return out.str();
}

} // namespace agentsim
