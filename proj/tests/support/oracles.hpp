#pragma once

#include "agentsim/graph.hpp"
#include "agentsim/rng.hpp"
#include "agentsim/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace agentsim::testing {

using verifiers::Point2D;

inline double objective_at(double x, double y, const std::vector<Point2D>& pts)
{
    double s = 0.0;
    for (const auto& p : pts) {
        s += std::hypot(x - static_cast<double>(p.x), y - static_cast<double>(p.y));
    }
    return s;
}

/// Brute-force minimum of the sum of distances: every integer point of the
/// bounding box, then a 0.01 grid over the cells around the best one.
inline double grid_median_objective(const std::vector<Point2D>& pts)
{
    std::int64_t x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    double best = std::numeric_limits<double>::infinity();
    std::int64_t bx = x0, by = y0;
    for (std::int64_t x = x0; x <= x1; ++x) {
        for (std::int64_t y = y0; y <= y1; ++y) {
            const double f = objective_at(static_cast<double>(x), static_cast<double>(y), pts);
            if (f < best) {
                best = f;
                bx = x;
                by = y;
            }
        }
    }
    for (int i = -100; i <= 100; ++i) {
        for (int j = -100; j <= 100; ++j) {
            const double x = static_cast<double>(bx) + i * 0.01;
            const double y = static_cast<double>(by) + j * 0.01;
            best = std::min(best, objective_at(x, y, pts));
        }
    }
    return best;
}

inline std::vector<Point2D> random_points(Rng& rng, std::size_t n, std::int64_t hi)
{
    std::vector<Point2D> pts;
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({rng.between(0, hi), rng.between(0, hi)});
    }
    return pts;
}

/// Second BFS, written against the raw adjacency with a visited bitmap.
inline std::vector<NodeId> bfs_oracle(const Graph& g, NodeId start)
{
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> order;
    std::queue<NodeId> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        order.push_back(u);
        std::vector<NodeId> nb = g.adjacency()[u];
        std::sort(nb.begin(), nb.end());
        for (NodeId v : nb) {
            if (!seen[v]) {
                seen[v] = 1;
                q.push(v);
            }
        }
    }
    return order;
}

using u128 = unsigned __int128;

inline std::string u128_to_string(u128 v)
{
    if (v == 0) {
        return "0";
    }
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

/// Uniform digit count in [1, max_digits], leading digit non-zero.
inline u128 random_operand(Rng& rng, int max_digits)
{
    const int digits = static_cast<int>(rng.between(1, max_digits));
    u128 v = static_cast<u128>(rng.between(1, 9));
    for (int i = 1; i < digits; ++i) {
        v = v * 10 + static_cast<u128>(rng.below(10));
    }
    return v;
}

} // namespace agentsim::testing
