#include "agentsim/verifiers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace agentsim {

BigInt parse_bigint(const std::string& digits)
{
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("not a non-negative decimal integer: '" + digits + "'");
    }
    // cpp_int reads a leading 0 as an octal prefix.
    const auto first = digits.find_first_not_of('0');
    return first == std::string::npos ? BigInt(0) : BigInt(digits.substr(first));
}

std::string to_string(const BigInt& value)
{
    return value.str();
}

} // namespace agentsim

namespace agentsim::verifiers {

bool within_distance(Point2D a, Point2D b, std::int64_t limit) noexcept
{
    const std::int64_t dx = a.x - b.x;
    const std::int64_t dy = a.y - b.y;
    return dx * dx + dy * dy <= limit * limit;
}

bool strictly_within_distance(Point2D a, Point2D b, std::int64_t limit) noexcept
{
    const std::int64_t dx = a.x - b.x;
    const std::int64_t dy = a.y - b.y;
    return dx * dx + dy * dy < limit * limit;
}

Point2D clamp_move(Point2D old, Point2D proposed, std::int64_t max_speed)
{
    if (max_speed <= 0) {
        throw std::invalid_argument("max_speed must be positive");
    }
    if (within_distance(old, proposed, max_speed)) {
        return proposed;
    }
    const double dx = static_cast<double>(proposed.x - old.x);
    const double dy = static_cast<double>(proposed.y - old.y);
    const double scale = static_cast<double>(max_speed) / std::hypot(dx, dy);
    auto sx = static_cast<std::int64_t>(std::trunc(dx * scale));
    auto sy = static_cast<std::int64_t>(std::trunc(dy * scale));
    // Rounding in dx * scale can land an exact integer one ulp high; pull back.
    while (sx * sx + sy * sy > max_speed * max_speed) {
        if (std::llabs(sx) >= std::llabs(sy)) {
            sx += sx > 0 ? -1 : 1;
        } else {
            sy += sy > 0 ? -1 : 1;
        }
    }
    return Point2D{old.x + sx, old.y + sy};
}

MinResult reference_min(std::span<const std::int64_t> values)
{
    if (values.empty()) {
        throw std::invalid_argument("reference_min requires a non-empty array");
    }
    MinResult best{values[0], 0};
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < best.value) {
            best = {values[i], i};
        }
    }
    return best;
}

BigInt reference_partial(const BigInt& multiplicand, int digit, unsigned position)
{
    if (digit < 0 || digit > 9) {
        throw std::invalid_argument("digit must be in 0..9");
    }
    BigInt shift = boost::multiprecision::pow(BigInt(10), position);
    return multiplicand * digit * shift;
}

BigInt big_sum(std::span<const BigInt> partials)
{
    BigInt total = 0;
    for (const auto& p : partials) {
        total += p;
    }
    return total;
}

std::vector<NodeId> reference_bfs(const Graph& graph, NodeId start)
{
    if (!graph.contains(start)) {
        throw std::invalid_argument("BFS start node is not in the graph");
    }
    std::vector<char> seen(graph.node_count(), 0);
    std::vector<NodeId> order;
    std::deque<NodeId> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        order.push_back(u);
        for (NodeId v : graph.neighbors(u)) {
            if (!seen[v]) {
                seen[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return order;
}

bool check_sorted_permutation(std::span<const std::int64_t> original, std::span<const std::int64_t> candidate)
{
    if (original.size() != candidate.size()) {
        return false;
    }
    if (!std::is_sorted(candidate.begin(), candidate.end())) {
        return false;
    }
    std::vector<std::int64_t> sorted(original.begin(), original.end());
    std::sort(sorted.begin(), sorted.end());
    return std::equal(sorted.begin(), sorted.end(), candidate.begin());
}

} // namespace agentsim::verifiers
