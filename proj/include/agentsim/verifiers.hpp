#pragma once

#include "agentsim/graph.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace agentsim {

using BigInt = boost::multiprecision::cpp_int;

/// Parses a non-negative decimal string; throws std::invalid_argument otherwise.
BigInt parse_bigint(const std::string& digits);
std::string to_string(const BigInt& value);

} // namespace agentsim

namespace agentsim::verifiers {

struct Point2D
{
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

struct RealPoint
{
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2D a, Point2D b) noexcept;
double distance(RealPoint a, Point2D b) noexcept;

/// Exact integer test dist(a, b) <= limit.
bool within_distance(Point2D a, Point2D b, std::int64_t limit) noexcept;
/// Exact integer test dist(a, b) < limit.
bool strictly_within_distance(Point2D a, Point2D b, std::int64_t limit) noexcept;

/// Sum of Euclidean distances from `at` to every point.
double sum_of_distances(RealPoint at, std::span<const Point2D> points) noexcept;

struct MedianResult
{
    RealPoint point;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Objective after each accepted iterate, starting with the centroid's.
    std::vector<double> objective_history;
};

inline constexpr double kMedianTolerance = 1e-9;
inline constexpr std::size_t kMedianMaxIterations = 10000;

/// Weiszfeld iteration from the centroid with the Vardi-Zhang correction when an
/// iterate lands on an input point. Stops when successive iterates move less
/// than `tol`, or when a coincident input point satisfies the optimality test.
/// Never returns a point worse than the centroid. Throws std::invalid_argument
/// for an empty set or non-positive tolerance.
MedianResult geometric_median(std::span<const Point2D> points, double tol = kMedianTolerance,
                              std::size_t max_iter = kMedianMaxIterations);

/// Nearest integer point (halves away from zero).
Point2D round_to_point(RealPoint p) noexcept;

/// Returns `proposed` if it is within `max_speed` of `old`; otherwise scales the
/// displacement to length max_speed and truncates each component toward zero.
Point2D clamp_move(Point2D old, Point2D proposed, std::int64_t max_speed);

struct MinResult
{
    std::int64_t value = 0;
    std::size_t index = 0;
};

/// Smallest value, first index on ties. Throws std::invalid_argument when empty.
MinResult reference_min(std::span<const std::int64_t> values);

/// multiplicand * digit * 10^position. Throws std::invalid_argument unless 0 <= digit <= 9.
BigInt reference_partial(const BigInt& multiplicand, int digit, unsigned position);

BigInt big_sum(std::span<const BigInt> partials);

/// BFS visiting neighbours in ascending id order. Throws std::invalid_argument
/// if `start` is not a node of the graph.
std::vector<NodeId> reference_bfs(const Graph& graph, NodeId start);

/// True iff candidate is non-decreasing and a multiset permutation of original.
bool check_sorted_permutation(std::span<const std::int64_t> original, std::span<const std::int64_t> candidate);

} // namespace agentsim::verifiers
