#include "agentsim/verifiers.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace agentsim::verifiers {

double distance(Point2D a, Point2D b) noexcept
{
    return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

double distance(RealPoint a, Point2D b) noexcept
{
    return std::hypot(a.x - static_cast<double>(b.x), a.y - static_cast<double>(b.y));
}

double sum_of_distances(RealPoint at, std::span<const Point2D> points) noexcept
{
    double total = 0.0;
    for (const auto& p : points) {
        total += distance(at, p);
    }
    return total;
}

Point2D round_to_point(RealPoint p) noexcept
{
    return Point2D{static_cast<std::int64_t>(std::llround(p.x)), static_cast<std::int64_t>(std::llround(p.y))};
}

namespace {

struct WeightedPoint
{
    double x;
    double y;
    double weight;
};

double weighted_objective(RealPoint at, const std::vector<WeightedPoint>& pts)
{
    double total = 0.0;
    for (const auto& p : pts) {
        total += p.weight * std::hypot(at.x - p.x, at.y - p.y);
    }
    return total;
}

} // namespace

MedianResult geometric_median(std::span<const Point2D> points, double tol, std::size_t max_iter)
{
    if (points.empty()) {
        throw std::invalid_argument("geometric_median requires at least one point");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("geometric_median tolerance must be positive");
    }

    // Collapse duplicates into weights so the singular case has a single owner.
    std::map<std::pair<std::int64_t, std::int64_t>, double> counts;
    for (const auto& p : points) {
        counts[{p.x, p.y}] += 1.0;
    }
    std::vector<WeightedPoint> pts;
    pts.reserve(counts.size());
    for (const auto& [xy, w] : counts) {
        pts.push_back({static_cast<double>(xy.first), static_cast<double>(xy.second), w});
    }

    RealPoint y{0.0, 0.0};
    for (const auto& p : points) {
        y.x += static_cast<double>(p.x);
        y.y += static_cast<double>(p.y);
    }
    y.x /= static_cast<double>(points.size());
    y.y /= static_cast<double>(points.size());

    MedianResult result;
    double f = weighted_objective(y, pts);
    result.objective_history.push_back(f);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double num_x = 0.0;
        double num_y = 0.0;
        double denom = 0.0;
        double rx = 0.0;
        double ry = 0.0;
        const WeightedPoint* coincident = nullptr;
        for (const auto& p : pts) {
            const double d = std::hypot(p.x - y.x, p.y - y.y);
            if (d <= tol && coincident == nullptr) {
                coincident = &p;
                continue;
            }
            const double w = p.weight / d;
            num_x += w * p.x;
            num_y += w * p.y;
            denom += w;
            rx += w * (p.x - y.x);
            ry += w * (p.y - y.y);
        }

        RealPoint next;
        if (coincident == nullptr) {
            next = {num_x / denom, num_y / denom};
        } else {
            // Optimality test at the input point: |sum of unit pulls| <= its weight.
            const RealPoint at{coincident->x, coincident->y};
            rx = 0.0;
            ry = 0.0;
            for (const auto& p : pts) {
                if (&p == coincident) {
                    continue;
                }
                const double d = std::hypot(p.x - at.x, p.y - at.y);
                rx += p.weight * (p.x - at.x) / d;
                ry += p.weight * (p.y - at.y) / d;
            }
            const double r = std::hypot(rx, ry);
            if (r <= coincident->weight) {
                const double fa = weighted_objective(at, pts);
                if (fa <= f) {
                    y = at;
                    f = fa;
                    result.objective_history.push_back(f);
                }
                result.converged = true;
                result.iterations = iter + 1;
                break;
            }
            const double eta = coincident->weight / r;
            if (denom > 0.0) {
                next = {(1.0 - eta) * (num_x / denom) + eta * at.x, (1.0 - eta) * (num_y / denom) + eta * at.y};
            } else {
                next = at;
            }
        }

        const double f_next = weighted_objective(next, pts);
        result.iterations = iter + 1;
        if (f_next > f) {
            // Floating-point floor reached; keep the better iterate.
            result.converged = true;
            break;
        }
        const double move = std::hypot(next.x - y.x, next.y - y.y);
        y = next;
        f = f_next;
        result.objective_history.push_back(f);
        if (move < tol) {
            result.converged = true;
            break;
        }
    }

    result.point = y;
    result.objective = f;
    return result;
}

} // namespace agentsim::verifiers
