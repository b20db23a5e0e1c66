#include "agentsim/agents.hpp"
#include "agentsim/digest.hpp"
#include "agentsim/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

namespace agentsim::agents {

namespace {

constexpr const char* kMalformedReply = "I am not sure how to answer this in the requested format.";

template <class Seq>
std::string bracketed(const Seq& values)
{
    std::ostringstream out;
    out << '[';
    bool first = true;
    for (const auto& v : values) {
        out << (first ? "" : ", ") << v;
        first = false;
    }
    out << ']';
    return out.str();
}

std::string answer_line(const std::string& value)
{
    return std::string(kAnswerAnchor) + value;
}

class ReplyWriter
{
public:
    ReplyWriter(Rng& rng, bool wrong) : rng_(rng), wrong_(wrong) {}

    std::string operator()(const GatherStepTask& t) const
    {
        Point2D next = verifiers::clamp_move(t.position, t.goal, t.max_speed);
        if (wrong_) {
            // Jump 2x-3x the allowed distance toward the goal (or along +x when already there).
            double dx = static_cast<double>(t.goal.x - t.position.x);
            double dy = static_cast<double>(t.goal.y - t.position.y);
            double len = std::hypot(dx, dy);
            if (len == 0.0) {
                dx = 1.0;
                dy = 0.0;
                len = 1.0;
            }
            const double jump = static_cast<double>(t.max_speed) * (2.0 + rng_.uniform01());
            next = Point2D{t.position.x + static_cast<std::int64_t>(std::llround(dx / len * jump)),
                           t.position.y + static_cast<std::int64_t>(std::llround(dy / len * jump))};
        }
        std::ostringstream out;
        out << "I will move toward (" << t.goal.x << ", " << t.goal.y << ") by at most " << t.max_speed
            << " units.\n"
            << kPositionAnchor << '(' << next.x << ", " << next.y << ')';
        return out.str();
    }

    std::string operator()(const MinSelectTask& t) const
    {
        if (t.values.empty()) {
            return kMalformedReply;
        }
        const auto best = verifiers::reference_min(t.values);
        std::int64_t pick = best.value;
        if (wrong_) {
            std::vector<std::int64_t> others;
            std::copy_if(t.values.begin(), t.values.end(), std::back_inserter(others),
                         [&](std::int64_t v) { return v != best.value; });
            pick = others.empty() ? best.value + 1 : others[rng_.below(others.size())];
        }
        return "The smallest element is " + std::to_string(pick) + ".\n" + answer_line(std::to_string(pick));
    }

    std::string operator()(const DigitProductTask& t) const
    {
        BigInt value = verifiers::reference_partial(t.multiplicand, t.digit, 0);
        if (wrong_) {
            value += 1 + rng_.below(9);
        }
        return answer_line(to_string(value));
    }

    std::string operator()(const ShiftTask& t) const
    {
        BigInt value = t.value * boost::multiprecision::pow(BigInt(10), t.position);
        if (wrong_) {
            value += 1 + rng_.below(9);
        }
        return answer_line(to_string(value));
    }

    std::string operator()(const MembershipTask& t) const
    {
        bool member = std::find(t.visited.begin(), t.visited.end(), t.candidate) != t.visited.end();
        if (wrong_) {
            member = !member;
        }
        return answer_line(member ? "YES" : "NO");
    }

    std::string operator()(const ZeroShotSortTask& t) const
    {
        std::vector<std::int64_t> sorted = t.values;
        std::sort(sorted.begin(), sorted.end());
        if (wrong_) {
            std::vector<std::size_t> swappable;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                if (sorted[i] != sorted[i + 1]) {
                    swappable.push_back(i);
                }
            }
            if (!swappable.empty()) {
                const std::size_t i = swappable[rng_.below(swappable.size())];
                std::swap(sorted[i], sorted[i + 1]);
            } else if (!sorted.empty()) {
                sorted.pop_back();
            } else {
                sorted.push_back(1);
            }
        }
        return "Sorted array:\n" + answer_line(bracketed(sorted));
    }

    std::string operator()(const ZeroShotMultiplyTask& t) const
    {
        BigInt value = t.multiplicand * t.multiplier;
        if (wrong_) {
            value += 1 + rng_.below(999);
        }
        return answer_line(to_string(value));
    }

    std::string operator()(const ZeroShotBfsTask& t) const
    {
        std::vector<NodeId> order = verifiers::reference_bfs(t.graph, t.start);
        if (wrong_) {
            if (order.size() >= 2) {
                const std::size_t i = rng_.below(order.size());
                std::size_t j = rng_.below(order.size() - 1);
                if (j >= i) {
                    ++j;
                }
                std::swap(order[i], order[j]);
            } else {
                order.push_back(static_cast<NodeId>(t.graph.node_count()));
            }
        }
        return "Traversal order:\n" + answer_line(bracketed(order));
    }

private:
    Rng& rng_;
    bool wrong_;
};

void require_user_last(const ChatRequest& request)
{
    if (request.messages.empty() || request.messages.back().role != Role::user) {
        throw std::invalid_argument("chat request must end with a user message");
    }
}

} // namespace

MockOracleBackend::MockOracleBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)), name_(descriptor_.counter_name())
{
    descriptor_.validate();
}

std::uint64_t MockOracleBackend::calls_made(const std::string& caller) const
{
    std::lock_guard lock(mutex_);
    auto it = counters_.find(caller);
    return it == counters_.end() ? 0 : it->second;
}

std::uint64_t MockOracleBackend::synthetic_tokens(const std::string& text) noexcept
{
    return std::max<std::uint64_t>(1, (text.size() + 3) / 4);
}

ChatReply MockOracleBackend::chat(const ChatRequest& request)
{
    require_user_last(request);
    std::uint64_t call_index = 0;
    {
        std::lock_guard lock(mutex_);
        call_index = counters_[request.caller]++;
    }
    if (descriptor_.synthetic_latency.count() > 0) {
        std::this_thread::sleep_for(descriptor_.synthetic_latency);
    }

    Rng rng(mix_seed({descriptor_.seed, fnv1a64(request.caller), call_index,
                      std::bit_cast<std::uint64_t>(request.sampling.temperature)}));
    const bool malformed = rng.uniform01() < descriptor_.error_rate_malformed;
    const bool wrong = rng.uniform01() < descriptor_.error_rate_wrong;

    ChatReply reply;
    if (malformed || !request.task) {
        reply.text = kMalformedReply;
    } else {
        reply.text = std::visit(ReplyWriter(rng, wrong), *request.task);
    }
    reply.token_count = synthetic_tokens(reply.text);
    return reply;
}

} // namespace agentsim::agents
