#include "agentsim/agents.hpp"

#include <sstream>
#include <stdexcept>

namespace agentsim::agents {

namespace {

constexpr const char* kAnswerFormat =
    "Strictly follow the following format to provide your answer in the last line of your response.";

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

struct PromptText
{
    std::string system;
    std::string user;
};

PromptText render(const GatherStepTask& t)
{
    std::ostringstream u;
    u << "You are located at position (" << t.position.x << ", " << t.position.y << "). "
      << "Your goal is to go to position (" << t.goal.x << ", " << t.goal.y << "). "
      << "You can move maximum " << t.max_speed << " units in each step. "
      << "What should be your position in the next step? "
      << "Verify that the distance between your new position and old position didn't exceed " << t.max_speed
      << " units. "
      << "Strictly follow the following format to provide your answer in integer coordinates in the last line of "
         "your response. New_Position:(.., ..).";
    return {"You are an AI agent moving in a two-dimensional Euclidean space.", u.str()};
}

PromptText render(const MinSelectTask& t)
{
    return {"You are an AI agent who can select the smallest element of an array.",
            "Select the smallest element from the unsorted array " + bracketed(t.values) + ". " + kAnswerFormat +
                " Answer:<number>."};
}

PromptText render(const DigitProductTask& t)
{
    return {"You are an AI agent who can multiply a number by a single digit.",
            "Multiply " + to_string(t.multiplicand) + " by the single digit " + std::to_string(t.digit) + ". " +
                kAnswerFormat + " Answer:<number>."};
}

PromptText render(const ShiftTask& t)
{
    const std::string p = std::to_string(t.position);
    return {"You are an AI agent who can multiply a number by a power of ten.",
            "Multiply " + to_string(t.value) + " by 10^" + p + ", that is, append " + p +
                " zeros to the right of " + to_string(t.value) + ". " + kAnswerFormat + " Answer:<number>."};
}

PromptText render(const MembershipTask& t)
{
    return {"You are an AI agent who can check whether a node is in a list of visited nodes.",
            "Visited: " + bracketed(t.visited) + ". Is node " + std::to_string(t.candidate) +
                " in the Visited list? " + kAnswerFormat + " Answer:YES or Answer:NO."};
}

PromptText render(const ZeroShotSortTask& t)
{
    return {"You are an AI agent who can sort an array.", "Sort the array " + bracketed(t.values) + "."};
}

PromptText render(const ZeroShotMultiplyTask& t)
{
    return {"You are an AI agent who can multiply two numbers.",
            "Multiply " + to_string(t.multiplicand) + " by " + to_string(t.multiplier) + "."};
}

PromptText render(const ZeroShotBfsTask& t)
{
    return {"You are an AI agent who can traverse a graph.",
            encode_incident(t.graph) + "\nPerform a breadth-first traversal of the graph starting from node " +
                std::to_string(t.start) +
                ", visiting neighbors in ascending order. List the nodes in the order they are visited."};
}

PromptText render_task(const Task& task)
{
    return std::visit([](const auto& t) { return render(t); }, task);
}

} // namespace

std::string_view role_name(Role role) noexcept
{
    switch (role) {
    case Role::system:
        return "system";
    case Role::user:
        return "user";
    case Role::assistant:
        return "assistant";
    }
    return "user";
}

std::vector<ChatMessage> build_prompt(const Task& task)
{
    PromptText p = render_task(task);
    return {{Role::system, std::move(p.system)}, {Role::user, std::move(p.user)}};
}

std::string instruction_for(const Task& task)
{
    return render_task(task).user;
}

std::string corrective_message(const std::string& reason, const std::string& instruction)
{
    return "Your previous answer was invalid: " + reason + ". " + instruction;
}

void SamplingParams::validate() const
{
    if (!(temperature >= 0.0)) {
        throw std::invalid_argument("temperature must be >= 0");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) {
        throw std::invalid_argument("top_p must be in (0, 1]");
    }
    if (top_k <= 0 || max_tokens <= 0 || context_window <= 0) {
        throw std::invalid_argument("top_k, max_tokens and context_window must be positive");
    }
}

void BackendDescriptor::validate() const
{
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(error_rate_wrong) || !is_prob(error_rate_malformed)) {
        throw std::invalid_argument("backend error rates must be in [0, 1]");
    }
    if (kind == BackendKind::http_chat && endpoint.empty()) {
        throw std::invalid_argument("http_chat backend requires an endpoint");
    }
    if (synthetic_latency.count() < 0) {
        throw std::invalid_argument("synthetic latency must be non-negative");
    }
}

std::string BackendDescriptor::counter_name() const
{
    if (!model_name.empty()) {
        return model_name;
    }
    return kind == BackendKind::mock_oracle ? "mock_oracle" : "http_chat";
}

std::unique_ptr<ChatBackend> make_backend(const BackendDescriptor& descriptor)
{
    descriptor.validate();
    if (descriptor.kind == BackendKind::mock_oracle) {
        return std::make_unique<MockOracleBackend>(descriptor);
    }
    return std::make_unique<HttpChatBackend>(descriptor);
}

ChatReply chat(ChatBackend& backend, const std::vector<ChatMessage>& messages, const SamplingParams& sampling,
               const std::string& caller)
{
    ChatRequest req;
    req.messages = messages;
    req.sampling = sampling;
    req.caller = caller;
    return backend.chat(req);
}

} // namespace agentsim::agents
