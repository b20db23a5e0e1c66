#include "agentsim/scenarios.hpp"
#include "model_agent.hpp"

#include <sstream>

namespace agentsim::scenarios {

namespace {

using nlohmann::json;

std::string render_list(const std::vector<std::int64_t>& values)
{
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i == 0 ? "" : ", ") << values[i];
    }
    out << ']';
    return out.str();
}

/// Parses, scores and renders the answer for one zero-shot task kind.
struct Scorer
{
    std::function<std::string(const std::string&)> parse_and_render; // throws ParseError
    std::function<std::optional<std::string>(const std::string&)> judge;
};

Scorer scorer_for(const agents::Task& task)
{
    if (const auto* t = std::get_if<agents::ZeroShotSortTask>(&task)) {
        auto original = t->values;
        return {[](const std::string& text) { return render_list(agents::parse_integer_list(text)); },
                [original](const std::string& rendered) -> std::optional<std::string> {
                    const auto candidate = agents::parse_integer_list(rendered);
                    if (verifiers::check_sorted_permutation(original, candidate)) {
                        return std::nullopt;
                    }
                    return std::string("the array is not a sorted permutation of the input");
                }};
    }
    if (const auto* t = std::get_if<agents::ZeroShotMultiplyTask>(&task)) {
        const BigInt product = t->multiplicand * t->multiplier;
        return {[](const std::string& text) {
                    std::string scope = text;
                    try {
                        scope = agents::parse_anchored(text, agents::kAnswerAnchor);
                    } catch (const ParseError&) {
                    }
                    return to_string(agents::parse_integer_answer(scope));
                },
                [product](const std::string& rendered) -> std::optional<std::string> {
                    if (parse_bigint(rendered) == product) {
                        return std::nullopt;
                    }
                    return rendered + " is not the correct product";
                }};
    }
    if (const auto* t = std::get_if<agents::ZeroShotBfsTask>(&task)) {
        const auto order = verifiers::reference_bfs(t->graph, t->start);
        const std::vector<std::int64_t> expected(order.begin(), order.end());
        return {[](const std::string& text) { return render_list(agents::parse_integer_list(text)); },
                [expected](const std::string& rendered) -> std::optional<std::string> {
                    if (agents::parse_integer_list(rendered) == expected) {
                        return std::nullopt;
                    }
                    return std::string("the traversal order is not correct");
                }};
    }
    throw std::invalid_argument("zero-shot tasks are sort, multiply or bfs");
}

class ZeroShotAgent final : public detail::ModelAgent
{
public:
    ZeroShotAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options,
                  const agents::Task& task, ZeroShotOutcome& out)
        : ModelAgent(std::move(id), backend, options), task_(task), out_(out)
    {
        attach_service("solve", [this](const json&) { solve(); });
    }

private:
    void solve()
    {
        const Scorer scorer = scorer_for(task_);
        try {
            // The judge only decides whether a second chance is spent; there is
            // no fallback, so a wrong final answer is reported as such.
            auto answer = ask<std::string>(task_, scorer.parse_and_render, scorer.judge, {});
            out_.answer = answer.value;
            out_.correct = answer.validated;
            out_.attempts = answer.attempts;
            out_.raw_replies = answer.raw_replies;
        } catch (const ParseError&) {
            out_.malformed = true;
            out_.correct = false;
            out_.attempts = options().max_attempts;
        }
    }

    const agents::Task& task_;
    ZeroShotOutcome& out_;
};

} // namespace

ZeroShotOutcome zero_shot_solve(const agents::Task& task, agents::ChatBackend& backend,
                                const ScenarioOptions& options, bool second_chance)
{
    (void)scorer_for(task); // rejects non zero-shot tasks before building the engine

    ScenarioOptions local = options;
    local.verification = true;
    local.fallback = false;
    local.max_attempts = second_chance ? 2 : 1;

    ZeroShotOutcome out;
    engine::Engine sim(local.engine);
    auto& agent = sim.emplace_entity<ZeroShotAgent>(kModelAgentName, 0, backend, local, task, out);
    sim.schedule_initial(local.engine.start_time, "solve", nullptr, {kModelAgentName, 0});
    out.report = sim.run();
    out.stats = agent.stats();
    return out;
}

} // namespace agentsim::scenarios
