#include "agentsim/scenarios.hpp"
#include "model_agent.hpp"

#include <algorithm>

namespace agentsim::scenarios {

AskStats& AskStats::operator+=(const AskStats& other)
{
    subtasks += other.subtasks;
    attempts += other.attempts;
    fell_back += other.fell_back;
    unverified_accepts += other.unverified_accepts;
    parse_failures += other.parse_failures;
    tokens += other.tokens;
    return *this;
}

namespace {

using nlohmann::json;

class MinSelectionAgent final : public detail::ModelAgent
{
public:
    MinSelectionAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options)
        : ModelAgent(std::move(id), backend, options)
    {
        attach_service("select_smallest", [this](const json& p) { select(p); });
    }

private:
    void select(const json& payload)
    {
        const auto values = payload.get<std::vector<std::int64_t>>();
        const auto truth = verifiers::reference_min(values);

        const agents::Parser<std::int64_t> parse = [](const std::string& text) {
            return detail::to_int64(
                agents::parse_integer_answer(agents::parse_anchored(text, agents::kAnswerAnchor)));
        };
        const agents::Validator<std::int64_t> is_min = [&](const std::int64_t& v) -> std::optional<std::string> {
            if (v == truth.value) {
                return std::nullopt;
            }
            if (std::find(values.begin(), values.end(), v) == values.end()) {
                return std::to_string(v) + " is not an element of the unsorted array";
            }
            return std::to_string(v) + " is not the smallest element of the unsorted array";
        };
        const agents::Fallback<std::int64_t> reference = [&] { return truth.value; };

        auto answer = ask<std::int64_t>(agents::MinSelectTask{values}, parse, is_min, reference);
        req_service(options().step, "remove_and_append", answer.value, kVerifierName, 0);
    }
};

class SortingVerifier final : public engine::Entity
{
public:
    SortingVerifier(engine::EntityId id, const ScenarioOptions& options, std::vector<std::int64_t>& sorted)
        : engine::Entity(std::move(id)), options_(options), sorted_(sorted)
    {
        attach_service("initialize", [this](const json& p) {
            unsorted_ = p.get<std::vector<std::int64_t>>();
            sorted_.clear();
            request_next();
        });
        attach_service("remove_and_append", [this](const json& p) { apply(p.get<std::int64_t>()); });
    }

private:
    void request_next()
    {
        if (!unsorted_.empty()) {
            req_service(options_.step, "select_smallest", unsorted_, kModelAgentName, 0);
        }
    }

    void apply(std::int64_t value)
    {
        auto it = std::find(unsorted_.begin(), unsorted_.end(), value);
        if (it == unsorted_.end()) {
            throw ProtocolError("selected value " + std::to_string(value) + " is not in the unsorted array");
        }
        unsorted_.erase(it);
        sorted_.push_back(value);
        request_next();
    }

    const ScenarioOptions& options_;
    std::vector<std::int64_t>& sorted_;
    std::vector<std::int64_t> unsorted_;
};

} // namespace

SortingOutcome sorting_protocol(const std::vector<std::int64_t>& values, agents::ChatBackend& backend,
                                const ScenarioOptions& options)
{
    SortingOutcome out;
    engine::Engine sim(options.engine);
    sim.emplace_entity<SortingVerifier>(kVerifierName, 0, options, out.sorted);
    auto& agent = sim.emplace_entity<MinSelectionAgent>(kModelAgentName, 0, backend, options);
    sim.schedule_initial(options.engine.start_time, "initialize", values, {kVerifierName, 0});
    out.report = sim.run();
    out.stats = agent.stats();
    return out;
}

} // namespace agentsim::scenarios
