#include "agentsim/scenarios.hpp"
#include "model_agent.hpp"

#include <cmath>
#include <sstream>

namespace agentsim::scenarios {

namespace {

using nlohmann::json;

json to_json(Point2D p)
{
    return json::array({p.x, p.y});
}

Point2D point_from(const json& j)
{
    return Point2D{j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()};
}

class GatheringAgent final : public detail::ModelAgent
{
public:
    GatheringAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options,
                   Point2D start, std::int64_t max_speed)
        : ModelAgent(std::move(id), backend, options), position_(start), max_speed_(max_speed)
    {
        attach_service("choose_next_step", [this](const json& p) { choose_next_step(p); });
        attach_service("dump_stats", [this](const json&) { finished_ = true; });
    }

    bool finished() const noexcept { return finished_; }

private:
    void choose_next_step(const json& payload)
    {
        const Point2D optimal = point_from(payload);
        const Point2D old = position_;
        const agents::Task task = agents::GatherStepTask{old, optimal, max_speed_};

        const agents::Parser<Point2D> parse = [](const std::string& text) {
            return agents::parse_coordinate_pair(agents::parse_anchored(text, agents::kPositionAnchor));
        };
        const agents::Validator<Point2D> speed_check = [&](const Point2D& p) -> std::optional<std::string> {
            if (verifiers::within_distance(old, p, max_speed_)) {
                return std::nullopt;
            }
            std::ostringstream why;
            why << "the distance between your new position (" << p.x << ", " << p.y << ") and old position ("
                << old.x << ", " << old.y << ") is " << verifiers::distance(old, p) << " units, which exceeds "
                << max_speed_ << " units";
            return why.str();
        };
        const agents::Fallback<Point2D> clamp = [&] { return verifiers::clamp_move(old, optimal, max_speed_); };

        Point2D accepted = old;
        Point2D proposed = old;
        std::size_t attempts = options().max_attempts;
        bool fell_back = false;
        bool corrected = false;
        try {
            auto answer = ask<Point2D>(task, parse, speed_check, clamp);
            accepted = answer.value;
            proposed = answer.first_proposal.value_or(answer.value);
            attempts = answer.attempts;
            fell_back = answer.fell_back;
            corrected = answer.attempts > 1 || answer.fell_back || !(proposed == accepted);
        } catch (const ParseError&) {
            // Unverified run and nothing parsed: the agent stays put.
            corrected = true;
        }
        position_ = accepted;
        const bool reached = verifiers::strictly_within_distance(accepted, optimal, max_speed_);

        json update;
        update["agent"] = num();
        update["position"] = to_json(accepted);
        update["proposed"] = to_json(proposed);
        update["old"] = to_json(old);
        update["reached"] = reached;
        update["corrected"] = corrected;
        update["attempts"] = attempts;
        update["fell_back"] = fell_back;
        req_service(options().step, "update_non_slm_copy_of_agent_pos", std::move(update), kVerifierName, 0);
    }

    Point2D position_;
    std::int64_t max_speed_;
    bool finished_ = false;
};

class GatheringVerifier final : public engine::Entity
{
public:
    GatheringVerifier(engine::EntityId id, const ScenarioOptions& options, GatheringState& state)
        : engine::Entity(std::move(id)), options_(options), state_(state)
    {
        attach_service("calculate_optimal_gathering_position", [this](const json& p) { calculate(p); });
        attach_service("update_non_slm_copy_of_agent_pos", [this](const json& p) { update(p); });
    }

private:
    void calculate(const json& payload)
    {
        std::vector<Point2D> positions;
        for (const auto& p : payload) {
            positions.push_back(point_from(p));
        }
        const std::size_t n = state_.positions.size();
        const bool all_reached =
            std::all_of(state_.reached.begin(), state_.reached.end(), [](bool r) { return r; });
        if ((state_.cycles > 0 && all_reached) || state_.cycles >= options_.max_cycles) {
            state_.all_reached = all_reached;
            for (std::uint32_t i = 0; i < n; ++i) {
                req_service(options_.step, "dump_stats", nullptr, kModelAgentName, i);
            }
            return;
        }
        const auto median = verifiers::geometric_median(positions);
        state_.optimal_position = verifiers::round_to_point(median.point);
        ++state_.cycles;
        pending_updates_ = n;
        for (std::uint32_t i = 0; i < n; ++i) {
            req_service(options_.step, "choose_next_step", to_json(state_.optimal_position), kModelAgentName, i);
        }
    }

    void update(const json& payload)
    {
        const auto agent = payload.at("agent").get<std::uint32_t>();
        GatheringStep step;
        step.t = now().value();
        step.agent = agent;
        step.old_position = point_from(payload.at("old"));
        step.proposed = point_from(payload.at("proposed"));
        step.accepted = point_from(payload.at("position"));
        step.corrected = payload.at("corrected").get<bool>();
        step.attempts = payload.at("attempts").get<std::size_t>();
        step.fell_back = payload.at("fell_back").get<bool>();
        state_.step_log.push_back(step);
        state_.positions.at(agent) = step.accepted;
        state_.reached.at(agent) = payload.at("reached").get<bool>();

        // Every agent reports at the same timestamp; the last report triggers the next cycle.
        if (--pending_updates_ == 0) {
            json positions = json::array();
            for (const auto& p : state_.positions) {
                positions.push_back(to_json(p));
            }
            req_service(options_.step, "calculate_optimal_gathering_position", std::move(positions), id());
        }
    }

    const ScenarioOptions& options_;
    GatheringState& state_;
    std::size_t pending_updates_ = 0;
};

} // namespace

GatheringOutcome gathering_protocol(const std::vector<Point2D>& initial_positions,
                                    const std::vector<std::int64_t>& speeds, agents::ChatBackend& backend,
                                    const ScenarioOptions& options)
{
    if (initial_positions.empty()) {
        throw std::invalid_argument("gathering needs at least one agent");
    }
    if (initial_positions.size() != speeds.size()) {
        throw std::invalid_argument("gathering positions and speeds differ in length");
    }
    for (auto s : speeds) {
        if (s <= 0) {
            throw std::invalid_argument("gathering speeds must be positive");
        }
    }

    GatheringOutcome out;
    out.state.initial_positions = initial_positions;
    out.state.positions = initial_positions;
    out.state.speeds = speeds;
    out.state.reached.assign(initial_positions.size(), false);

    engine::Engine sim(options.engine);
    sim.emplace_entity<GatheringVerifier>(kVerifierName, 0, options, out.state);
    std::vector<GatheringAgent*> agents;
    for (std::uint32_t i = 0; i < initial_positions.size(); ++i) {
        agents.push_back(
            &sim.emplace_entity<GatheringAgent>(kModelAgentName, i, backend, options, initial_positions[i], speeds[i]));
    }
    nlohmann::json init = nlohmann::json::array();
    for (const auto& p : initial_positions) {
        init.push_back(to_json(p));
    }
    sim.schedule_initial(options.engine.start_time, "calculate_optimal_gathering_position", std::move(init),
                         {kVerifierName, 0});
    out.report = sim.run();
    for (const auto* a : agents) {
        out.stats += a->stats();
    }
    return out;
}

} // namespace agentsim::scenarios
