#include "agentsim/scenarios.hpp"
#include "model_agent.hpp"

#include <algorithm>
#include <deque>

namespace agentsim::scenarios {

namespace {

using nlohmann::json;

class MembershipAgent final : public detail::ModelAgent
{
public:
    MembershipAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options)
        : ModelAgent(std::move(id), backend, options)
    {
        attach_service("check_visited", [this](const json& p) { check(p); });
    }

private:
    void check(const json& payload)
    {
        const auto visited = payload.at("visited").get<std::vector<NodeId>>();
        const auto candidate = payload.at("candidate").get<NodeId>();
        const bool truth = std::find(visited.begin(), visited.end(), candidate) != visited.end();

        const agents::Parser<bool> parse = [](const std::string& text) {
            return agents::parse_yes_no(agents::parse_anchored(text, agents::kAnswerAnchor));
        };
        const agents::Validator<bool> exact = [&](const bool& answer) -> std::optional<std::string> {
            if (answer == truth) {
                return std::nullopt;
            }
            return "node " + std::to_string(candidate) + (truth ? " is" : " is not") + " in the Visited list";
        };
        auto answer = ask<bool>(agents::MembershipTask{visited, candidate}, parse, exact, [&] { return truth; });

        json result;
        result["candidate"] = candidate;
        result["in_visited"] = answer.value;
        req_service(options().step, "membership_result", std::move(result), kVerifierName, 0);
    }
};

class BfsVerifier final : public engine::Entity
{
public:
    BfsVerifier(engine::EntityId id, const ScenarioOptions& options, const Graph& graph, std::vector<NodeId>& visited)
        : engine::Entity(std::move(id)), options_(options), graph_(graph), visited_(visited),
          enqueued_(graph.node_count(), false)
    {
        attach_service("initialize", [this](const json& p) {
            const auto start = p.get<NodeId>();
            queue_.push_back(start);
            enqueued_.at(start) = true;
            req_service(options_.step, "expand", nullptr, this->id());
        });
        attach_service("expand", [this](const json&) { expand(); });
        attach_service("membership_result", [this](const json& p) { on_result(p); });
    }

private:
    void expand()
    {
        if (queue_.empty()) {
            return;
        }
        const NodeId head = queue_.front();
        queue_.pop_front();
        visited_.push_back(head);
        const auto& nbrs = graph_.neighbors(head);
        outstanding_ = nbrs.size();
        if (outstanding_ == 0) {
            advance();
            return;
        }
        for (NodeId v : nbrs) {
            json task;
            task["visited"] = visited_;
            task["candidate"] = v;
            req_service(options_.step, "check_visited", std::move(task), kModelAgentName, 0);
        }
    }

    void on_result(const json& payload)
    {
        const auto v = payload.at("candidate").get<NodeId>();
        // The enqueued guard keeps a node answered "not visited" twice from entering the queue twice.
        if (!payload.at("in_visited").get<bool>() && !enqueued_.at(v)) {
            enqueued_[v] = true;
            queue_.push_back(v);
        }
        if (--outstanding_ == 0) {
            advance();
        }
    }

    void advance()
    {
        if (!queue_.empty()) {
            req_service(options_.step, "expand", nullptr, id());
        }
    }

    const ScenarioOptions& options_;
    const Graph& graph_;
    std::vector<NodeId>& visited_;
    std::vector<bool> enqueued_;
    std::deque<NodeId> queue_;
    std::size_t outstanding_ = 0;
};

} // namespace

BfsOutcome bfs_protocol(const Graph& graph, NodeId start, agents::ChatBackend& backend,
                        const ScenarioOptions& options)
{
    if (!graph.contains(start)) {
        throw std::invalid_argument("BFS start node is not in the graph");
    }
    BfsOutcome out;
    engine::Engine sim(options.engine);
    sim.emplace_entity<BfsVerifier>(kVerifierName, 0, options, graph, out.visited);
    auto& agent = sim.emplace_entity<MembershipAgent>(kModelAgentName, 0, backend, options);
    sim.schedule_initial(options.engine.start_time, "initialize", start, {kVerifierName, 0});
    out.report = sim.run();
    out.stats = agent.stats();
    return out;
}

} // namespace agentsim::scenarios
