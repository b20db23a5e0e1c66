#pragma once

#include "agentsim/agents.hpp"
#include "agentsim/engine.hpp"
#include "agentsim/graph.hpp"
#include "agentsim/verifiers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agentsim::scenarios {

using verifiers::Point2D;

inline const std::string kVerifierName = "Non-AI-Agent";
inline const std::string kModelAgentName = "SLM-Agent";

struct ScenarioOptions
{
    agents::SamplingParams sampling;
    engine::EngineConfig engine;
    /// Check every model answer against the verifier and ask again on rejection.
    bool verification = true;
    /// After max_attempts rejections, substitute the verifier's answer.
    bool fallback = true;
    std::size_t max_attempts = agents::kDefaultMaxAttempts;
    /// Virtual-time spacing between protocol steps.
    double step = 1.0;
    /// Gathering only: stop after this many median updates.
    std::size_t max_cycles = 10000;
};

/// Per-run totals over every model sub-task.
struct AskStats
{
    std::uint64_t subtasks = 0;
    std::uint64_t attempts = 0;
    std::uint64_t fell_back = 0;
    std::uint64_t unverified_accepts = 0;
    std::uint64_t parse_failures = 0;
    std::uint64_t tokens = 0;

    AskStats& operator+=(const AskStats& other);
};

// Gathering

struct GatheringStep
{
    double t = 0.0;
    std::uint32_t agent = 0;
    Point2D old_position;
    Point2D proposed;
    Point2D accepted;
    /// The accepted point differs from the model's first proposal or needed a retry.
    bool corrected = false;
    std::size_t attempts = 0;
    bool fell_back = false;
};

struct GatheringState
{
    std::vector<Point2D> initial_positions;
    std::vector<Point2D> positions;
    std::vector<std::int64_t> speeds;
    Point2D optimal_position;
    std::vector<bool> reached;
    std::vector<GatheringStep> step_log;
    std::size_t cycles = 0;
    bool all_reached = false;
};

struct GatheringOutcome
{
    GatheringState state;
    engine::RunReport report;
    AskStats stats;
};

/// One verifier entity recomputes the gathering point each cycle and fans a
/// choose_next_step event out to every model agent at the same timestamp.
GatheringOutcome gathering_protocol(const std::vector<Point2D>& initial_positions,
                                    const std::vector<std::int64_t>& speeds, agents::ChatBackend& backend,
                                    const ScenarioOptions& options);

// Sorting

struct SortingOutcome
{
    std::vector<std::int64_t> sorted;
    engine::RunReport report;
    AskStats stats;
};

SortingOutcome sorting_protocol(const std::vector<std::int64_t>& values, agents::ChatBackend& backend,
                                const ScenarioOptions& options);

// Multiplication

struct MultiplicationOutcome
{
    BigInt product;
    std::vector<BigInt> partials; // indexed by multiplier digit position
    engine::RunReport report;
    AskStats stats;
};

/// One model entity per multiplier digit computes digit product then shift.
MultiplicationOutcome multiplication_protocol(const BigInt& multiplicand, const BigInt& multiplier,
                                              agents::ChatBackend& backend, const ScenarioOptions& options);

// Breadth-first search

struct BfsOutcome
{
    std::vector<NodeId> visited;
    engine::RunReport report;
    AskStats stats;
};

BfsOutcome bfs_protocol(const Graph& graph, NodeId start, agents::ChatBackend& backend,
                        const ScenarioOptions& options);

// Zero-shot baseline

struct ZeroShotOutcome
{
    /// Canonical rendering of the final parsed answer; empty when malformed.
    std::string answer;
    bool correct = false;
    bool malformed = false;
    std::size_t attempts = 0;
    std::vector<std::string> raw_replies;
    engine::RunReport report;
    AskStats stats;
};

/// Single prompt, no decomposition and no verifier correction. With
/// second_chance, a wrong or malformed first answer earns one more attempt.
/// Task must be one of the ZeroShot* alternatives.
ZeroShotOutcome zero_shot_solve(const agents::Task& task, agents::ChatBackend& backend,
                                const ScenarioOptions& options, bool second_chance);

} // namespace agentsim::scenarios
