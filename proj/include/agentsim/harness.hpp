#pragma once

#include "agentsim/agents.hpp"
#include "agentsim/engine.hpp"
#include "agentsim/graph.hpp"
#include "agentsim/scenarios.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace agentsim::harness {

using verifiers::Point2D;

enum class Scenario { gathering, sorting, multiplication, bfs };
enum class Mode { coupled, zero_shot };

std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(Mode m) noexcept;
Scenario parse_scenario(std::string_view text);
Mode parse_mode(std::string_view text);

struct InstanceOptions
{
    std::size_t sort_length = 10;
    std::int64_t sort_max_value = 1000000; // exclusive
    int multiplication_min_digits = 4;
    int multiplication_max_digits = 6;
    std::size_t bfs_nodes = 10;
    double bfs_edge_probability = 0.3;
    /// Gathering override; empty means the fixed pentagon.
    std::vector<Point2D> gathering_positions;
    std::vector<std::int64_t> gathering_speeds;
};

struct RunConfig
{
    Scenario scenario = Scenario::sorting;
    Mode mode = Mode::coupled;
    agents::BackendDescriptor backend;
    agents::SamplingParams sampling;
    engine::EngineConfig engine;
    std::uint64_t instance_seed = 7;
    std::size_t instances = 10;
    std::size_t repetitions = 1;
    bool verification = true;
    bool fallback = true;
    bool second_chance = true;
    std::size_t max_attempts = agents::kDefaultMaxAttempts;
    /// Empty disables all file output.
    std::string output_dir;
    bool write_traces = true;
    InstanceOptions instance_options;

    /// Throws std::invalid_argument, e.g. zero_shot mode for gathering.
    void validate() const;
    scenarios::ScenarioOptions scenario_options() const;
};

/// Keys mirror RunConfig field names; missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

// Instances

inline const std::vector<Point2D> kPentagonPositions{{0, 108}, {0, 462}, {335, 571}, {543, 285}, {335, 0}};
inline const std::vector<std::int64_t> kPentagonSpeeds{10, 15, 20, 25, 30};

struct GatheringInstance
{
    std::vector<Point2D> positions;
    std::vector<std::int64_t> speeds;
};

struct SortingInstance
{
    std::vector<std::int64_t> values;
};

struct MultiplicationInstance
{
    BigInt multiplicand;
    BigInt multiplier;
};

struct BfsInstance
{
    Graph graph;
    NodeId start = 0;
};

using Instance = std::variant<GatheringInstance, SortingInstance, MultiplicationInstance, BfsInstance>;

/// Deterministic in (scenario, count, seed, options). Instance i draws from its
/// own stream, so prefixes agree across counts.
std::vector<Instance> generate_instances(Scenario scenario, std::size_t count, std::uint64_t seed,
                                         const InstanceOptions& options = {});

nlohmann::json instance_to_json(const Instance& instance);

// Experiments

struct ResultsRecord
{
    std::string scenario;
    std::string mode;
    std::size_t instance = 0;
    std::size_t repetition = 0;
    bool correct = false;
    bool malformed = false;
    std::uint64_t attempts = 0;
    std::uint64_t fell_back_count = 0;
    std::uint64_t events_executed = 0;
    double wall_time = 0.0;
    std::uint64_t tokens = 0;
    std::uint64_t trace_digest = 0;
    std::string error;
};

nlohmann::json to_json(const ResultsRecord& record);
ResultsRecord results_record_from_json(const nlohmann::json& doc);

struct SummaryRow
{
    std::string scenario;
    std::string mode;
    std::size_t instances = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultsRecord>& records);

/// Header "scenario,mode,instances,correct,accuracy"; accuracy printed in
/// shortest round-trip form.
std::string summary_csv(const std::vector<SummaryRow>& rows);

std::vector<ResultsRecord> read_results_jsonl(const std::string& path);

struct ExperimentResult
{
    std::vector<ResultsRecord> records;
    std::vector<SummaryRow> summary;
};

/// Runs every instance x repetition. With output_dir set, writes results.jsonl,
/// summary.csv and (optionally) traces/; an unwritable directory throws before
/// any run starts. Backend failures are recorded per run and scored incorrect.
ExperimentResult run_experiment(const RunConfig& config);

/// Mock seed for one (instance, repetition) run; independent of worker count.
std::uint64_t run_seed(std::uint64_t backend_seed, std::size_t instance, std::size_t repetition) noexcept;

// Temperature sweep

struct PathRow
{
    double t = 0.0;
    std::uint32_t agent = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t proposed_x = 0;
    std::int64_t proposed_y = 0;
    bool corrected = false;
};

struct SweepTrace
{
    double temperature = 0.0;
    bool verification = false;
    std::vector<PathRow> rows;
    /// Accepted steps longer than the agent's max_speed.
    std::size_t speed_violations = 0;
    std::size_t cycles = 0;
    bool all_reached = false;
    std::uint64_t trace_digest = 0;
};

inline const std::vector<double> kDefaultTemperatures{0.1, 0.2, 0.3, 0.4, 0.5};

/// Header "t,agent,x,y,proposed_x,proposed_y,corrected".
std::string path_csv(const std::vector<PathRow>& rows);

/// Path rows for one gathering run: the initial positions at start_time, then
/// one row per accepted step.
std::vector<PathRow> path_rows(const scenarios::GatheringState& state, double start_time);

std::size_t count_speed_violations(const scenarios::GatheringState& state);

/// One gathering run per temperature with verification on, then off.
std::vector<SweepTrace> temperature_sweep(const RunConfig& config, const std::vector<double>& temperatures);

// Worker scaling

struct ScalingRow
{
    std::uint32_t workers = 0;
    double wall_time = 0.0;
    std::uint64_t tokens = 0;
    double tokens_per_min = 0.0;
    std::uint64_t trace_digest = 0;
};

/// Header "workers,wall_time_s,tokens,tokens_per_min,trace_digest".
std::string scaling_csv(const std::vector<ScalingRow>& rows);

/// Runs the gathering scenario once per worker count against the mock backend
/// with the given per-call latency.
std::vector<ScalingRow> scaling_benchmark(const RunConfig& config, const std::vector<std::uint32_t>& worker_counts,
                                          std::chrono::milliseconds synthetic_latency);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

} // namespace agentsim::harness
