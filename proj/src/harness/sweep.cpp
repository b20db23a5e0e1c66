#include "agentsim/digest.hpp"
#include "agentsim/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace agentsim::harness {

namespace fs = std::filesystem;

std::vector<PathRow> path_rows(const scenarios::GatheringState& state, double start_time)
{
    std::vector<PathRow> rows;
    for (std::uint32_t i = 0; i < state.initial_positions.size(); ++i) {
        const auto p = state.initial_positions[i];
        rows.push_back({start_time, i, p.x, p.y, p.x, p.y, false});
    }
    for (const auto& s : state.step_log) {
        rows.push_back({s.t, s.agent, s.accepted.x, s.accepted.y, s.proposed.x, s.proposed.y, s.corrected});
    }
    return rows;
}

std::size_t count_speed_violations(const scenarios::GatheringState& state)
{
    std::size_t violations = 0;
    for (const auto& s : state.step_log) {
        if (!verifiers::within_distance(s.old_position, s.accepted, state.speeds.at(s.agent))) {
            ++violations;
        }
    }
    return violations;
}

std::string path_csv(const std::vector<PathRow>& rows)
{
    std::ostringstream out;
    out << "t,agent,x,y,proposed_x,proposed_y,corrected\n";
    for (const auto& r : rows) {
        out << format_double(r.t) << ',' << r.agent << ',' << r.x << ',' << r.y << ',' << r.proposed_x << ','
            << r.proposed_y << ',' << (r.corrected ? 1 : 0) << '\n';
    }
    return out.str();
}

namespace {

GatheringInstance gathering_instance(const RunConfig& config)
{
    auto inst = generate_instances(Scenario::gathering, 1, config.instance_seed, config.instance_options);
    return std::get<GatheringInstance>(inst.front());
}

std::uint64_t total_tokens(const engine::RunReport& report)
{
    std::uint64_t total = 0;
    for (const auto& [name, count] : report.token_counters) {
        total += count;
    }
    return total;
}

} // namespace

std::vector<SweepTrace> temperature_sweep(const RunConfig& config, const std::vector<double>& temperatures)
{
    if (config.scenario != Scenario::gathering) {
        throw std::invalid_argument("temperature_sweep requires the gathering scenario");
    }
    config.validate();
    const GatheringInstance inst = gathering_instance(config);
    const bool write = !config.output_dir.empty();
    if (write) {
        fs::create_directories(config.output_dir);
    }

    std::vector<SweepTrace> traces;
    for (double temperature : temperatures) {
        for (bool verified : {true, false}) {
            scenarios::ScenarioOptions options = config.scenario_options();
            options.sampling.temperature = temperature;
            options.verification = verified;
            options.fallback = verified;
            auto backend = agents::make_backend(config.backend);
            auto out = scenarios::gathering_protocol(inst.positions, inst.speeds, *backend, options);

            SweepTrace trace;
            trace.temperature = temperature;
            trace.verification = verified;
            trace.rows = path_rows(out.state, config.engine.start_time.value());
            trace.speed_violations = count_speed_violations(out.state);
            trace.cycles = out.state.cycles;
            trace.all_reached = out.state.all_reached;
            trace.trace_digest = out.report.trace_digest;
            if (write) {
                const std::string file = "paths_t" + format_double(temperature) + (verified ? "_verified" : "_unverified") + ".csv";
                std::ofstream csv(fs::path(config.output_dir) / file);
                csv << path_csv(trace.rows);
            }
            traces.push_back(std::move(trace));
        }
    }
    return traces;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows)
{
    std::ostringstream out;
    out << "workers,wall_time_s,tokens,tokens_per_min,trace_digest\n";
    for (const auto& r : rows) {
        out << r.workers << ',' << format_double(r.wall_time) << ',' << r.tokens << ','
            << format_double(r.tokens_per_min) << ',' << to_hex16(r.trace_digest) << '\n';
    }
    return out.str();
}

std::vector<ScalingRow> scaling_benchmark(const RunConfig& config, const std::vector<std::uint32_t>& worker_counts,
                                          std::chrono::milliseconds synthetic_latency)
{
    if (config.backend.kind != agents::BackendKind::mock_oracle) {
        throw std::invalid_argument("scaling_benchmark requires the mock backend");
    }
    if (synthetic_latency.count() <= 0) {
        throw std::invalid_argument("scaling_benchmark requires a positive synthetic latency");
    }
    config.validate();
    const GatheringInstance inst = gathering_instance(config);

    std::vector<ScalingRow> rows;
    for (std::uint32_t workers : worker_counts) {
        scenarios::ScenarioOptions options = config.scenario_options();
        options.engine.worker_count = workers;
        agents::BackendDescriptor desc = config.backend;
        desc.synthetic_latency = synthetic_latency;
        auto backend = agents::make_backend(desc);
        auto out = scenarios::gathering_protocol(inst.positions, inst.speeds, *backend, options);

        ScalingRow row;
        row.workers = workers;
        row.wall_time = out.report.wall_time;
        row.tokens = total_tokens(out.report);
        row.tokens_per_min = row.wall_time > 0.0 ? static_cast<double>(row.tokens) * 60.0 / row.wall_time : 0.0;
        row.trace_digest = out.report.trace_digest;
        rows.push_back(row);
    }
    if (!config.output_dir.empty()) {
        fs::create_directories(config.output_dir);
        std::ofstream csv(fs::path(config.output_dir) / "scaling.csv");
        csv << scaling_csv(rows);
    }
    return rows;
}

} // namespace agentsim::harness
