#include "agentsim/digest.hpp"
#include "agentsim/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;
namespace harness = agentsim::harness;

namespace {

// Flags overlay the config file document, key for key, before validation.
struct Overrides
{
    std::string config_file;
    std::optional<std::string> scenario, mode, backend_kind, endpoint, model_name, output_dir;
    std::optional<double> error_rate_wrong, error_rate_malformed, temperature, top_p, min_delay, start_time, end_time;
    std::optional<std::int64_t> top_k, max_tokens, context_window, latency_ms, timeout_s;
    std::optional<std::uint64_t> backend_seed, engine_seed, instance_seed;
    std::optional<std::uint32_t> workers;
    std::optional<std::size_t> instances, repetitions, max_attempts;
    std::optional<bool> verification, fallback, second_chance, write_traces, send_top_k;
    std::optional<std::size_t> sort_length, bfs_nodes;
    std::optional<int> mult_min_digits, mult_max_digits;
    std::optional<double> bfs_p;

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_file, "JSON run config; keys are RunConfig field names")
            ->check(CLI::ExistingFile);
        app.add_option("--scenario", scenario, "gathering | sorting | multiplication | bfs");
        app.add_option("--mode", mode, "coupled | zero_shot");
        app.add_option("--backend", backend_kind, "mock_oracle | http_chat");
        app.add_option("--endpoint", endpoint, "http_chat base URL");
        app.add_option("--model-name", model_name);
        app.add_option("--error-rate-wrong", error_rate_wrong);
        app.add_option("--error-rate-malformed", error_rate_malformed);
        app.add_option("--backend-seed", backend_seed);
        app.add_option("--synthetic-latency-ms", latency_ms);
        app.add_option("--request-timeout-s", timeout_s);
        app.add_option("--send-top-k", send_top_k);
        app.add_option("--temperature", temperature);
        app.add_option("--top-p", top_p);
        app.add_option("--top-k", top_k);
        app.add_option("--max-tokens", max_tokens);
        app.add_option("--context-window", context_window);
        app.add_option("--start-time", start_time);
        app.add_option("--end-time", end_time);
        app.add_option("--min-delay", min_delay);
        app.add_option("--workers", workers, "engine worker_count");
        app.add_option("--engine-seed", engine_seed);
        app.add_option("--instance-seed", instance_seed);
        app.add_option("--instances", instances);
        app.add_option("--repetitions", repetitions);
        app.add_option("--verification", verification);
        app.add_option("--fallback", fallback);
        app.add_option("--second-chance", second_chance);
        app.add_option("--max-attempts", max_attempts);
        app.add_option("--output-dir", output_dir);
        app.add_option("--write-traces", write_traces);
        app.add_option("--sort-length", sort_length);
        app.add_option("--multiplication-min-digits", mult_min_digits);
        app.add_option("--multiplication-max-digits", mult_max_digits);
        app.add_option("--bfs-nodes", bfs_nodes);
        app.add_option("--bfs-edge-probability", bfs_p);
    }

    harness::RunConfig resolve() const
    {
        json doc = json::object();
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            doc = json::parse(in);
        }
        auto put = [](json& node, const char* key, const auto& value) {
            if (value) {
                node[key] = *value;
            }
        };
        put(doc, "scenario", scenario);
        put(doc, "mode", mode);
        put(doc, "instance_seed", instance_seed);
        put(doc, "instances", instances);
        put(doc, "repetitions", repetitions);
        put(doc, "verification", verification);
        put(doc, "fallback", fallback);
        put(doc, "second_chance", second_chance);
        put(doc, "max_attempts", max_attempts);
        put(doc, "output_dir", output_dir);
        put(doc, "write_traces", write_traces);

        json& b = doc["backend"];
        put(b, "kind", backend_kind);
        put(b, "endpoint", endpoint);
        put(b, "model_name", model_name);
        put(b, "error_rate_wrong", error_rate_wrong);
        put(b, "error_rate_malformed", error_rate_malformed);
        put(b, "seed", backend_seed);
        put(b, "synthetic_latency_ms", latency_ms);
        put(b, "request_timeout_s", timeout_s);
        put(b, "send_top_k", send_top_k);

        json& s = doc["sampling"];
        put(s, "temperature", temperature);
        put(s, "top_p", top_p);
        put(s, "top_k", top_k);
        put(s, "max_tokens", max_tokens);
        put(s, "context_window", context_window);

        json& e = doc["engine"];
        put(e, "start_time", start_time);
        put(e, "end_time", end_time);
        put(e, "min_delay", min_delay);
        put(e, "worker_count", workers);
        put(e, "seed", engine_seed);

        json& io = doc["instance_options"];
        put(io, "sort_length", sort_length);
        put(io, "multiplication_min_digits", mult_min_digits);
        put(io, "multiplication_max_digits", mult_max_digits);
        put(io, "bfs_nodes", bfs_nodes);
        put(io, "bfs_edge_probability", bfs_p);

        for (const char* key : {"backend", "sampling", "engine", "instance_options"}) {
            if (doc[key].is_null()) {
                doc.erase(key);
            }
        }
        return harness::run_config_from_json(doc);
    }
};

int cmd_run(const harness::RunConfig& config)
{
    const auto result = harness::run_experiment(config);
    std::cout << harness::summary_csv(result.summary);
    for (const auto& r : result.records) {
        if (!r.error.empty()) {
            std::cerr << "instance " << r.instance << " rep " << r.repetition << ": " << r.error << '\n';
        }
    }
    return 0;
}

int cmd_sweep(const harness::RunConfig& config, const std::vector<double>& temperatures)
{
    const auto traces = harness::temperature_sweep(config, temperatures);
    std::cout << "temperature,verification,cycles,all_reached,speed_violations,trace_digest\n";
    for (const auto& t : traces) {
        std::cout << harness::format_double(t.temperature) << ',' << (t.verification ? 1 : 0) << ',' << t.cycles
                  << ',' << (t.all_reached ? 1 : 0) << ',' << t.speed_violations << ','
                  << agentsim::to_hex16(t.trace_digest) << '\n';
    }
    return 0;
}

int cmd_scale(const harness::RunConfig& config, const std::vector<std::uint32_t>& workers, std::int64_t latency_ms)
{
    const auto rows = harness::scaling_benchmark(config, workers, std::chrono::milliseconds(latency_ms));
    std::cout << harness::scaling_csv(rows);
    return 0;
}

int cmd_gen(const harness::RunConfig& config)
{
    const auto instances = harness::generate_instances(config.scenario, config.instances, config.instance_seed,
                                                       config.instance_options);
    std::ofstream file;
    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        file.open(std::filesystem::path(config.output_dir) / "instances.jsonl");
    }
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        json doc = harness::instance_to_json(instances[i]);
        doc["instance"] = i;
        out << doc.dump() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Windowed discrete-event simulation of verified multi-agent language-model workflows"};
    app.require_subcommand(1);

    Overrides run_flags, sweep_flags, scale_flags, gen_flags;
    auto* run = app.add_subcommand("run", "Batch experiment: results.jsonl, summary.csv, traces/");
    run_flags.attach(*run);

    auto* sweep = app.add_subcommand("sweep", "Gathering temperature sweep with verification on and off");
    sweep_flags.attach(*sweep);
    std::vector<double> temperatures = harness::kDefaultTemperatures;
    sweep->add_option("--temperatures", temperatures)->delimiter(',');

    auto* scale = app.add_subcommand("scale", "Gathering wall time across worker counts");
    scale_flags.attach(*scale);
    std::vector<std::uint32_t> worker_counts{1, 2, 3, 4, 5};
    std::int64_t latency_ms = 200;
    scale->add_option("--worker-counts", worker_counts)->delimiter(',');
    scale->add_option("--latency-ms", latency_ms, "synthetic per-call latency");

    auto* gen = app.add_subcommand("gen", "Write generated instances as JSON lines");
    gen_flags.attach(*gen);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return cmd_run(run_flags.resolve());
        }
        if (*sweep) {
            auto config = sweep_flags.resolve();
            if (!sweep_flags.scenario) {
                config.scenario = harness::Scenario::gathering;
            }
            return cmd_sweep(config, temperatures);
        }
        if (*scale) {
            auto config = scale_flags.resolve();
            config.scenario = harness::Scenario::gathering;
            return cmd_scale(config, worker_counts, latency_ms);
        }
        return cmd_gen(gen_flags.resolve());
    } catch (const std::exception& e) {
        std::cerr << "agentsim: " << e.what() << '\n';
        return 1;
    }
}
