#include "agentsim/digest.hpp"
#include "agentsim/harness.hpp"
#include "agentsim/rng.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace agentsim::harness {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t run_seed(std::uint64_t backend_seed, std::size_t instance, std::size_t repetition) noexcept
{
    return mix_seed({backend_seed, instance, repetition});
}

json to_json(const ResultsRecord& r)
{
    return json{
        {"scenario", r.scenario},
        {"mode", r.mode},
        {"instance", r.instance},
        {"repetition", r.repetition},
        {"correct", r.correct},
        {"malformed", r.malformed},
        {"attempts", r.attempts},
        {"fell_back_count", r.fell_back_count},
        {"events_executed", r.events_executed},
        {"wall_time", r.wall_time},
        {"tokens", r.tokens},
        {"trace_digest", to_hex16(r.trace_digest)},
        {"error", r.error},
    };
}

ResultsRecord results_record_from_json(const json& doc)
{
    ResultsRecord r;
    r.scenario = doc.at("scenario").get<std::string>();
    r.mode = doc.at("mode").get<std::string>();
    r.instance = doc.at("instance").get<std::size_t>();
    r.repetition = doc.at("repetition").get<std::size_t>();
    r.correct = doc.at("correct").get<bool>();
    r.malformed = doc.value("malformed", false);
    r.attempts = doc.at("attempts").get<std::uint64_t>();
    r.fell_back_count = doc.at("fell_back_count").get<std::uint64_t>();
    r.events_executed = doc.at("events_executed").get<std::uint64_t>();
    r.wall_time = doc.at("wall_time").get<double>();
    r.tokens = doc.at("tokens").get<std::uint64_t>();
    r.trace_digest = from_hex16(doc.at("trace_digest").get<std::string>());
    r.error = doc.value("error", std::string{});
    return r;
}

std::vector<SummaryRow> summarize(const std::vector<ResultsRecord>& records)
{
    std::map<std::pair<std::string, std::string>, SummaryRow> groups;
    for (const auto& r : records) {
        auto& row = groups[{r.scenario, r.mode}];
        row.scenario = r.scenario;
        row.mode = r.mode;
        ++row.instances;
        row.correct += r.correct ? 1 : 0;
    }
    std::vector<SummaryRow> rows;
    for (auto& [key, row] : groups) {
        row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.instances);
        rows.push_back(row);
    }
    return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "scenario,mode,instances,correct,accuracy\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.mode << ',' << r.instances << ',' << r.correct << ','
            << format_double(r.accuracy) << '\n';
    }
    return out.str();
}

std::vector<ResultsRecord> read_results_jsonl(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read results file " + path);
    }
    std::vector<ResultsRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(results_record_from_json(json::parse(line)));
        }
    }
    return out;
}

namespace {

std::uint64_t total_tokens(const engine::RunReport& report)
{
    std::uint64_t total = 0;
    for (const auto& [name, count] : report.token_counters) {
        total += count;
    }
    return total;
}

void fill_from(ResultsRecord& rec, const engine::RunReport& report, const scenarios::AskStats& stats)
{
    rec.attempts = stats.attempts;
    rec.fell_back_count = stats.fell_back;
    rec.events_executed = report.events_executed;
    rec.wall_time = report.wall_time;
    rec.tokens = total_tokens(report);
    rec.trace_digest = report.trace_digest;
}

struct SingleRun
{
    ResultsRecord record;
    std::optional<engine::RunReport> report;
};

SingleRun run_one(const RunConfig& config, const Instance& instance, std::size_t inst_id, std::size_t rep)
{
    SingleRun run;
    ResultsRecord& rec = run.record;
    rec.scenario = std::string(to_string(config.scenario));
    rec.mode = std::string(to_string(config.mode));
    rec.instance = inst_id;
    rec.repetition = rep;

    agents::BackendDescriptor desc = config.backend;
    if (desc.kind == agents::BackendKind::mock_oracle) {
        desc.seed = run_seed(config.backend.seed, inst_id, rep);
    }
    const scenarios::ScenarioOptions options = config.scenario_options();

    try {
        auto backend = agents::make_backend(desc);
        if (config.mode == Mode::zero_shot) {
            agents::Task task = std::visit(
                [](const auto& inst) -> agents::Task {
                    using T = std::decay_t<decltype(inst)>;
                    if constexpr (std::is_same_v<T, SortingInstance>) {
                        return agents::ZeroShotSortTask{inst.values};
                    } else if constexpr (std::is_same_v<T, MultiplicationInstance>) {
                        return agents::ZeroShotMultiplyTask{inst.multiplicand, inst.multiplier};
                    } else if constexpr (std::is_same_v<T, BfsInstance>) {
                        return agents::ZeroShotBfsTask{inst.graph, inst.start};
                    } else {
                        throw std::invalid_argument("zero_shot mode is not defined for gathering");
                    }
                },
                instance);
            auto out = scenarios::zero_shot_solve(task, *backend, options, config.second_chance);
            rec.correct = out.correct;
            rec.malformed = out.malformed;
            fill_from(rec, out.report, out.stats);
            run.report = std::move(out.report);
            return run;
        }

        if (const auto* g = std::get_if<GatheringInstance>(&instance)) {
            auto out = scenarios::gathering_protocol(g->positions, g->speeds, *backend, options);
            rec.correct = out.state.all_reached && count_speed_violations(out.state) == 0;
            fill_from(rec, out.report, out.stats);
            run.report = std::move(out.report);
        } else if (const auto* s = std::get_if<SortingInstance>(&instance)) {
            auto out = scenarios::sorting_protocol(s->values, *backend, options);
            rec.correct = verifiers::check_sorted_permutation(s->values, out.sorted);
            fill_from(rec, out.report, out.stats);
            run.report = std::move(out.report);
        } else if (const auto* m = std::get_if<MultiplicationInstance>(&instance)) {
            auto out = scenarios::multiplication_protocol(m->multiplicand, m->multiplier, *backend, options);
            rec.correct = out.product == m->multiplicand * m->multiplier;
            fill_from(rec, out.report, out.stats);
            run.report = std::move(out.report);
        } else if (const auto* b = std::get_if<BfsInstance>(&instance)) {
            auto out = scenarios::bfs_protocol(b->graph, b->start, *backend, options);
            rec.correct = out.visited == verifiers::reference_bfs(b->graph, b->start);
            fill_from(rec, out.report, out.stats);
            run.report = std::move(out.report);
        }
    } catch (const std::exception& e) {
        rec.correct = false;
        rec.error = e.what();
    }
    return run;
}

void ensure_writable(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = dir / ".write_probe";
    std::ofstream test(probe);
    if (ec || !test) {
        throw std::runtime_error("output directory is not writable: " + dir.string());
    }
    test.close();
    fs::remove(probe, ec);
}

} // namespace

ExperimentResult run_experiment(const RunConfig& config)
{
    config.validate();
    const bool write = !config.output_dir.empty();
    const fs::path dir(config.output_dir);
    if (write) {
        ensure_writable(dir);
        if (config.write_traces) {
            fs::create_directories(dir / "traces");
        }
    }

    const auto instances =
        generate_instances(config.scenario, config.instances, config.instance_seed, config.instance_options);

    ExperimentResult result;
    std::ofstream results_out;
    if (write) {
        results_out.open(dir / "results.jsonl");
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            SingleRun run = run_one(config, instances[i], i, rep);
            if (write) {
                results_out << to_json(run.record).dump() << '\n';
                if (config.write_traces && run.report) {
                    std::ostringstream stem;
                    stem << run.record.scenario << '_' << run.record.mode << "_i" << i << "_r" << rep;
                    engine::write_trace_jsonl(run.report->trace, (dir / "traces" / (stem.str() + ".jsonl")).string());
                    engine::write_digest_file(run.report->trace_digest,
                                              (dir / "traces" / (stem.str() + ".digest")).string());
                }
            }
            result.records.push_back(std::move(run.record));
        }
    }
    result.summary = summarize(result.records);
    if (write) {
        std::ofstream summary(dir / "summary.csv");
        summary << summary_csv(result.summary);
    }
    return result;
}

} // namespace agentsim::harness
