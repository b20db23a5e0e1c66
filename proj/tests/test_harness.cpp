#include "agentsim/digest.hpp"
#include "agentsim/harness.hpp"
#include "support/stub_server.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace agentsim;
using namespace agentsim::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("agentsim_" + name))
    {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunConfig small(Scenario s, Mode m = Mode::coupled)
{
    RunConfig c;
    c.scenario = s;
    c.mode = m;
    c.instances = 4;
    return c;
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("instance generation is deterministic")
{
    const auto a = generate_instances(Scenario::bfs, 10, 7);
    const auto b = generate_instances(Scenario::bfs, 10, 7);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::get<BfsInstance>(a[i]).graph == std::get<BfsInstance>(b[i]).graph);
        CHECK(instance_to_json(a[i]) == instance_to_json(b[i]));
    }
    const auto c = generate_instances(Scenario::bfs, 10, 8);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        differs = differs || !(std::get<BfsInstance>(a[i]).graph == std::get<BfsInstance>(c[i]).graph);
    }
    CHECK(differs);
    const auto prefix = generate_instances(Scenario::bfs, 3, 7);
    CHECK(std::get<BfsInstance>(prefix[2]).graph == std::get<BfsInstance>(a[2]).graph);
    CHECK_THROWS_AS(generate_instances(Scenario::bfs, 0, 7), std::invalid_argument);
}

TEST_CASE("gathering instance defaults to the pentagon")
{
    const auto inst = std::get<GatheringInstance>(generate_instances(Scenario::gathering, 1, 0).front());
    CHECK(inst.positions == std::vector<Point2D>{{0, 108}, {0, 462}, {335, 571}, {543, 285}, {335, 0}});
    CHECK(inst.speeds == std::vector<std::int64_t>{10, 15, 20, 25, 30});

    InstanceOptions o;
    o.gathering_positions = {{1, 2}};
    o.gathering_speeds = {3};
    const auto custom = std::get<GatheringInstance>(generate_instances(Scenario::gathering, 1, 0, o).front());
    CHECK(custom.positions == std::vector<Point2D>{{1, 2}});
}

TEST_CASE("sorting and multiplication instances obey their ranges")
{
    for (const auto& i : generate_instances(Scenario::sorting, 50, 3)) {
        const auto& v = std::get<SortingInstance>(i).values;
        CHECK(v.size() == 10);
        for (auto x : v) {
            CHECK(x >= 0);
            CHECK(x < 1000000);
        }
    }
    for (const auto& i : generate_instances(Scenario::multiplication, 50, 3)) {
        const auto& m = std::get<MultiplicationInstance>(i);
        for (const auto* x : {&m.multiplicand, &m.multiplier}) {
            const auto digits = agentsim::to_string(*x).size();
            CHECK(digits >= 4);
            CHECK(digits <= 6);
        }
    }
}

TEST_CASE("erdos_renyi extremes")
{
    const Graph empty = erdos_renyi(10, 0.0, 1);
    CHECK(empty.node_count() == 10);
    CHECK(empty.edge_count() == 0);
    CHECK(erdos_renyi(10, 1.0, 1).edge_count() == 45);
    for (const auto& inst : generate_instances(Scenario::bfs, 20, 5)) {
        const auto& g = std::get<BfsInstance>(inst).graph;
        for (NodeId u = 0; u < g.node_count(); ++u) {
            CHECK(std::is_sorted(g.neighbors(u).begin(), g.neighbors(u).end()));
        }
    }
}

TEST_CASE("incident encoding")
{
    Graph path(3);
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    CHECK(encode_incident(path) ==
          "Node 0 is connected to nodes 1.\nNode 1 is connected to nodes 0, 2.\nNode 2 is connected to nodes 1.");
    CHECK(encode_incident(Graph(2)) == "Node 0 is not connected to any node.\nNode 1 is not connected to any node.");
    const Graph g = erdos_renyi(10, 0.3, 7);
    CHECK(encode_incident(g) == encode_incident(erdos_renyi(10, 0.3, 7)));
}

TEST_CASE("run config validation")
{
    RunConfig c = small(Scenario::gathering, Mode::zero_shot);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.scenario = Scenario::sorting;
    CHECK_NOTHROW(c.validate());
    c.instances = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("geometry"), std::invalid_argument);
    CHECK(parse_mode("zero_shot") == Mode::zero_shot);
}

TEST_CASE("run config round-trips through JSON")
{
    RunConfig c = small(Scenario::multiplication, Mode::zero_shot);
    c.backend.error_rate_wrong = 0.25;
    c.backend.seed = 99;
    c.sampling.temperature = 0.3;
    c.engine.worker_count = 3;
    c.repetitions = 2;
    c.instance_options.multiplication_max_digits = 9;
    const auto doc = to_json(c);
    const RunConfig back = run_config_from_json(doc);
    CHECK(to_json(back) == doc);
    CHECK(back.engine.worker_count == 3);
    CHECK(back.backend.error_rate_wrong == 0.25);

    const auto partial = run_config_from_json(nlohmann::json{{"scenario", "bfs"}, {"instances", 3}});
    CHECK(partial.scenario == Scenario::bfs);
    CHECK(partial.instances == 3);
    CHECK(partial.repetitions == 1);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"scenario", "gathering"}, {"mode", "zero_shot"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"instances", "many"}}), std::invalid_argument);

    TempDir dir("config");
    fs::create_directories(dir.path);
    std::ofstream(dir.path / "run.json") << doc.dump(2);
    CHECK(to_json(load_run_config((dir.path / "run.json").string())) == doc);
    CHECK_THROWS_AS(load_run_config((dir.path / "missing.json").string()), std::invalid_argument);
}

TEST_CASE("coupled sorting without errors is fully correct")
{
    const auto r = run_experiment(small(Scenario::sorting));
    REQUIRE(r.records.size() == 4);
    REQUIRE(r.summary.size() == 1);
    CHECK(r.summary[0].accuracy == 1.0);
    for (const auto& rec : r.records) {
        CHECK(rec.correct);
        CHECK(rec.error.empty());
        CHECK(rec.attempts >= 10);
        CHECK(rec.tokens > 0);
    }
}

TEST_CASE("experiment writes results, summary and traces that recompute")
{
    TempDir dir("experiment");
    RunConfig c = small(Scenario::multiplication, Mode::zero_shot);
    c.backend.error_rate_wrong = 0.5;
    c.repetitions = 3;
    c.output_dir = dir.path.string();
    const auto r = run_experiment(c);
    CHECK(r.records.size() == 12);

    CHECK(first_line(dir.path / "summary.csv") == "scenario,mode,instances,correct,accuracy");
    const auto records = read_results_jsonl((dir.path / "results.jsonl").string());
    REQUIRE(records.size() == r.records.size());
    const auto recomputed = summarize(records);
    std::ifstream in(dir.path / "summary.csv");
    std::stringstream file;
    file << in.rdbuf();
    CHECK(file.str() == summary_csv(recomputed));

    std::size_t correct = 0;
    for (const auto& rec : records) {
        correct += rec.correct ? 1 : 0;
    }
    CHECK(recomputed[0].correct == correct);
    CHECK(recomputed[0].accuracy == static_cast<double>(correct) / 12.0);

    const fs::path trace = dir.path / "traces" / "multiplication_zero_shot_i1_r2.jsonl";
    CHECK(fs::exists(trace));
    std::ifstream digest(dir.path / "traces" / "multiplication_zero_shot_i1_r2.digest");
    std::string hex;
    digest >> hex;
    CHECK(from_hex16(hex) == records[1 * 3 + 2].trace_digest);
}

TEST_CASE("coupled runs are reproducible and independent of worker count")
{
    RunConfig c = small(Scenario::bfs);
    c.backend.error_rate_wrong = 0.3;
    const auto a = run_experiment(c);
    c.engine.worker_count = 4;
    const auto b = run_experiment(c);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].trace_digest == b.records[i].trace_digest);
        CHECK(a.records[i].attempts == b.records[i].attempts);
        CHECK(a.records[i].correct);
    }
}

TEST_CASE("unwritable output directory fails before any run")
{
    TempDir dir("unwritable");
    fs::create_directories(dir.path);
    std::ofstream(dir.path / "file") << "x";
    RunConfig c = small(Scenario::sorting);
    c.output_dir = (dir.path / "file" / "sub").string();
    CHECK_THROWS_AS(run_experiment(c), std::runtime_error);
}

TEST_CASE("backend failures are recorded per run and scored incorrect")
{
    testing::StubChatServer stub(500, "boom");
    RunConfig c = small(Scenario::sorting);
    c.instances = 2;
    c.backend.kind = agents::BackendKind::http_chat;
    c.backend.endpoint = stub.endpoint();
    const auto r = run_experiment(c);
    REQUIRE(r.records.size() == 2);
    for (const auto& rec : r.records) {
        CHECK_FALSE(rec.correct);
        CHECK(rec.error.find("500") != std::string::npos);
    }
    CHECK(r.summary[0].accuracy == 0.0);
}

TEST_CASE("temperature sweep writes path CSVs and keeps verified traces within speed")
{
    TempDir dir("sweep");
    RunConfig c = small(Scenario::gathering);
    c.backend.error_rate_wrong = 0.5;
    c.output_dir = dir.path.string();
    const auto traces = temperature_sweep(c, {0.2});
    REQUIRE(traces.size() == 2);
    CHECK(traces[0].verification);
    CHECK(traces[0].speed_violations == 0);
    CHECK_FALSE(traces[1].verification);
    CHECK(traces[1].speed_violations > 0);
    CHECK(first_line(dir.path / "paths_t0.2_verified.csv") == "t,agent,x,y,proposed_x,proposed_y,corrected");
    CHECK(fs::exists(dir.path / "paths_t0.2_unverified.csv"));

    const auto& speeds = kPentagonSpeeds;
    std::vector<PathRow> last(5);
    for (const auto& row : traces[0].rows) {
        if (row.t > 0.0) {
            const auto& prev = last[row.agent];
            const auto dx = row.x - prev.x, dy = row.y - prev.y;
            CHECK(dx * dx + dy * dy <= speeds[row.agent] * speeds[row.agent]);
            if (!row.corrected) {
                CHECK(row.x == row.proposed_x);
                CHECK(row.y == row.proposed_y);
            }
        }
        last[row.agent] = row;
    }
    CHECK_THROWS_AS(temperature_sweep(small(Scenario::sorting), {0.1}), std::invalid_argument);
}

TEST_CASE("scaling benchmark validates its inputs and writes a table")
{
    TempDir dir("scaling");
    RunConfig c = small(Scenario::gathering);
    c.output_dir = dir.path.string();
    CHECK_THROWS_AS(scaling_benchmark(c, {1}, std::chrono::milliseconds(0)), std::invalid_argument);
    const auto rows = scaling_benchmark(c, {1, 2}, std::chrono::milliseconds(1));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].trace_digest == rows[1].trace_digest);
    CHECK(rows[0].tokens == rows[1].tokens);
    CHECK(first_line(dir.path / "scaling.csv") == "workers,wall_time_s,tokens,tokens_per_min,trace_digest");
}

TEST_CASE("csv formatting")
{
    CHECK(summary_csv({{"sorting", "coupled", 10, 9, 0.9}}) ==
          "scenario,mode,instances,correct,accuracy\nsorting,coupled,10,9,0.9\n");
    CHECK(path_csv({{1.0, 2, 3, 4, 5, 6, true}}) == "t,agent,x,y,proposed_x,proposed_y,corrected\n1,2,3,4,5,6,1\n");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("results records round-trip")
{
    ResultsRecord r;
    r.scenario = "bfs";
    r.mode = "coupled";
    r.instance = 3;
    r.correct = true;
    r.attempts = 17;
    r.trace_digest = 0xdeadbeefULL;
    const auto back = results_record_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
}
