#include "agentsim/harness.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace agentsim::harness {

using nlohmann::json;

std::string_view to_string(Scenario s) noexcept
{
    switch (s) {
    case Scenario::gathering:
        return "gathering";
    case Scenario::sorting:
        return "sorting";
    case Scenario::multiplication:
        return "multiplication";
    case Scenario::bfs:
        return "bfs";
    }
    return "sorting";
}

std::string_view to_string(Mode m) noexcept
{
    return m == Mode::coupled ? "coupled" : "zero_shot";
}

Scenario parse_scenario(std::string_view text)
{
    for (auto s : {Scenario::gathering, Scenario::sorting, Scenario::multiplication, Scenario::bfs}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text)
{
    if (text == "coupled") {
        return Mode::coupled;
    }
    if (text == "zero_shot") {
        return Mode::zero_shot;
    }
    throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

std::string format_double(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double failed");
    }
    return std::string(buf, end);
}

void RunConfig::validate() const
{
    if (mode == Mode::zero_shot && scenario == Scenario::gathering) {
        throw std::invalid_argument("zero_shot mode is only defined for sorting, multiplication and bfs");
    }
    if (instances == 0) {
        throw std::invalid_argument("instances must be at least 1");
    }
    if (repetitions == 0) {
        throw std::invalid_argument("repetitions must be at least 1");
    }
    if (max_attempts == 0) {
        throw std::invalid_argument("max_attempts must be at least 1");
    }
    const auto& io = instance_options;
    if (io.multiplication_min_digits < 1 || io.multiplication_max_digits < io.multiplication_min_digits) {
        throw std::invalid_argument("invalid multiplication digit range");
    }
    if (io.gathering_positions.size() != io.gathering_speeds.size()) {
        throw std::invalid_argument("gathering_positions and gathering_speeds differ in length");
    }
    backend.validate();
    sampling.validate();
    engine.validate();
}

scenarios::ScenarioOptions RunConfig::scenario_options() const
{
    scenarios::ScenarioOptions o;
    o.sampling = sampling;
    o.engine = engine;
    o.verification = verification;
    o.fallback = fallback;
    o.max_attempts = max_attempts;
    return o;
}

namespace {

agents::BackendKind parse_backend_kind(const std::string& s)
{
    if (s == "mock_oracle") {
        return agents::BackendKind::mock_oracle;
    }
    if (s == "http_chat") {
        return agents::BackendKind::http_chat;
    }
    throw std::invalid_argument("unknown backend kind '" + s + "'");
}

template <class T>
void read(const json& doc, const char* key, T& out)
{
    if (auto it = doc.find(key); it != doc.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

} // namespace

RunConfig run_config_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw std::invalid_argument("run config must be a JSON object");
    }
    RunConfig c;
    try {
        if (auto it = doc.find("scenario"); it != doc.end()) {
            c.scenario = parse_scenario(it->get<std::string>());
        }
        if (auto it = doc.find("mode"); it != doc.end()) {
            c.mode = parse_mode(it->get<std::string>());
        }
        if (auto it = doc.find("backend"); it != doc.end()) {
            const json& b = *it;
            if (auto k = b.find("kind"); k != b.end()) {
                c.backend.kind = parse_backend_kind(k->get<std::string>());
            }
            read(b, "endpoint", c.backend.endpoint);
            read(b, "model_name", c.backend.model_name);
            read(b, "error_rate_wrong", c.backend.error_rate_wrong);
            read(b, "error_rate_malformed", c.backend.error_rate_malformed);
            read(b, "seed", c.backend.seed);
            read(b, "send_top_k", c.backend.send_top_k);
            std::int64_t latency = c.backend.synthetic_latency.count();
            read(b, "synthetic_latency_ms", latency);
            c.backend.synthetic_latency = std::chrono::milliseconds(latency);
            std::int64_t timeout = c.backend.request_timeout.count();
            read(b, "request_timeout_s", timeout);
            c.backend.request_timeout = std::chrono::seconds(timeout);
        }
        if (auto it = doc.find("sampling"); it != doc.end()) {
            read(*it, "temperature", c.sampling.temperature);
            read(*it, "top_p", c.sampling.top_p);
            read(*it, "top_k", c.sampling.top_k);
            read(*it, "max_tokens", c.sampling.max_tokens);
            read(*it, "context_window", c.sampling.context_window);
        }
        if (auto it = doc.find("engine"); it != doc.end()) {
            double start = c.engine.start_time.value();
            double end = c.engine.end_time.value();
            read(*it, "start_time", start);
            read(*it, "end_time", end);
            c.engine.start_time = engine::VirtualTime(start);
            c.engine.end_time = engine::VirtualTime(end);
            read(*it, "min_delay", c.engine.min_delay);
            read(*it, "worker_count", c.engine.worker_count);
            read(*it, "seed", c.engine.seed);
        }
        read(doc, "instance_seed", c.instance_seed);
        read(doc, "instances", c.instances);
        read(doc, "repetitions", c.repetitions);
        read(doc, "verification", c.verification);
        read(doc, "fallback", c.fallback);
        read(doc, "second_chance", c.second_chance);
        read(doc, "max_attempts", c.max_attempts);
        read(doc, "output_dir", c.output_dir);
        read(doc, "write_traces", c.write_traces);
        if (auto it = doc.find("instance_options"); it != doc.end()) {
            auto& io = c.instance_options;
            read(*it, "sort_length", io.sort_length);
            read(*it, "sort_max_value", io.sort_max_value);
            read(*it, "multiplication_min_digits", io.multiplication_min_digits);
            read(*it, "multiplication_max_digits", io.multiplication_max_digits);
            read(*it, "bfs_nodes", io.bfs_nodes);
            read(*it, "bfs_edge_probability", io.bfs_edge_probability);
            if (auto p = it->find("gathering_positions"); p != it->end()) {
                io.gathering_positions.clear();
                for (const auto& xy : *p) {
                    io.gathering_positions.push_back({xy.at(0).get<std::int64_t>(), xy.at(1).get<std::int64_t>()});
                }
            }
            read(*it, "gathering_speeds", io.gathering_speeds);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed run config: ") + e.what());
    }
    c.validate();
    return c;
}

json to_json(const RunConfig& c)
{
    json doc;
    doc["scenario"] = std::string(to_string(c.scenario));
    doc["mode"] = std::string(to_string(c.mode));
    doc["backend"] = {
        {"kind", c.backend.kind == agents::BackendKind::mock_oracle ? "mock_oracle" : "http_chat"},
        {"endpoint", c.backend.endpoint},
        {"model_name", c.backend.model_name},
        {"error_rate_wrong", c.backend.error_rate_wrong},
        {"error_rate_malformed", c.backend.error_rate_malformed},
        {"seed", c.backend.seed},
        {"send_top_k", c.backend.send_top_k},
        {"synthetic_latency_ms", c.backend.synthetic_latency.count()},
        {"request_timeout_s", c.backend.request_timeout.count()},
    };
    doc["sampling"] = {
        {"temperature", c.sampling.temperature}, {"top_p", c.sampling.top_p},
        {"top_k", c.sampling.top_k},             {"max_tokens", c.sampling.max_tokens},
        {"context_window", c.sampling.context_window},
    };
    doc["engine"] = {
        {"start_time", c.engine.start_time.value()}, {"end_time", c.engine.end_time.value()},
        {"min_delay", c.engine.min_delay},           {"worker_count", c.engine.worker_count},
        {"seed", c.engine.seed},
    };
    doc["instance_seed"] = c.instance_seed;
    doc["instances"] = c.instances;
    doc["repetitions"] = c.repetitions;
    doc["verification"] = c.verification;
    doc["fallback"] = c.fallback;
    doc["second_chance"] = c.second_chance;
    doc["max_attempts"] = c.max_attempts;
    doc["output_dir"] = c.output_dir;
    doc["write_traces"] = c.write_traces;
    const auto& io = c.instance_options;
    json positions = json::array();
    for (const auto& p : io.gathering_positions) {
        positions.push_back({p.x, p.y});
    }
    doc["instance_options"] = {
        {"sort_length", io.sort_length},
        {"sort_max_value", io.sort_max_value},
        {"multiplication_min_digits", io.multiplication_min_digits},
        {"multiplication_max_digits", io.multiplication_max_digits},
        {"bfs_nodes", io.bfs_nodes},
        {"bfs_edge_probability", io.bfs_edge_probability},
        {"gathering_positions", positions},
        {"gathering_speeds", io.gathering_speeds},
    };
    return doc;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(doc);
}

} // namespace agentsim::harness
