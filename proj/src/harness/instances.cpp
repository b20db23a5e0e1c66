#include "agentsim/harness.hpp"
#include "agentsim/rng.hpp"

namespace agentsim::harness {

using nlohmann::json;

namespace {

BigInt random_operand(Rng& rng, int digits)
{
    std::string s;
    s.push_back(static_cast<char>('1' + rng.below(9)));
    for (int i = 1; i < digits; ++i) {
        s.push_back(static_cast<char>('0' + rng.below(10)));
    }
    return parse_bigint(s);
}

} // namespace

std::vector<Instance> generate_instances(Scenario scenario, std::size_t count, std::uint64_t seed,
                                         const InstanceOptions& options)
{
    if (count == 0) {
        throw std::invalid_argument("instance count must be at least 1");
    }
    std::vector<Instance> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(mix_seed({seed, static_cast<std::uint64_t>(scenario), i}));
        switch (scenario) {
        case Scenario::gathering:
            if (options.gathering_positions.empty()) {
                out.emplace_back(GatheringInstance{kPentagonPositions, kPentagonSpeeds});
            } else {
                out.emplace_back(GatheringInstance{options.gathering_positions, options.gathering_speeds});
            }
            break;
        case Scenario::sorting: {
            SortingInstance inst;
            for (std::size_t k = 0; k < options.sort_length; ++k) {
                inst.values.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(options.sort_max_value))));
            }
            out.emplace_back(std::move(inst));
            break;
        }
        case Scenario::multiplication: {
            const int lo = options.multiplication_min_digits;
            const int hi = options.multiplication_max_digits;
            const int a_digits = static_cast<int>(rng.between(lo, hi));
            const int b_digits = static_cast<int>(rng.between(lo, hi));
            MultiplicationInstance inst;
            inst.multiplicand = random_operand(rng, a_digits);
            inst.multiplier = random_operand(rng, b_digits);
            out.emplace_back(std::move(inst));
            break;
        }
        case Scenario::bfs:
            out.emplace_back(
                BfsInstance{erdos_renyi(options.bfs_nodes, options.bfs_edge_probability, rng.next_u64()), 0});
            break;
        }
    }
    return out;
}

json instance_to_json(const Instance& instance)
{
    return std::visit(
        [](const auto& inst) -> json {
            using T = std::decay_t<decltype(inst)>;
            json doc;
            if constexpr (std::is_same_v<T, GatheringInstance>) {
                doc["scenario"] = "gathering";
                json pos = json::array();
                for (const auto& p : inst.positions) {
                    pos.push_back({p.x, p.y});
                }
                doc["positions"] = pos;
                doc["speeds"] = inst.speeds;
            } else if constexpr (std::is_same_v<T, SortingInstance>) {
                doc["scenario"] = "sorting";
                doc["values"] = inst.values;
            } else if constexpr (std::is_same_v<T, MultiplicationInstance>) {
                doc["scenario"] = "multiplication";
                doc["multiplicand"] = agentsim::to_string(inst.multiplicand);
                doc["multiplier"] = agentsim::to_string(inst.multiplier);
            } else {
                doc["scenario"] = "bfs";
                doc["start"] = inst.start;
                doc["adjacency"] = inst.graph.adjacency();
                doc["incident"] = encode_incident(inst.graph);
            }
            return doc;
        },
        instance);
}

} // namespace agentsim::harness
