#include "agentsim/scenarios.hpp"
#include "model_agent.hpp"

namespace agentsim::scenarios {

namespace {

using nlohmann::json;

const agents::Parser<BigInt> kParseAnswer = [](const std::string& text) {
    return agents::parse_integer_answer(agents::parse_anchored(text, agents::kAnswerAnchor));
};

agents::Validator<BigInt> equals(const BigInt& expected)
{
    return [expected](const BigInt& v) -> std::optional<std::string> {
        if (v == expected) {
            return std::nullopt;
        }
        return to_string(v) + " is not the correct result";
    };
}

class PartialProductAgent final : public detail::ModelAgent
{
public:
    PartialProductAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options)
        : ModelAgent(std::move(id), backend, options)
    {
        attach_service("partial_product", [this](const json& p) { compute(p); });
    }

private:
    void compute(const json& payload)
    {
        const BigInt multiplicand = detail::bigint_from_payload(payload.at("multiplicand"));
        const int digit = payload.at("digit").get<int>();
        const auto position = payload.at("position").get<unsigned>();

        const BigInt product_truth = verifiers::reference_partial(multiplicand, digit, 0);
        auto product = ask<BigInt>(agents::DigitProductTask{multiplicand, digit}, kParseAnswer,
                                   equals(product_truth), [&] { return product_truth; });

        // The shift is checked against the accepted product, so an unverified wrong
        // product propagates rather than being silently repaired here.
        const BigInt shifted_truth = product.value * boost::multiprecision::pow(BigInt(10), position);
        auto shifted = ask<BigInt>(agents::ShiftTask{product.value, position}, kParseAnswer, equals(shifted_truth),
                                   [&] { return shifted_truth; });

        json result;
        result["position"] = position;
        result["partial"] = to_string(shifted.value);
        req_service(options().step, "collect_partial", std::move(result), kVerifierName, 0);
    }
};

class MultiplicationVerifier final : public engine::Entity
{
public:
    MultiplicationVerifier(engine::EntityId id, const ScenarioOptions& options, MultiplicationOutcome& out)
        : engine::Entity(std::move(id)), options_(options), out_(out)
    {
        attach_service("decompose", [this](const json& p) { decompose(p); });
        attach_service("collect_partial", [this](const json& p) { collect(p); });
    }

private:
    void decompose(const json& payload)
    {
        const std::string multiplicand = payload.at("multiplicand").get<std::string>();
        const std::string multiplier = payload.at("multiplier").get<std::string>();
        const std::size_t digits = multiplier.size();
        out_.partials.assign(digits, BigInt(0));
        received_.assign(digits, false);
        outstanding_ = digits;
        // Rightmost digit is position 0 and goes to model agent 0.
        for (std::size_t pos = 0; pos < digits; ++pos) {
            json task;
            task["multiplicand"] = multiplicand;
            task["digit"] = multiplier[digits - 1 - pos] - '0';
            task["position"] = pos;
            req_service(options_.step, "partial_product", std::move(task), kModelAgentName,
                        static_cast<std::uint32_t>(pos));
        }
    }

    void collect(const json& payload)
    {
        const auto pos = payload.at("position").get<std::size_t>();
        if (received_.at(pos)) {
            throw ProtocolError("duplicate partial for position " + std::to_string(pos));
        }
        received_[pos] = true;
        out_.partials[pos] = detail::bigint_from_payload(payload.at("partial"));
        if (--outstanding_ == 0) {
            out_.product = verifiers::big_sum(out_.partials);
        }
    }

    const ScenarioOptions& options_;
    MultiplicationOutcome& out_;
    std::vector<bool> received_;
    std::size_t outstanding_ = 0;
};

} // namespace

MultiplicationOutcome multiplication_protocol(const BigInt& multiplicand, const BigInt& multiplier,
                                              agents::ChatBackend& backend, const ScenarioOptions& options)
{
    if (multiplicand < 0 || multiplier < 0) {
        throw std::invalid_argument("multiplication operands must be non-negative");
    }
    MultiplicationOutcome out;
    out.product = -1;
    const std::string multiplier_digits = to_string(multiplier);

    engine::Engine sim(options.engine);
    sim.emplace_entity<MultiplicationVerifier>(kVerifierName, 0, options, out);
    std::vector<PartialProductAgent*> agents;
    for (std::uint32_t i = 0; i < multiplier_digits.size(); ++i) {
        agents.push_back(&sim.emplace_entity<PartialProductAgent>(kModelAgentName, i, backend, options));
    }
    nlohmann::json init;
    init["multiplicand"] = to_string(multiplicand);
    init["multiplier"] = multiplier_digits;
    sim.schedule_initial(options.engine.start_time, "decompose", std::move(init), {kVerifierName, 0});
    out.report = sim.run();
    for (const auto* a : agents) {
        out.stats += a->stats();
    }
    if (out.product < 0) {
        throw ProtocolError("multiplication finished without collecting every partial product");
    }
    return out;
}

} // namespace agentsim::scenarios
