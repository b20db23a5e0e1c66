#pragma once

#include "agentsim/scenarios.hpp"

namespace agentsim::scenarios::detail {

/// Forwards to a shared backend and tallies tokens for one ask.
class TokenTap final : public agents::ChatBackend
{
public:
    explicit TokenTap(agents::ChatBackend& inner) : inner_(inner) {}

    agents::ChatReply chat(const agents::ChatRequest& request) override
    {
        auto reply = inner_.chat(request);
        tokens += reply.token_count;
        return reply;
    }
    const std::string& name() const override { return inner_.name(); }

    std::uint64_t tokens = 0;

private:
    agents::ChatBackend& inner_;
};

/// Entity base for model-backed agents.
class ModelAgent : public engine::Entity
{
public:
    ModelAgent(engine::EntityId id, agents::ChatBackend& backend, const ScenarioOptions& options)
        : engine::Entity(std::move(id)), backend_(backend), options_(options)
    {
    }

    const AskStats& stats() const noexcept { return stats_; }

protected:
    /// Asks with the scenario's verification policy. Without verification the
    /// validator and fallback are dropped; without fallback only the fallback is.
    template <class T>
    agents::ParsedAnswer<T> ask(const agents::Task& task, const agents::Parser<T>& parse,
                                const agents::Validator<T>& validator, const agents::Fallback<T>& fallback)
    {
        agents::ChatRequest request;
        request.messages = agents::build_prompt(task);
        request.sampling = options_.sampling;
        request.caller = id().str();
        request.task = task;

        TokenTap tap(backend_);
        const agents::Validator<T> v = options_.verification ? validator : agents::Validator<T>{};
        const agents::Fallback<T> f = options_.verification && options_.fallback ? fallback : agents::Fallback<T>{};
        ++stats_.subtasks;
        try {
            auto answer = agents::ask_with_retry<T>(tap, std::move(request), parse, v, f, options_.max_attempts);
            stats_.attempts += answer.attempts;
            stats_.fell_back += answer.fell_back ? 1 : 0;
            stats_.unverified_accepts += answer.validated ? 0 : 1;
            account(tap.tokens);
            return answer;
        } catch (const ParseError&) {
            stats_.attempts += options_.max_attempts;
            ++stats_.parse_failures;
            account(tap.tokens);
            throw;
        } catch (...) {
            account(tap.tokens);
            throw;
        }
    }

    const ScenarioOptions& options() const noexcept { return options_; }

private:
    void account(std::uint64_t tokens)
    {
        stats_.tokens += tokens;
        if (tokens > 0) {
            record_tokens(backend_.name(), tokens);
        }
    }

    agents::ChatBackend& backend_;
    const ScenarioOptions& options_;
    AskStats stats_;
};

inline std::int64_t to_int64(const BigInt& v)
{
    if (v > BigInt(std::numeric_limits<std::int64_t>::max())) {
        throw ParseError("integer answer out of range");
    }
    return static_cast<std::int64_t>(v);
}

inline BigInt bigint_from_payload(const nlohmann::json& j)
{
    return parse_bigint(j.get<std::string>());
}

} // namespace agentsim::scenarios::detail
