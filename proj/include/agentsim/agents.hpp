#pragma once

#include "agentsim/errors.hpp"
#include "agentsim/graph.hpp"
#include "agentsim/verifiers.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace agentsim::agents {

using verifiers::Point2D;

enum class Role { system, user, assistant };

std::string_view role_name(Role role) noexcept;

struct ChatMessage
{
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct SamplingParams
{
    double temperature = 0.1;
    double top_p = 0.95;
    std::int64_t top_k = 40;
    std::int64_t max_tokens = 512;
    std::int64_t context_window = 8192;

    void validate() const;
};

enum class BackendKind { mock_oracle, http_chat };

struct BackendDescriptor
{
    BackendKind kind = BackendKind::mock_oracle;
    std::string endpoint;   // http_chat only, e.g. "http://127.0.0.1:8080"
    std::string model_name; // reported in token counters; sent as "model" over http
    double error_rate_wrong = 0.0;
    double error_rate_malformed = 0.0;
    std::uint64_t seed = 0;
    /// Mock only: sleep per call to stand in for inference cost.
    std::chrono::milliseconds synthetic_latency{0};
    /// http_chat only: include "top_k" in the request body.
    bool send_top_k = false;
    std::chrono::seconds request_timeout{120};

    void validate() const;
    /// Name used for token accounting.
    std::string counter_name() const;
};

// Sub-task descriptors. Prompts are built from them and the mock oracle answers
// from them directly, so the oracle never has to parse prose.

struct GatherStepTask
{
    Point2D position;
    Point2D goal;
    std::int64_t max_speed = 1;
};

struct MinSelectTask
{
    std::vector<std::int64_t> values;
};

struct DigitProductTask
{
    BigInt multiplicand;
    int digit = 0;
};

struct ShiftTask
{
    BigInt value;
    unsigned position = 0;
};

struct MembershipTask
{
    std::vector<NodeId> visited;
    NodeId candidate = 0;
};

struct ZeroShotSortTask
{
    std::vector<std::int64_t> values;
};

struct ZeroShotMultiplyTask
{
    BigInt multiplicand;
    BigInt multiplier;
};

struct ZeroShotBfsTask
{
    Graph graph;
    NodeId start = 0;
};

using Task = std::variant<GatherStepTask, MinSelectTask, DigitProductTask, ShiftTask, MembershipTask,
                          ZeroShotSortTask, ZeroShotMultiplyTask, ZeroShotBfsTask>;

/// System + user messages for a task. Byte-stable templates.
std::vector<ChatMessage> build_prompt(const Task& task);

/// The user instruction of build_prompt(task), reused in corrective feedback.
std::string instruction_for(const Task& task);

/// "Your previous answer was invalid: <reason>. " followed by the original instruction.
std::string corrective_message(const std::string& reason, const std::string& instruction);

struct ChatRequest
{
    std::vector<ChatMessage> messages;
    SamplingParams sampling;
    /// Stable identity of the caller (entity "name#num"); the mock keeps one call counter per caller.
    std::string caller;
    std::optional<Task> task;
};

struct ChatReply
{
    std::string text;
    std::uint64_t token_count = 0;
};

/// Chat-completion backend. Implementations must tolerate concurrent calls from
/// different callers.
class ChatBackend
{
public:
    virtual ~ChatBackend() = default;
    virtual ChatReply chat(const ChatRequest& request) = 0;
    virtual const std::string& name() const = 0;
};

/// Answers every task exactly, except that each call independently turns malformed
/// with probability error_rate_malformed or, failing that, wrong with probability
/// error_rate_wrong. Draws depend only on (seed, caller, per-caller call index,
/// temperature).
class MockOracleBackend final : public ChatBackend
{
public:
    explicit MockOracleBackend(BackendDescriptor descriptor);

    ChatReply chat(const ChatRequest& request) override;
    const std::string& name() const override { return name_; }

    std::uint64_t calls_made(const std::string& caller) const;

    /// Synthetic token count used by the mock: ceil(bytes / 4), at least 1.
    static std::uint64_t synthetic_tokens(const std::string& text) noexcept;

private:
    BackendDescriptor descriptor_;
    std::string name_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::uint64_t> counters_;
};

/// OpenAI-style POST {endpoint}/v1/chat/completions client.
class HttpChatBackend final : public ChatBackend
{
public:
    /// Environment variable holding an optional bearer token.
    static constexpr const char* kApiKeyEnv = "AGENTSIM_API_KEY";

    explicit HttpChatBackend(BackendDescriptor descriptor);

    ChatReply chat(const ChatRequest& request) override;
    const std::string& name() const override { return name_; }

private:
    BackendDescriptor descriptor_;
    std::string name_;
    std::string origin_;
    std::string path_;
};

/// Canonical request body: nlohmann::json dump with keys in lexicographic order,
/// no whitespace: {"max_tokens":..,"messages":[{"content":..,"role":..}],"model":..,
/// "temperature":..,"top_p":..} plus "top_k" when requested.
std::string build_chat_request_body(const std::string& model, const std::vector<ChatMessage>& messages,
                                    const SamplingParams& sampling, bool send_top_k);

/// Reads choices[0].message.content and usage.completion_tokens (whitespace-token
/// estimate when usage is absent). Throws BackendError on malformed bodies.
ChatReply parse_chat_response(int status, const std::string& body);

/// Whitespace-separated token count.
std::uint64_t estimate_tokens(const std::string& text) noexcept;

std::unique_ptr<ChatBackend> make_backend(const BackendDescriptor& descriptor);

/// Convenience wrapper: one call with no task attached.
ChatReply chat(ChatBackend& backend, const std::vector<ChatMessage>& messages, const SamplingParams& sampling,
               const std::string& caller = "anonymous");

// Reply parsing.

inline constexpr const char* kPositionAnchor = "New_Position:";
inline constexpr const char* kAnswerAnchor = "Answer:";

/// Remainder of the last line containing `anchor` (lines scanned in reverse).
std::string parse_anchored(const std::string& text, const std::string& anchor);

/// Last parenthesized group; the last numeral in each comma-separated half,
/// truncated toward zero.
Point2D parse_coordinate_pair(const std::string& raw);

/// Last run of decimal digits, parsed exactly.
BigInt parse_integer_answer(const std::string& raw);

/// Leading YES / NO (case-insensitive) of the anchored remainder.
bool parse_yes_no(const std::string& raw);

/// Last bracketed list "[a, b, ...]" of non-negative integers.
std::vector<std::int64_t> parse_integer_list(const std::string& raw);

// Ask / verify / retry / fallback.

template <class T>
struct ParsedAnswer
{
    T value{};
    std::size_t attempts = 0;
    bool fell_back = false;
    /// True when the validator accepted `value` (or produced it via fallback).
    bool validated = false;
    std::vector<std::string> raw_replies;
    /// First answer that parsed, whether or not it was accepted.
    std::optional<T> first_proposal;
    std::uint64_t tokens = 0;
    std::vector<ChatMessage> conversation;
};

/// nullopt accepts; a string rejects with that reason.
template <class T>
using Validator = std::function<std::optional<std::string>(const T&)>;

template <class T>
using Parser = std::function<T(const std::string&)>;

template <class T>
using Fallback = std::function<T()>;

inline constexpr std::size_t kDefaultMaxAttempts = 2;

/// Asks for an answer up to max_attempts times. A parse failure or validator
/// rejection appends the bad reply and a corrective user message before the next
/// attempt. When attempts run out the fallback's value is returned with
/// fell_back = true; without a fallback the last parsed answer is returned
/// unvalidated, and ParseError is thrown if nothing ever parsed. An empty
/// validator accepts any parseable answer. Backend errors propagate.
template <class T>
ParsedAnswer<T> ask_with_retry(ChatBackend& backend, ChatRequest request, const Parser<T>& parse,
                               const Validator<T>& validator, const Fallback<T>& fallback,
                               std::size_t max_attempts = kDefaultMaxAttempts)
{
    if (max_attempts == 0) {
        throw std::invalid_argument("max_attempts must be at least 1");
    }
    ParsedAnswer<T> out;
    std::string instruction;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == Role::user) {
            instruction = it->content;
            break;
        }
    }
    std::optional<T> last_parsed;
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        ChatReply reply = backend.chat(request);
        out.attempts = attempt;
        out.tokens += reply.token_count;
        out.raw_replies.push_back(reply.text);

        std::string reason;
        try {
            T value = parse(reply.text);
            if (!out.first_proposal) {
                out.first_proposal = value;
            }
            std::optional<std::string> rejection;
            if (validator) {
                rejection = validator(value);
            }
            if (!rejection) {
                out.value = std::move(value);
                out.validated = static_cast<bool>(validator);
                out.conversation = std::move(request.messages);
                return out;
            }
            reason = *rejection;
            last_parsed = std::move(value);
        } catch (const ParseError& e) {
            reason = e.what();
        }
        if (attempt < max_attempts) {
            request.messages.push_back({Role::assistant, reply.text});
            request.messages.push_back({Role::user, corrective_message(reason, instruction)});
        }
    }
    out.conversation = std::move(request.messages);
    if (fallback) {
        out.value = fallback();
        out.fell_back = true;
        out.validated = true;
        return out;
    }
    if (last_parsed) {
        out.value = std::move(*last_parsed);
        return out;
    }
    throw ParseError("no parseable answer after " + std::to_string(max_attempts) + " attempts");
}

} // namespace agentsim::agents
