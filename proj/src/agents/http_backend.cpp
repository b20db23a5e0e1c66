#include "agentsim/agents.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace agentsim::agents {

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint)
{
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("endpoint must include a scheme: " + endpoint);
    }
    const auto slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) {
        return {endpoint, ""};
    }
    std::string prefix = endpoint.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {endpoint.substr(0, slash), prefix};
}

} // namespace

std::string build_chat_request_body(const std::string& model, const std::vector<ChatMessage>& messages,
                                    const SamplingParams& sampling, bool send_top_k)
{
    nlohmann::json body;
    body["model"] = model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", std::string(role_name(m.role))}, {"content", m.content}});
    }
    body["temperature"] = sampling.temperature;
    body["top_p"] = sampling.top_p;
    body["max_tokens"] = sampling.max_tokens;
    if (send_top_k) {
        body["top_k"] = sampling.top_k;
    }
    return body.dump();
}

ChatReply parse_chat_response(int status, const std::string& body)
{
    if (status != 200) {
        throw BackendError(status, body, "chat endpoint returned HTTP " + std::to_string(status));
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(status, body, std::string("chat reply is not JSON: ") + e.what());
    }
    ChatReply reply;
    try {
        reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(status, body, std::string("chat reply lacks choices[0].message.content: ") + e.what());
    }
    const auto usage = doc.find("usage");
    if (usage != doc.end() && usage->is_object() && usage->contains("completion_tokens") &&
        (*usage)["completion_tokens"].is_number_integer()) {
        reply.token_count = (*usage)["completion_tokens"].get<std::uint64_t>();
    } else {
        reply.token_count = estimate_tokens(reply.text);
    }
    return reply;
}

HttpChatBackend::HttpChatBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)), name_(descriptor_.counter_name())
{
    descriptor_.validate();
    auto [origin, prefix] = split_endpoint(descriptor_.endpoint);
    origin_ = std::move(origin);
    path_ = prefix + "/v1/chat/completions";
}

ChatReply HttpChatBackend::chat(const ChatRequest& request)
{
    if (request.messages.empty() || request.messages.back().role != Role::user) {
        throw std::invalid_argument("chat request must end with a user message");
    }
    const std::string body =
        build_chat_request_body(descriptor_.model_name, request.messages, request.sampling, descriptor_.send_top_k);

    httplib::Client client(origin_);
    const auto timeout = static_cast<time_t>(descriptor_.request_timeout.count());
    client.set_connection_timeout(timeout, 0);
    client.set_read_timeout(timeout, 0);
    client.set_write_timeout(timeout, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(kApiKeyEnv); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
        throw BackendError(0, "", "chat request to " + origin_ + path_ + " failed: " + httplib::to_string(result.error()));
    }
    return parse_chat_response(result->status, result->body);
}

} // namespace agentsim::agents
