#include "agentsim/agents.hpp"
#include "agentsim/errors.hpp"
#include "support/stub_server.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>

using namespace agentsim;
using namespace agentsim::agents;

namespace {

const std::string kFixtures = AGENTSIM_FIXTURE_DIR "/http_stub/";

BackendDescriptor http_to(const std::string& endpoint)
{
    BackendDescriptor d;
    d.kind = BackendKind::http_chat;
    d.endpoint = endpoint;
    d.model_name = "qwen2.5-7b-instruct";
    d.request_timeout = std::chrono::seconds(5);
    return d;
}

ChatRequest gathering_request()
{
    const GatherStepTask task{{0, 108}, {241, 285}, 10};
    return ChatRequest{build_prompt(task), SamplingParams{}, "SLM-Agent#0", task};
}

std::string trimmed(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
        s.pop_back();
    }
    return s;
}

} // namespace

TEST_CASE("request body matches the recorded fixture byte for byte")
{
    const std::string expected = trimmed(testing::read_file(kFixtures + "request_body.json"));
    const GatherStepTask task{{0, 108}, {241, 285}, 10};
    CHECK(build_chat_request_body("qwen2.5-7b-instruct", build_prompt(task), SamplingParams{}, false) == expected);
}

TEST_CASE("top_k is sent only when enabled")
{
    const auto body = nlohmann::json::parse(
        build_chat_request_body("m", {{Role::user, "hi"}}, SamplingParams{}, true));
    CHECK(body.at("top_k") == 40);
    const auto plain = nlohmann::json::parse(build_chat_request_body("m", {{Role::user, "hi"}}, SamplingParams{}, false));
    CHECK_FALSE(plain.contains("top_k"));
}

TEST_CASE("http backend posts the canonical body and parses the fixed reply")
{
    const std::string reply = testing::read_file(kFixtures + "reply.json");
    testing::StubChatServer stub(200, reply);
    HttpChatBackend backend(http_to(stub.endpoint()));
    const auto r = backend.chat(gathering_request());

    const auto captured = stub.captured();
    REQUIRE(captured.size() == 1);
    CHECK(captured[0].path == "/v1/chat/completions");
    CHECK(captured[0].content_type == "application/json");
    CHECK(captured[0].body == trimmed(testing::read_file(kFixtures + "request_body.json")));

    CHECK(r.text == "The direction to the goal is (241, 177); one step of 10 units lands near (8, 114).\n"
                    "New_Position:(8, 114)");
    CHECK(r.token_count == 31);
    CHECK(parse_coordinate_pair(parse_anchored(r.text, kPositionAnchor)) == Point2D{8, 114});
}

TEST_CASE("endpoint path prefix is preserved")
{
    testing::StubChatServer stub(200, testing::read_file(kFixtures + "reply.json"));
    HttpChatBackend backend(http_to(stub.endpoint() + "/proxy/"));
    backend.chat(gathering_request());
    CHECK(stub.captured().at(0).path == "/proxy/v1/chat/completions");
}

TEST_CASE("bearer token comes from the environment")
{
    testing::StubChatServer stub(200, testing::read_file(kFixtures + "reply.json"));
    HttpChatBackend backend(http_to(stub.endpoint()));
    ::setenv(HttpChatBackend::kApiKeyEnv, "secret-token", 1);
    backend.chat(gathering_request());
    ::unsetenv(HttpChatBackend::kApiKeyEnv);
    backend.chat(gathering_request());
    const auto captured = stub.captured();
    CHECK(captured.at(0).authorization == "Bearer secret-token");
    CHECK(captured.at(1).authorization.empty());
}

TEST_CASE("missing usage falls back to a whitespace token estimate")
{
    const auto r = parse_chat_response(200, R"({"choices":[{"message":{"role":"assistant","content":"a b  c\nd"}}]})");
    CHECK(r.text == "a b  c\nd");
    CHECK(r.token_count == 4);
}

TEST_CASE("error statuses and malformed bodies raise BackendError with status and body")
{
    testing::StubChatServer stub(503, R"({"error":"overloaded"})");
    HttpChatBackend backend(http_to(stub.endpoint()));
    try {
        backend.chat(gathering_request());
        FAIL("expected BackendError");
    } catch (const BackendError& e) {
        CHECK(e.status() == 503);
        CHECK(e.body() == R"({"error":"overloaded"})");
    }
    CHECK_THROWS_AS(parse_chat_response(200, "not json"), BackendError);
    CHECK_THROWS_AS(parse_chat_response(200, R"({"choices":[]})"), BackendError);
}

TEST_CASE("unreachable endpoint is a transport error")
{
    BackendDescriptor d = http_to("http://127.0.0.1:1");
    d.request_timeout = std::chrono::seconds(1);
    HttpChatBackend backend(d);
    CHECK_THROWS_AS(backend.chat(gathering_request()), BackendError);
}
