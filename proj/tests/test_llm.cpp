// SPDX-License-Identifier: Apache-2.0

#include <tmaint/llm.hpp>

#include "support/fixture_repo.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <thread>

using namespace tmaint;
using nlohmann::json;

TEST_CASE("scripted provider replays the queue in order and records requests")
{
    ScriptedChatProvider provider({ "first", "second" });
    ChatRequest request;
    request.messages.push_back({ "user", "hello" });
    CHECK(provider.complete(request).text == "first");
    CHECK(provider.complete(request).text == "second");
    CHECK(provider.calls() == 2);
    CHECK(provider.transcript()[0].messages[0].text == "hello");
    CHECK_THROWS_AS(provider.complete(request), ProviderRejection);
}

TEST_CASE("scripted provider rules match on the last message and are not consumed")
{
    ScriptedChatProvider provider;
    provider.add_rule("summarize", "a summary");
    provider.push("queued");
    ChatRequest request;
    request.messages.push_back({ "user", "please summarize this hunk" });
    CHECK(provider.complete(request).text == "a summary");
    CHECK(provider.complete(request).text == "a summary"); // rule still live
    request.messages.push_back({ "user", "something else" });
    CHECK(provider.complete(request).text == "queued");
}

TEST_CASE("scripted provider stalling past the request timeout raises TimeoutExceeded")
{
    ScriptedChatProvider provider({ "never delivered" });
    provider.set_delay(std::chrono::milliseconds(200));
    ChatRequest request;
    request.timeout = std::chrono::milliseconds(50);
    request.messages.push_back({ "user", "x" });
    auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(provider.complete(request), TimeoutExceeded);
    auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(elapsed >= std::chrono::milliseconds(50));
    CHECK(elapsed < std::chrono::milliseconds(190));
}

TEST_CASE("hash embedder is deterministic, normalized, and dimension-stable")
{
    HashEmbedder embedder(256);
    auto vectors = embedder.embed({ "assertEquals(2, flow.size())", "assertEquals(2, flow.size())",
        "completely different text about parsing" });
    REQUIRE(vectors.size() == 3);
    for (const auto& v : vectors) {
        CHECK(v.size() == 256);
        double norm = 0.0;
        for (float x : v)
            norm += static_cast<double>(x) * x;
        CHECK(std::abs(norm - 1.0) < 1e-5);
    }
    CHECK(vectors[0] == vectors[1]);
    CHECK(vectors[0] != vectors[2]);
    CHECK(embedder.fingerprint() == "hash-embedder/256");
}

TEST_CASE("hash embedder: empty text embeds to the zero vector")
{
    HashEmbedder embedder(64);
    auto v = embedder.embed({ "" })[0];
    for (float x : v)
        CHECK(x == 0.0f);
}

TEST_CASE("hash embedder: similar texts score higher than unrelated ones")
{
    HashEmbedder embedder(256);
    auto vs = embedder.embed({
        "public void testSize() { assertEquals(2, flow.size()); }",
        "public void testSize() { assertEquals(3, flow.size()); }",
        "SELECT name FROM customers WHERE region = 'north'",
    });
    auto dot = [](const EmbeddingVector& a, const EmbeddingVector& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += static_cast<double>(a[i]) * b[i];
        return s;
    };
    CHECK(dot(vs[0], vs[1]) > dot(vs[0], vs[2]));
}

namespace {

// In-process OpenAI-compatible stub.
class StubServer {
public:
    explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> chat_handler)
    {
        server_.Post("/v1/chat/completions", std::move(chat_handler));
        server_.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            json data = json::array();
            int index = 0;
            for (const auto& _ : body.at("input")) {
                (void)_;
                data.push_back({ { "index", index++ }, { "embedding", { 1.0, 0.0, 0.0 } } });
            }
            res.set_content(json { { "data", data } }.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST_CASE("http provider sends the expected wire shape and parses the reply")
{
    json seen;
    std::string seen_auth;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        seen_auth = req.get_header_value("Authorization");
        res.set_content(json {
            { "choices", { { { "message", { { "role", "assistant" }, { "content", "pong" } } } } } },
            { "usage", { { "prompt_tokens", 7 }, { "completion_tokens", 2 } } },
        }
                            .dump(),
            "application/json");
    });

    setenv("TMAINT_TEST_KEY", "sk-fixture", 1);
    OpenAiHttpProvider provider({ server.url(), "test-chat", "test-embed", "TMAINT_TEST_KEY" });

    ChatRequest request;
    request.system_prompt = "be terse";
    request.messages.push_back({ "user", "ping" });
    ChatResponse response = provider.complete(request);

    CHECK(response.text == "pong");
    REQUIRE(response.usage.has_value());
    CHECK(response.usage->prompt_tokens == 7);
    CHECK(seen.at("model") == "test-chat");
    CHECK(seen.at("temperature") == 0.0);
    REQUIRE(seen.at("messages").size() == 2);
    CHECK(seen["messages"][0]["role"] == "system");
    CHECK(seen["messages"][1]["content"] == "ping");
    CHECK(seen_auth == "Bearer sk-fixture");

    auto vectors = provider.embed({ "a", "b" });
    REQUIRE(vectors.size() == 2);
    CHECK(vectors[0] == EmbeddingVector { 1.0f, 0.0f, 0.0f });
    CHECK(provider.dim() == 3);
}

TEST_CASE("http provider maps non-2xx to ProviderRejection with the status")
{
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_content("slow down", "text/plain");
    });
    OpenAiHttpProvider provider({ server.url(), "m", "e", "" });
    ChatRequest request;
    request.messages.push_back({ "user", "x" });
    try {
        provider.complete(request);
        FAIL("expected ProviderRejection");
    } catch (const ProviderRejection& e) {
        CHECK(e.status() == 429);
        CHECK(e.body().find("slow down") != std::string::npos);
    }
}

TEST_CASE("stalling http endpoint raises TimeoutExceeded at the request deadline")
{
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(400));
        res.set_content("{}", "application/json");
    });
    OpenAiHttpProvider provider({ server.url(), "m", "e", "" });
    ChatRequest request;
    request.timeout = std::chrono::milliseconds(50);
    request.messages.push_back({ "user", "x" });
    auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(provider.complete(request), TimeoutExceeded);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::milliseconds(350));
}

TEST_CASE("unreachable endpoint raises TransportError")
{
    // TEST-NET-1 address with a short connection timeout
    OpenAiHttpProvider provider({ "http://127.0.0.1:1", "m", "e", "" });
    ChatRequest request;
    request.timeout = std::chrono::milliseconds(500);
    request.messages.push_back({ "user", "x" });
    CHECK_THROWS_AS(provider.complete(request), Error);
}
