// SPDX-License-Identifier: Apache-2.0

#include <tmaint/llm.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace tmaint {

using nlohmann::json;

// ---- ScriptedChatProvider --------------------------------------------------

ChatResponse ScriptedChatProvider::complete(const ChatRequest& request)
{
    std::string response;
    {
        std::lock_guard lock(mutex_);
        transcript_.push_back(request);

        const std::string* matched = nullptr;
        if (!request.messages.empty()) {
            const std::string& last = request.messages.back().text;
            for (const auto& [pattern, reply] : rules_) {
                if (last.find(pattern) != std::string::npos) {
                    matched = &reply;
                    break;
                }
            }
        }
        if (matched) {
            response = *matched;
        } else {
            if (next_ >= queue_.size())
                throw ProviderRejection("scripted provider: script exhausted after "
                    + std::to_string(queue_.size()) + " responses");
            response = queue_[next_++];
        }
    }

    if (delay_.count() > 0) {
        if (delay_ > request.timeout) {
            std::this_thread::sleep_for(request.timeout);
            throw TimeoutExceeded("scripted provider stalled past "
                + std::to_string(request.timeout.count()) + " ms");
        }
        std::this_thread::sleep_for(delay_);
    }

    ChatResponse out;
    out.text = std::move(response);
    out.latency = delay_;
    return out;
}

// ---- HashEmbedder ----------------------------------------------------------

namespace {

    std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull)
    {
        std::uint64_t h = seed;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    std::vector<std::string> tokenize(const std::string& text)
    {
        std::vector<std::string> tokens;
        std::string current;
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        }
        if (!current.empty())
            tokens.push_back(std::move(current));
        return tokens;
    }

} // namespace

EmbeddingVector HashEmbedder::embed_one(const std::string& text) const
{
    EmbeddingVector v(dim_, 0.0f);
    auto tokens = tokenize(text);
    if (tokens.empty() && !text.empty())
        tokens.push_back(text); // punctuation-only input still gets a bucket

    auto add = [&](const std::string& feature) {
        std::uint64_t h = fnv1a(feature);
        std::size_t bucket = h % dim_;
        float sign = (h >> 63) ? -1.0f : 1.0f;
        v[bucket] += sign;
    };
    for (const auto& token : tokens)
        add(token);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        add(tokens[i] + " " + tokens[i + 1]);

    double norm = 0.0;
    for (float x : v)
        norm += static_cast<double>(x) * x;
    if (norm == 0.0 && !text.empty()) {
        // all contributions cancelled; fall back to a single whole-text bucket
        v[fnv1a(text, 14695981039346656037ull) % dim_] = 1.0f;
        norm = 1.0;
    }
    if (norm > 0.0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (float& x : v)
            x *= inv;
    }
    return v;
}

std::vector<EmbeddingVector> HashEmbedder::embed(const std::vector<std::string>& texts)
{
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts)
        out.push_back(embed_one(text));
    return out;
}

// ---- OpenAiHttpProvider ----------------------------------------------------

OpenAiHttpProvider::OpenAiHttpProvider(Options options)
    : options_(std::move(options))
{
    if (options_.base_url.empty())
        throw ConfigError("HTTP provider requires a base_url");
}

namespace {

    httplib::Headers auth_headers(const std::string& api_key_env)
    {
        httplib::Headers headers;
        if (!api_key_env.empty()) {
            const char* key = std::getenv(api_key_env.c_str());
            if (key && *key)
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        return headers;
    }

    void apply_timeout(httplib::Client& client, std::chrono::milliseconds timeout)
    {
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        auto rem = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_read_timeout(secs.count(), rem.count());
        client.set_write_timeout(secs.count(), rem.count());
        client.set_connection_timeout(secs.count(), rem.count());
    }

} // namespace

ChatResponse OpenAiHttpProvider::complete(const ChatRequest& request)
{
    httplib::Client client(options_.base_url);
    apply_timeout(client, request.timeout);

    json body;
    body["model"] = options_.chat_model;
    body["temperature"] = request.temperature;
    if (request.max_tokens)
        body["max_tokens"] = *request.max_tokens;
    json messages = json::array();
    if (!request.system_prompt.empty())
        messages.push_back({ { "role", "system" }, { "content", request.system_prompt } });
    for (const auto& m : request.messages)
        messages.push_back({ { "role", m.role }, { "content", m.text } });
    body["messages"] = messages;

    auto start = std::chrono::steady_clock::now();
    auto result = client.Post(options_.path_prefix + "/chat/completions", auth_headers(options_.api_key_env),
        body.dump(), "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    if (!result) {
        auto err = result.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
            || err == httplib::Error::Write)
            throw TimeoutExceeded("chat request exceeded " + std::to_string(request.timeout.count()) + " ms");
        throw TransportError("chat request failed: " + httplib::to_string(err));
    }
    if (result->status < 200 || result->status >= 300)
        throw ProviderRejection("chat endpoint returned status " + std::to_string(result->status),
            result->status, result->body.substr(0, 512));

    json parsed = json::parse(result->body);
    ChatResponse response;
    response.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    response.latency = elapsed;
    if (parsed.contains("usage")) {
        TokenUsage usage;
        usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
        usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        response.usage = usage;
    }
    return response;
}

std::vector<EmbeddingVector> OpenAiHttpProvider::embed(const std::vector<std::string>& texts)
{
    httplib::Client client(options_.base_url);
    apply_timeout(client, std::chrono::milliseconds(300'000));

    json body;
    body["model"] = options_.embedding_model;
    body["input"] = texts;

    auto result = client.Post(options_.path_prefix + "/embeddings", auth_headers(options_.api_key_env),
        body.dump(), "application/json");
    if (!result)
        throw TransportError("embedding request failed: " + httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300)
        throw ProviderRejection("embedding endpoint returned status " + std::to_string(result->status),
            result->status, result->body.substr(0, 512));

    json parsed = json::parse(result->body);
    std::vector<EmbeddingVector> out;
    for (const auto& entry : parsed.at("data"))
        out.push_back(entry.at("embedding").get<EmbeddingVector>());

    for (const auto& v : out) {
        if (dim_ == 0)
            dim_ = v.size();
        if (v.size() != dim_)
            throw DimensionMismatch("embedding dims inconsistent: got " + std::to_string(v.size())
                + ", expected " + std::to_string(dim_));
    }
    if (out.size() != texts.size())
        throw ProviderRejection("embedding endpoint returned " + std::to_string(out.size())
            + " vectors for " + std::to_string(texts.size()) + " inputs");
    return out;
}

std::string OpenAiHttpProvider::fingerprint() const
{
    return "openai:" + options_.chat_model + "+" + options_.embedding_model + "@" + options_.base_url;
}

} // namespace tmaint
