// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/errors.hpp>

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tmaint {

struct ChatMessage {
    std::string role; // "user" | "assistant" | "system"
    std::string text;
};

struct ChatRequest {
    std::string system_prompt;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::chrono::milliseconds timeout { 300'000 };
    std::optional<int> max_tokens;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    std::optional<TokenUsage> usage;
    std::chrono::milliseconds latency { 0 };
};

using EmbeddingVector = std::vector<float>;

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    // Never retries on its own; retry policy belongs to callers.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string fingerprint() const = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string fingerprint() const = 0;
};

// Deterministic replay provider for tests. Responses come either from
// pattern rules (substring of the last user message; not consumed) or from
// a FIFO queue. Every request is recorded verbatim.
class ScriptedChatProvider : public ChatProvider {
public:
    ScriptedChatProvider() = default;
    explicit ScriptedChatProvider(std::vector<std::string> queue)
        : queue_(std::move(queue))
    {
    }

    void push(std::string response) { queue_.push_back(std::move(response)); }
    void add_rule(std::string pattern, std::string response)
    {
        rules_.emplace_back(std::move(pattern), std::move(response));
    }
    // injected latency for timeout tests; applies to every subsequent call
    void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

    ChatResponse complete(const ChatRequest& request) override;
    std::string fingerprint() const override { return "scripted"; }

    const std::vector<ChatRequest>& transcript() const { return transcript_; }
    std::size_t calls() const { return transcript_.size(); }

private:
    std::vector<std::string> queue_;
    std::size_t next_ = 0;
    std::vector<std::pair<std::string, std::string>> rules_;
    std::vector<ChatRequest> transcript_;
    std::chrono::milliseconds delay_ { 0 };
    std::mutex mutex_;
};

// Embeds token/bigram hashes into a fixed-dim bag-of-hashes vector, then
// L2-normalizes. Referentially transparent, no model required.
class HashEmbedder : public EmbeddingProvider {
public:
    explicit HashEmbedder(std::size_t dim = 256)
        : dim_(dim)
    {
    }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override { return "hash-embedder/" + std::to_string(dim_); }

private:
    EmbeddingVector embed_one(const std::string& text) const;
    std::size_t dim_;
};

// OpenAI-compatible HTTP backend for chat completions and embeddings.
// Credential is read from the named environment variable at call time.
class OpenAiHttpProvider : public ChatProvider, public EmbeddingProvider {
public:
    struct Options {
        std::string base_url;   // e.g. "http://localhost:8000"
        std::string chat_model;
        std::string embedding_model;
        std::string api_key_env; // name of the env var holding the key; empty: no auth header
        std::string path_prefix = "/v1";
    };

    explicit OpenAiHttpProvider(Options options);

    ChatResponse complete(const ChatRequest& request) override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override;

private:
    Options options_;
    std::size_t dim_ = 0; // learned from the first embedding response
};

} // namespace tmaint
