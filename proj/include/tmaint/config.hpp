// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/diff.hpp>
#include <tmaint/llm.hpp>
#include <tmaint/retrieval.hpp>
#include <tmaint/testcase.hpp>

#include <chrono>
#include <memory>
#include <string>
#include <vector>

namespace tmaint {

struct ProviderConfig {
    std::string kind = "openai"; // "openai" | "scripted"
    std::string base_url;
    std::string chat_model;
    std::string embedding_model;
    std::string api_key_env;
    std::vector<std::string> script; // canned responses for the scripted kind
};

struct EmbedderConfig {
    std::string kind = "hash"; // "hash" | "openai"
    std::size_t dim = 256;
};

struct Config {
    std::string repo = ".";
    std::size_t context_lines = 9;
    std::size_t retrieval_k = 10;
    IndexMode mode = IndexMode::RawCode;
    int max_iterations = 3;
    std::chrono::milliseconds per_prompt_timeout { 300'000 };
    int parallelism = 1;
    int verbosity = 1;
    bool include_diff_in_decision = true;
    std::string cache_dir = ".tmaint-cache";

    PathRules path_rules = PathRules::java_defaults();
    TestConventions conventions = TestConventions::java_defaults();
    ProviderConfig provider;
    EmbedderConfig embedder;
};

// Loads a JSON config file; "${VAR}" in string values is replaced with the
// environment variable's value. Throws ConfigError on invalid content.
Config load_config(const std::string& path);

std::shared_ptr<ChatProvider> make_chat_provider(const Config& config);
std::shared_ptr<EmbeddingProvider> make_embedding_provider(const Config& config);

} // namespace tmaint
