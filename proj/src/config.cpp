// SPDX-License-Identifier: Apache-2.0

#include <tmaint/config.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

namespace tmaint {

using nlohmann::json;

namespace {

    std::string interpolate_env(const std::string& value)
    {
        std::string out;
        std::size_t pos = 0;
        while (pos < value.size()) {
            std::size_t open = value.find("${", pos);
            if (open == std::string::npos) {
                out += value.substr(pos);
                break;
            }
            std::size_t close = value.find('}', open);
            if (close == std::string::npos) {
                out += value.substr(pos);
                break;
            }
            out += value.substr(pos, open - pos);
            std::string var = value.substr(open + 2, close - open - 2);
            const char* env = std::getenv(var.c_str());
            if (env)
                out += env;
            pos = close + 1;
        }
        return out;
    }

    void interpolate(json& j)
    {
        if (j.is_string())
            j = interpolate_env(j.get<std::string>());
        else if (j.is_object() || j.is_array())
            for (auto& child : j)
                interpolate(child);
    }

    PathClass path_class_from_string(const std::string& s)
    {
        if (s == "source")
            return PathClass::Source;
        if (s == "test")
            return PathClass::Test;
        if (s == "other")
            return PathClass::Other;
        throw ConfigError("unknown path class '" + s + "'");
    }

} // namespace

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file: " + path);

    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    interpolate(j);

    Config config;
    try {
        config.repo = j.value("repo", config.repo);
        config.context_lines = j.value("context_lines", config.context_lines);
        config.retrieval_k = j.value("retrieval_k", config.retrieval_k);
        if (j.contains("mode"))
            config.mode = index_mode_from_string(j["mode"].get<std::string>());
        config.max_iterations = j.value("max_iterations", config.max_iterations);
        if (j.contains("per_prompt_timeout_s"))
            config.per_prompt_timeout = std::chrono::seconds(j["per_prompt_timeout_s"].get<long>());
        config.parallelism = j.value("parallelism", config.parallelism);
        config.verbosity = j.value("verbosity", config.verbosity);
        config.include_diff_in_decision = j.value("include_diff_in_decision", config.include_diff_in_decision);
        config.cache_dir = j.value("cache_dir", config.cache_dir);

        if (j.contains("path_rules")) {
            std::vector<std::pair<std::string, PathClass>> rules;
            for (const auto& entry : j["path_rules"])
                rules.emplace_back(entry.at("pattern").get<std::string>(),
                    path_class_from_string(entry.at("class").get<std::string>()));
            config.path_rules = PathRules(std::move(rules));
        }
        if (j.contains("test_conventions")) {
            const auto& tc = j["test_conventions"];
            if (tc.contains("annotations"))
                config.conventions.annotation_tokens = tc["annotations"].get<std::vector<std::string>>();
            if (tc.contains("prefixes"))
                config.conventions.name_prefixes = tc["prefixes"].get<std::vector<std::string>>();
        }
        if (j.contains("provider")) {
            const auto& p = j["provider"];
            config.provider.kind = p.value("kind", config.provider.kind);
            config.provider.base_url = p.value("base_url", "");
            config.provider.chat_model = p.value("chat_model", "");
            config.provider.embedding_model = p.value("embedding_model", "");
            config.provider.api_key_env = p.value("api_key_env", "");
            if (p.contains("script"))
                config.provider.script = p["script"].get<std::vector<std::string>>();
        }
        if (j.contains("embedder")) {
            const auto& e = j["embedder"];
            config.embedder.kind = e.value("kind", config.embedder.kind);
            config.embedder.dim = e.value("dim", config.embedder.dim);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }

    if (config.max_iterations < 1)
        throw ConfigError("max_iterations must be >= 1");
    if (config.per_prompt_timeout.count() <= 0)
        throw ConfigError("per_prompt_timeout_s must be positive");
    if (config.retrieval_k < 1)
        throw ConfigError("retrieval_k must be >= 1");

    return config;
}

std::shared_ptr<ChatProvider> make_chat_provider(const Config& config)
{
    if (config.provider.kind == "scripted") {
        auto provider = std::make_shared<ScriptedChatProvider>();
        for (const auto& response : config.provider.script)
            provider->push(response);
        return provider;
    }
    if (config.provider.kind == "openai") {
        OpenAiHttpProvider::Options options;
        options.base_url = config.provider.base_url;
        options.chat_model = config.provider.chat_model;
        options.embedding_model = config.provider.embedding_model;
        options.api_key_env = config.provider.api_key_env;
        return std::make_shared<OpenAiHttpProvider>(options);
    }
    throw ConfigError("unknown provider kind '" + config.provider.kind + "'");
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(const Config& config)
{
    if (config.embedder.kind == "hash")
        return std::make_shared<HashEmbedder>(config.embedder.dim);
    if (config.embedder.kind == "openai") {
        OpenAiHttpProvider::Options options;
        options.base_url = config.provider.base_url;
        options.chat_model = config.provider.chat_model;
        options.embedding_model = config.provider.embedding_model;
        options.api_key_env = config.provider.api_key_env;
        return std::make_shared<OpenAiHttpProvider>(options);
    }
    throw ConfigError("unknown embedder kind '" + config.embedder.kind + "'");
}

} // namespace tmaint
