// SPDX-License-Identifier: Apache-2.0

#include <tmaint/config.hpp>

#include "support/fixture_repo.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

using namespace tmaint;
using namespace tmaint::testing;

namespace {

std::string write_config(const TempDir& dir, const std::string& content)
{
    auto path = (dir.path() / "config.json").string();
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("defaults survive an empty config object")
{
    TempDir dir;
    Config config = load_config(write_config(dir, "{}"));
    CHECK(config.context_lines == 9);
    CHECK(config.retrieval_k == 10);
    CHECK(config.max_iterations == 3);
    CHECK(config.per_prompt_timeout == std::chrono::milliseconds(300'000));
    CHECK(config.mode == IndexMode::RawCode);
    CHECK(config.provider.kind == "openai");
    CHECK(config.embedder.kind == "hash");
    CHECK(config.embedder.dim == 256);
}

TEST_CASE("values load and ${VAR} interpolates from the environment")
{
    TempDir dir;
    setenv("TMAINT_TEST_BASE", "http://model-host:9000", 1);
    unsetenv("TMAINT_TEST_UNSET");
    Config config = load_config(write_config(dir, R"({
        "repo": "/work/project",
        "context_lines": 5,
        "retrieval_k": 4,
        "mode": "summary",
        "per_prompt_timeout_s": 30,
        "provider": {
            "kind": "openai",
            "base_url": "${TMAINT_TEST_BASE}/api",
            "chat_model": "m${TMAINT_TEST_UNSET}",
            "api_key_env": "MY_KEY"
        }
    })"));
    CHECK(config.repo == "/work/project");
    CHECK(config.context_lines == 5);
    CHECK(config.retrieval_k == 4);
    CHECK(config.mode == IndexMode::Summary);
    CHECK(config.per_prompt_timeout == std::chrono::seconds(30));
    CHECK(config.provider.base_url == "http://model-host:9000/api");
    CHECK(config.provider.chat_model == "m"); // unset vars interpolate to empty
    CHECK(config.provider.api_key_env == "MY_KEY");
}

TEST_CASE("path rules and test conventions are configurable")
{
    TempDir dir;
    Config config = load_config(write_config(dir, R"({
        "path_rules": [
            {"pattern": "tests/**", "class": "test"},
            {"pattern": "lib/**", "class": "source"}
        ],
        "test_conventions": {
            "annotations": ["@UnitTest"],
            "prefixes": ["check"]
        }
    })"));
    CHECK(config.path_rules.classify("tests/a/b.java") == PathClass::Test);
    CHECK(config.path_rules.classify("lib/x.java") == PathClass::Source);
    CHECK(config.path_rules.classify("other/x.java") == PathClass::Other);
    CHECK(config.conventions.annotation_tokens == std::vector<std::string> { "@UnitTest" });
    CHECK(config.conventions.name_prefixes == std::vector<std::string> { "check" });
}

TEST_CASE("invalid configs are rejected with ConfigError")
{
    TempDir dir;
    CHECK_THROWS_AS(load_config((dir.path() / "missing.json").string()), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, "not json {")), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, R"({"max_iterations": 0})")), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, R"({"retrieval_k": 0})")), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, R"({"per_prompt_timeout_s": 0})")), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, R"({"mode": "vector"})")), ConfigError);
    CHECK_THROWS_AS(load_config(write_config(dir, R"({"context_lines": "nine"})")), ConfigError);
    CHECK_THROWS_AS(
        load_config(write_config(dir, R"({"path_rules": [{"pattern": "x", "class": "spec"}]})")),
        ConfigError);
    CHECK_THROWS_AS(
        load_config(write_config(dir, R"({"path_rules": [{"pattern": "a/***", "class": "test"}]})")),
        InvalidPattern);
}

TEST_CASE("provider and embedder factories honor the configured kind")
{
    Config config;
    config.provider.kind = "scripted";
    config.provider.script = { "canned reply" };
    auto chat = make_chat_provider(config);
    ChatRequest request;
    request.messages.push_back({ "user", "x" });
    CHECK(chat->complete(request).text == "canned reply");

    config.embedder.kind = "hash";
    config.embedder.dim = 64;
    auto embedder = make_embedding_provider(config);
    CHECK(embedder->dim() == 64);
    CHECK(embedder->fingerprint() == "hash-embedder/64");

    config.provider.kind = "telepathy";
    CHECK_THROWS_AS(make_chat_provider(config), ConfigError);
    config.embedder.kind = "telepathy";
    CHECK_THROWS_AS(make_embedding_provider(config), ConfigError);
}

TEST_CASE("openai kind without a base_url fails fast")
{
    Config config;
    config.provider.kind = "openai";
    CHECK_THROWS_AS(make_chat_provider(config), ConfigError);
}
