// SPDX-License-Identifier: Apache-2.0

#include <tmaint/retrieval.hpp>

#include <tmaint/json_types.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace tmaint {

using nlohmann::json;

const char* to_string(IndexMode mode)
{
    return mode == IndexMode::RawCode ? "raw" : "summary";
}

IndexMode index_mode_from_string(const std::string& s)
{
    if (s == "raw")
        return IndexMode::RawCode;
    if (s == "summary")
        return IndexMode::Summary;
    throw ConfigError("unknown index mode '" + s + "' (expected raw or summary)");
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("cosine over vectors of dim " + std::to_string(a.size()) + " and "
            + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw ZeroVector("cosine undefined for the zero vector");
    double value = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(value, -1.0, 1.0);
}

VectorIndex build_index(const std::string& commit_id, IndexMode mode,
    const std::vector<TestCase>& tests, EmbeddingProvider& embedder, TestSummarizer summarizer)
{
    if (mode == IndexMode::Summary && !summarizer)
        throw ConfigError("Summary mode requires a summarizer");

    VectorIndex index;
    index.commit_id = commit_id;
    index.mode = mode;
    index.provider_fingerprint = embedder.fingerprint();

    std::vector<std::string> texts;
    texts.reserve(tests.size());
    std::vector<bool> fallbacks(tests.size(), false);
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const TestCase& tc = tests[i];
        if (mode == IndexMode::RawCode) {
            texts.push_back(tc.body);
            continue;
        }
        try {
            std::string summary = summarizer(tc);
            if (summary.empty())
                throw SummarizationFailure("empty summary");
            texts.push_back(std::move(summary));
        } catch (const Error& e) {
            index.warnings.push_back("summary failed for " + tc.id.to_string() + ": " + e.what()
                + "; indexed raw body instead");
            texts.push_back(tc.body);
            fallbacks[i] = true;
        }
    }

    std::vector<EmbeddingVector> vectors;
    if (!texts.empty()) {
        try {
            vectors = embedder.embed(texts);
        } catch (const Error& e) {
            // a partial index silently degrades recall, so abort instead
            throw EmbeddingFailure(std::string("index build aborted: ") + e.what());
        }
        if (vectors.size() != texts.size())
            throw EmbeddingFailure("embedder returned wrong vector count");
    }

    for (std::size_t i = 0; i < tests.size(); ++i) {
        IndexedDocument doc;
        doc.test_id = tests[i].id;
        doc.text = texts[i];
        doc.vector = vectors[i];
        doc.summary_fallback = fallbacks[i];
        index.documents.push_back(std::move(doc));
    }
    return index;
}

VectorIndex index_commit(const GitRepo& repo, const std::string& commit_id, IndexMode mode,
    const PathRules& rules, const TestConventions& conventions, EmbeddingProvider& embedder,
    TestSummarizer summarizer)
{
    std::string commit = repo.resolve(commit_id);
    std::vector<TestCase> tests;
    for (const auto& file : repo.list_files(commit)) {
        if (rules.classify(file) != PathClass::Test)
            continue;
        auto extracted = extract_test_cases(repo.read_file(commit, file), conventions, file);
        for (auto& tc : extracted.cases) {
            tc.commit_id = commit;
            tests.push_back(std::move(tc));
        }
    }
    std::sort(tests.begin(), tests.end(), [](const TestCase& a, const TestCase& b) { return a.id < b.id; });
    return build_index(commit, mode, tests, embedder, std::move(summarizer));
}

std::vector<RetrievalHit> retrieve_top_k(const VectorIndex& index, const std::string& query_text,
    std::size_t k, EmbeddingProvider& embedder)
{
    if (k == 0)
        throw ConfigError("retrieval k must be >= 1");
    if (index.documents.empty())
        return {};
    if (embedder.fingerprint() != index.provider_fingerprint)
        throw DimensionMismatch("index was built with provider '" + index.provider_fingerprint
            + "', queried with '" + embedder.fingerprint() + "'");

    EmbeddingVector query = embedder.embed({ query_text }).at(0);

    std::vector<RetrievalHit> hits;
    hits.reserve(index.documents.size());
    for (const auto& doc : index.documents)
        hits.push_back({ doc.test_id, cosine_similarity(query, doc.vector) });

    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.test_id < b.test_id;
    });
    if (hits.size() > k)
        hits.resize(k);
    return hits;
}

std::string index_cache_path(const std::string& cache_dir, const std::string& commit_id, IndexMode mode,
    const std::string& provider_fingerprint)
{
    // fingerprint may hold URL characters; hash it into the file name
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : provider_fingerprint) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char fp[17];
    snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(h));
    return (std::filesystem::path(cache_dir)
        / (commit_id + "." + to_string(mode) + "." + fp + ".index.json"))
        .string();
}

void save_index(const VectorIndex& index, const std::string& cache_dir)
{
    std::filesystem::create_directories(cache_dir);
    json docs = json::array();
    for (const auto& doc : index.documents) {
        docs.push_back({ { "id", doc.test_id }, { "text", doc.text }, { "vector", doc.vector },
            { "fallback", doc.summary_fallback } });
    }
    json j = { { "schema_version", 1 }, { "commit", index.commit_id },
        { "mode", to_string(index.mode) }, { "provider", index.provider_fingerprint },
        { "documents", docs } };
    std::string path = index_cache_path(cache_dir, index.commit_id, index.mode, index.provider_fingerprint);
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write index file: " + path);
    out << j.dump();
}

VectorIndex load_index(const std::string& cache_dir, const std::string& commit_id, IndexMode mode,
    const std::string& provider_fingerprint)
{
    std::string path = index_cache_path(cache_dir, commit_id, mode, provider_fingerprint);
    std::ifstream in(path);
    if (!in)
        throw Error("no cached index at " + path);
    json j = json::parse(in);
    if (j.value("schema_version", 0) != 1)
        throw SchemaVersionMismatch("unsupported index schema in " + path);

    VectorIndex index;
    index.commit_id = j.at("commit").get<std::string>();
    index.mode = index_mode_from_string(j.at("mode").get<std::string>());
    index.provider_fingerprint = j.at("provider").get<std::string>();
    for (const auto& entry : j.at("documents")) {
        IndexedDocument doc;
        doc.test_id = entry.at("id").get<TestId>();
        doc.text = entry.at("text").get<std::string>();
        doc.vector = entry.at("vector").get<EmbeddingVector>();
        doc.summary_fallback = entry.value("fallback", false);
        index.documents.push_back(std::move(doc));
    }
    return index;
}

} // namespace tmaint
