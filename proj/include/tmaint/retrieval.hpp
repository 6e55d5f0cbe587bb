// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/dataset.hpp>
#include <tmaint/llm.hpp>
#include <tmaint/testcase.hpp>

#include <functional>
#include <string>
#include <vector>

namespace tmaint {

enum class IndexMode { RawCode, Summary };

const char* to_string(IndexMode mode);
IndexMode index_mode_from_string(const std::string& s);

struct IndexedDocument {
    TestId test_id;
    std::string text; // raw body or natural language summary
    EmbeddingVector vector;
    bool summary_fallback = false; // Summary mode doc that fell back to raw body
};

// Exact flat index over one commit's test universe; immutable once built.
struct VectorIndex {
    std::string commit_id;
    IndexMode mode = IndexMode::RawCode;
    std::vector<IndexedDocument> documents;
    std::string provider_fingerprint;
    std::vector<std::string> warnings;

    bool contains(const TestId& id) const
    {
        for (const auto& doc : documents)
            if (doc.test_id == id)
                return true;
        return false;
    }
};

struct RetrievalHit {
    TestId test_id;
    double score;
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Summarizer takes a test case and returns a natural language summary.
using TestSummarizer = std::function<std::string(const TestCase&)>;

// Index every test in the commit's universe. Summary mode requires a
// summarizer; a summarization failure for one test falls back to the raw
// body with a warning, while an embedding failure aborts the whole build.
VectorIndex index_commit(const GitRepo& repo, const std::string& commit_id, IndexMode mode,
    const PathRules& rules, const TestConventions& conventions, EmbeddingProvider& embedder,
    TestSummarizer summarizer = {});

// Same, but over an already-extracted list of test cases.
VectorIndex build_index(const std::string& commit_id, IndexMode mode,
    const std::vector<TestCase>& tests, EmbeddingProvider& embedder, TestSummarizer summarizer = {});

// Descending cosine score, ties broken by TestId lexicographic order;
// returns min(k, |index|) hits.
std::vector<RetrievalHit> retrieve_top_k(const VectorIndex& index, const std::string& query_text,
    std::size_t k, EmbeddingProvider& embedder);

void save_index(const VectorIndex& index, const std::string& cache_dir);
VectorIndex load_index(const std::string& cache_dir, const std::string& commit_id, IndexMode mode,
    const std::string& provider_fingerprint);
std::string index_cache_path(const std::string& cache_dir, const std::string& commit_id, IndexMode mode,
    const std::string& provider_fingerprint);

} // namespace tmaint
