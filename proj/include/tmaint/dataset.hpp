// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/diff.hpp>
#include <tmaint/git.hpp>
#include <tmaint/testcase.hpp>

#include <set>
#include <string>
#include <vector>

namespace tmaint {

enum class CommitSubset { Changed, Unchanged };

struct CommitRecord {
    std::string commit_id;
    std::vector<CodeChange> changes;
    std::set<TestId> ground_truth; // tests co-updated with the source changes
    std::set<TestId> universe;     // all tests present at this commit
    CommitSubset subset = CommitSubset::Unchanged;

    bool operator==(const CommitRecord&) const = default;
};

struct DatasetManifest {
    int schema_version = 1;
    std::string repo;
    std::string range_from;
    std::string range_to;
    std::size_t context_lines = 9;
    std::string path_rules_digest;
    bool first_parent = true;
    bool added_tests_count = true; // tests added in the commit count as ground truth

    std::size_t commits = 0;
    std::size_t changes = 0;
    std::size_t changed_commits = 0;
    std::size_t unchanged_commits = 0;
    double mean_changes_changed = 0.0;
    double mean_changes_unchanged = 0.0;

    bool operator==(const DatasetManifest&) const = default;
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<CommitRecord> records;
    std::vector<std::string> warnings; // mining diagnostics, not serialized

    bool operator==(const Dataset& other) const
    {
        return manifest == other.manifest && records == other.records;
    }
};

struct MiningOptions {
    std::size_t context_lines = 9;
    std::string range_from; // empty: start of history
    std::string range_to = "HEAD";
};

// Recomputes the count fields of `manifest` from `records`.
void refresh_manifest_counts(DatasetManifest& manifest, const std::vector<CommitRecord>& records);

Dataset build_dataset(const GitRepo& repo, const MiningOptions& options, const PathRules& rules,
    const TestConventions& conventions);

void serialize_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace tmaint
