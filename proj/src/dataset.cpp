// SPDX-License-Identifier: Apache-2.0

#include <tmaint/dataset.hpp>

#include <tmaint/json_types.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>

namespace tmaint {

using nlohmann::json;

namespace {

    // positions of edited (non-context) lines, in new-file and old-file coordinates
    struct EditedLines {
        std::vector<std::size_t> new_positions;
        std::vector<std::size_t> old_positions;
    };

    EditedLines edited_lines(const Hunk& hunk)
    {
        EditedLines out;
        std::size_t old_line = hunk.old_start;
        std::size_t new_line = hunk.new_start;
        for (const auto& line : hunk.lines) {
            switch (line.tag) {
            case LineTag::Context:
                ++old_line;
                ++new_line;
                break;
            case LineTag::Added:
                out.new_positions.push_back(new_line);
                ++new_line;
                break;
            case LineTag::Removed:
                out.old_positions.push_back(old_line);
                ++old_line;
                break;
            }
        }
        return out;
    }

    bool any_within(const std::vector<std::size_t>& positions, std::size_t lo, std::size_t hi)
    {
        for (std::size_t p : positions)
            if (p >= lo && p <= hi)
                return true;
        return false;
    }

} // namespace

void refresh_manifest_counts(DatasetManifest& manifest, const std::vector<CommitRecord>& records)
{
    manifest.commits = records.size();
    manifest.changes = 0;
    manifest.changed_commits = 0;
    manifest.unchanged_commits = 0;
    std::size_t changed_changes = 0;
    std::size_t unchanged_changes = 0;
    for (const auto& record : records) {
        manifest.changes += record.changes.size();
        if (record.subset == CommitSubset::Changed) {
            ++manifest.changed_commits;
            changed_changes += record.changes.size();
        } else {
            ++manifest.unchanged_commits;
            unchanged_changes += record.changes.size();
        }
    }
    manifest.mean_changes_changed = manifest.changed_commits
        ? static_cast<double>(changed_changes) / static_cast<double>(manifest.changed_commits)
        : 0.0;
    manifest.mean_changes_unchanged = manifest.unchanged_commits
        ? static_cast<double>(unchanged_changes) / static_cast<double>(manifest.unchanged_commits)
        : 0.0;
}

Dataset build_dataset(const GitRepo& repo, const MiningOptions& options, const PathRules& rules,
    const TestConventions& conventions)
{
    Dataset dataset;
    dataset.manifest.repo = repo.path();
    dataset.manifest.range_from = options.range_from;
    dataset.manifest.range_to = options.range_to;
    dataset.manifest.context_lines = options.context_lines;
    dataset.manifest.path_rules_digest = rules.digest();

    auto commits = repo.rev_list(options.range_from, options.range_to);
    if (commits.empty())
        throw EmptyDataset("commit range is empty: " + options.range_from + ".." + options.range_to);

    for (const auto& commit : commits) {
        CommitDiff diff = produce_diff(repo, commit, options.context_lines);
        auto changes = split_changes(diff, rules);
        if (changes.empty())
            continue; // no source changes in this commit

        CommitRecord record;
        record.commit_id = commit;
        record.changes = std::move(changes);

        // test universe at this commit
        std::map<std::string, std::vector<TestCase>> tests_by_file;
        for (const auto& file : repo.list_files(commit)) {
            if (rules.classify(file) != PathClass::Test)
                continue;
            auto extracted = extract_test_cases(repo.read_file(commit, file), conventions, file);
            for (auto& warning : extracted.warnings)
                dataset.warnings.push_back(commit.substr(0, 12) + ": " + warning);
            for (auto& tc : extracted.cases) {
                tc.commit_id = commit;
                record.universe.insert(tc.id);
                tests_by_file[file].push_back(std::move(tc));
            }
        }

        // ground truth: tests whose span the commit's test hunks actually edit
        std::string parent = repo.first_parent(commit);
        for (const auto& file : diff.file_diffs) {
            if (!file.textual || rules.classify(file.effective_path()) != PathClass::Test)
                continue;

            const auto* new_tests = [&]() -> const std::vector<TestCase>* {
                auto it = tests_by_file.find(file.effective_path());
                return it == tests_by_file.end() ? nullptr : &it->second;
            }();

            std::vector<TestCase> old_tests;
            if (!parent.empty() && file.old_path != kNullPath && repo.file_exists(parent, file.old_path)) {
                auto extracted = extract_test_cases(repo.read_file(parent, file.old_path), conventions,
                    file.effective_path());
                old_tests = std::move(extracted.cases);
            }

            for (const auto& hunk : file.hunks) {
                EditedLines edited = edited_lines(hunk);
                if (new_tests)
                    for (const auto& tc : *new_tests)
                        if (any_within(edited.new_positions, tc.start_line, tc.end_line))
                            record.ground_truth.insert(tc.id);
                for (const auto& tc : old_tests)
                    if (any_within(edited.old_positions, tc.start_line, tc.end_line)
                        && record.universe.count(tc.id))
                        record.ground_truth.insert(tc.id);
            }
        }

        record.subset = record.ground_truth.empty() ? CommitSubset::Unchanged : CommitSubset::Changed;
        dataset.records.push_back(std::move(record));
    }

    if (dataset.records.empty())
        throw EmptyDataset("all commits excluded; check path rules and range");

    refresh_manifest_counts(dataset.manifest, dataset.records);
    return dataset;
}

// ---- serialization ---------------------------------------------------------

static void to_json(json& j, const CommitRecord& record)
{
    j = json { { "commit", record.commit_id }, { "changes", record.changes },
        { "ground_truth", record.ground_truth }, { "universe", record.universe },
        { "subset", record.subset == CommitSubset::Changed ? "changed" : "unchanged" } };
}

static void from_json(const json& j, CommitRecord& record)
{
    j.at("commit").get_to(record.commit_id);
    j.at("changes").get_to(record.changes);
    for (const auto& entry : j.at("ground_truth"))
        record.ground_truth.insert(entry.get<TestId>());
    for (const auto& entry : j.at("universe"))
        record.universe.insert(entry.get<TestId>());
    record.subset = j.at("subset").get<std::string>() == "changed" ? CommitSubset::Changed
                                                                   : CommitSubset::Unchanged;
}

static void to_json(json& j, const DatasetManifest& m)
{
    j = json { { "schema_version", m.schema_version }, { "repo", m.repo },
        { "range_from", m.range_from }, { "range_to", m.range_to },
        { "context_lines", m.context_lines }, { "path_rules_digest", m.path_rules_digest },
        { "first_parent", m.first_parent }, { "added_tests_count", m.added_tests_count },
        { "commits", m.commits }, { "changes", m.changes },
        { "changed_commits", m.changed_commits }, { "unchanged_commits", m.unchanged_commits },
        { "mean_changes_changed", m.mean_changes_changed },
        { "mean_changes_unchanged", m.mean_changes_unchanged } };
}

static void from_json(const json& j, DatasetManifest& m)
{
    j.at("schema_version").get_to(m.schema_version);
    j.at("repo").get_to(m.repo);
    j.at("range_from").get_to(m.range_from);
    j.at("range_to").get_to(m.range_to);
    j.at("context_lines").get_to(m.context_lines);
    j.at("path_rules_digest").get_to(m.path_rules_digest);
    j.at("first_parent").get_to(m.first_parent);
    j.at("added_tests_count").get_to(m.added_tests_count);
    j.at("commits").get_to(m.commits);
    j.at("changes").get_to(m.changes);
    j.at("changed_commits").get_to(m.changed_commits);
    j.at("unchanged_commits").get_to(m.unchanged_commits);
    j.at("mean_changes_changed").get_to(m.mean_changes_changed);
    j.at("mean_changes_unchanged").get_to(m.mean_changes_unchanged);
}

void serialize_dataset(const Dataset& dataset, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write dataset file: " + path);
    json manifest_line = json { { "kind", "manifest" }, { "manifest", dataset.manifest } };
    out << manifest_line.dump() << '\n';
    for (const auto& record : dataset.records) {
        json record_line = json { { "kind", "record" }, { "record", record } };
        out << record_line.dump() << '\n';
    }
}

Dataset load_dataset(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read dataset file: " + path);

    Dataset dataset;
    std::string line;
    bool have_manifest = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, true);
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "manifest") {
            dataset.manifest = j.at("manifest").get<DatasetManifest>();
            if (dataset.manifest.schema_version != 1)
                throw SchemaVersionMismatch("unsupported dataset schema version "
                    + std::to_string(dataset.manifest.schema_version));
            have_manifest = true;
        } else if (kind == "record") {
            dataset.records.push_back(j.at("record").get<CommitRecord>());
        } else {
            throw Error("unknown record kind '" + kind + "' at line " + std::to_string(lineno));
        }
    }
    if (!have_manifest)
        throw SchemaVersionMismatch("dataset file has no manifest record");

    DatasetManifest check = dataset.manifest;
    refresh_manifest_counts(check, dataset.records);
    if (!(check == dataset.manifest))
        throw ManifestMismatch("manifest counts disagree with records in " + path);

    return dataset;
}

} // namespace tmaint
