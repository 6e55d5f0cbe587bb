// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/errors.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace tmaint {

inline constexpr const char* kNullPath = "/dev/null";

enum class LineTag { Context, Added, Removed };

struct HunkLine {
    LineTag tag;
    std::string text; // without the leading ' ', '+' or '-'

    bool operator==(const HunkLine&) const = default;
};

struct Hunk {
    std::size_t old_start = 1;
    std::size_t old_len = 0;
    std::size_t new_start = 1;
    std::size_t new_len = 0;
    std::vector<HunkLine> lines;

    bool operator==(const Hunk&) const = default;
};

enum class FileKind { Modified, Added, Deleted, Renamed };

struct FileDiff {
    std::string old_path;
    std::string new_path;
    FileKind kind = FileKind::Modified;
    std::vector<Hunk> hunks;
    bool textual = true;

    // Path identifying the file after the change (old_path for deletions).
    const std::string& effective_path() const
    {
        return new_path == kNullPath ? old_path : new_path;
    }

    bool operator==(const FileDiff&) const = default;
};

struct CommitDiff {
    std::string commit_id;
    std::vector<FileDiff> file_diffs;
    std::size_t context_lines = 3;

    bool operator==(const CommitDiff&) const = default;
};

struct CodeChange {
    std::string commit_id;
    std::string file_path;
    Hunk hunk;
    std::string rendered_text; // single-hunk unified diff with headers

    bool operator==(const CodeChange&) const = default;
};

enum class PathClass { Source, Test, Other };

// Ordered glob rules; first match wins, Other is the fallback.
// '*' and '?' do not cross '/', '**' does.
class PathRules {
public:
    PathRules() = default;
    // patterns validated eagerly; throws InvalidPattern
    PathRules(std::vector<std::pair<std::string, PathClass>> rules);

    static PathRules java_defaults();

    PathClass classify(const std::string& path) const;

    const std::vector<std::pair<std::string, PathClass>>& rules() const { return rules_; }

    // Stable digest of the rule list, recorded in dataset manifests.
    std::string digest() const;

private:
    std::vector<std::pair<std::string, PathClass>> rules_;
};

bool glob_match(const std::string& pattern, const std::string& path);

CommitDiff parse_unified_diff(const std::string& text);

std::string render_diff(const CommitDiff& diff);
std::string render_hunk(const FileDiff& file, const Hunk& hunk);

std::vector<CodeChange> split_changes(const CommitDiff& diff, const PathRules& rules);

PathClass classify_path(const std::string& path, const PathRules& rules);

const char* to_string(PathClass c);
const char* to_string(FileKind k);

} // namespace tmaint
