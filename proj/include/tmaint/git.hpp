// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/diff.hpp>
#include <tmaint/errors.hpp>

#include <string>
#include <vector>

namespace tmaint {

// Read-only handle on a git repository; every operation shells out to git
// with explicit arguments, so concurrent calls for distinct commits are safe.
class GitRepo {
public:
    explicit GitRepo(std::string path);

    const std::string& path() const { return path_; }

    // first-parent commit ids, oldest first; range as in `git rev-list from..to`,
    // empty `from` means from the beginning of history
    std::vector<std::string> rev_list(const std::string& from, const std::string& to) const;

    std::string resolve(const std::string& rev) const;

    // parent of `commit` on the first-parent line; empty for root commits
    std::string first_parent(const std::string& commit) const;

    std::vector<std::string> list_files(const std::string& commit) const;

    std::string read_file(const std::string& commit, const std::string& file) const;

    bool file_exists(const std::string& commit, const std::string& file) const;

    // runs `git <args>` in the repo, throws VcsInvocationError on failure
    std::string run(const std::vector<std::string>& args) const;

private:
    std::string path_;
};

// Unified diff of parent..commit (root commits against the empty tree) with
// the requested context width; rename detection uses git defaults.
CommitDiff produce_diff(const GitRepo& repo, const std::string& commit_id, std::size_t context_lines);

} // namespace tmaint
