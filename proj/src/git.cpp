// SPDX-License-Identifier: Apache-2.0

#include <tmaint/git.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace tmaint {

namespace {

    std::string shell_quote(const std::string& arg)
    {
        std::string out = "'";
        for (char c : arg) {
            if (c == '\'')
                out += "'\\''";
            else
                out += c;
        }
        out += "'";
        return out;
    }

    // empty tree object, the diff base for root commits
    constexpr const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

} // namespace

GitRepo::GitRepo(std::string path)
    : path_(std::move(path))
{
    if (!std::filesystem::exists(path_))
        throw RepoAccessError("repository path does not exist: " + path_);
    if (!std::filesystem::exists(std::filesystem::path(path_) / ".git")
        && !std::filesystem::exists(std::filesystem::path(path_) / "HEAD"))
        throw RepoAccessError("not a git repository: " + path_);
}

std::string GitRepo::run(const std::vector<std::string>& args) const
{
    std::ostringstream cmd;
    cmd << "git -C " << shell_quote(path_);
    for (const auto& arg : args)
        cmd << ' ' << shell_quote(arg);
    cmd << " 2>&1";

    FILE* pipe = popen(cmd.str().c_str(), "r");
    if (!pipe)
        throw VcsInvocationError("failed to spawn git", -1, "");

    std::string output;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        output.append(buf.data(), n);

    int status = pclose(pipe);
    if (status != 0)
        throw VcsInvocationError("git " + (args.empty() ? "" : args[0]) + " failed", status, output);
    return output;
}

std::vector<std::string> GitRepo::rev_list(const std::string& from, const std::string& to) const
{
    std::vector<std::string> args { "rev-list", "--first-parent", "--reverse" };
    if (from.empty())
        args.push_back(to);
    else
        args.push_back(from + ".." + to);
    std::string out;
    try {
        out = run(args);
    } catch (const VcsInvocationError& e) {
        throw RepoAccessError("cannot list commits " + from + ".." + to + ": " + e.diagnostics());
    }
    std::vector<std::string> commits;
    std::istringstream stream(out);
    std::string line;
    while (std::getline(stream, line))
        if (!line.empty())
            commits.push_back(line);
    return commits;
}

std::string GitRepo::resolve(const std::string& rev) const
{
    try {
        std::string out = run({ "rev-parse", "--verify", rev + "^{commit}" });
        while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
            out.pop_back();
        return out;
    } catch (const VcsInvocationError& e) {
        throw RepoAccessError("cannot resolve revision " + rev + ": " + e.diagnostics());
    }
}

std::string GitRepo::first_parent(const std::string& commit) const
{
    std::string out = run({ "rev-list", "--parents", "-n", "1", commit });
    std::istringstream stream(out);
    std::string self, parent;
    stream >> self >> parent;
    return parent;
}

std::vector<std::string> GitRepo::list_files(const std::string& commit) const
{
    std::string out = run({ "ls-tree", "-r", "--name-only", commit });
    std::vector<std::string> files;
    std::istringstream stream(out);
    std::string line;
    while (std::getline(stream, line))
        if (!line.empty())
            files.push_back(line);
    return files;
}

std::string GitRepo::read_file(const std::string& commit, const std::string& file) const
{
    return run({ "show", commit + ":" + file });
}

bool GitRepo::file_exists(const std::string& commit, const std::string& file) const
{
    try {
        run({ "cat-file", "-e", commit + ":" + file });
        return true;
    } catch (const VcsInvocationError&) {
        return false;
    }
}

CommitDiff produce_diff(const GitRepo& repo, const std::string& commit_id, std::size_t context_lines)
{
    std::string commit = repo.resolve(commit_id);
    std::string parent = repo.first_parent(commit);
    if (parent.empty())
        parent = kEmptyTree;

    std::string text = repo.run({ "diff", "--no-color", "-U" + std::to_string(context_lines),
        parent, commit });

    CommitDiff diff = parse_unified_diff(text);
    diff.commit_id = commit;
    diff.context_lines = context_lines;
    return diff;
}

} // namespace tmaint
