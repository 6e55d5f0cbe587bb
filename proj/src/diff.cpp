// SPDX-License-Identifier: Apache-2.0

#include <tmaint/diff.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

namespace tmaint {

namespace {

    std::vector<std::string> split_lines(const std::string& text)
    {
        std::vector<std::string> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) {
                lines.push_back(text.substr(pos));
                break;
            }
            lines.push_back(text.substr(pos, nl - pos));
            pos = nl + 1;
        }
        return lines;
    }

    bool starts_with(const std::string& s, const char* prefix)
    {
        return s.rfind(prefix, 0) == 0;
    }

    // "a/path" -> "path"; "/dev/null" passes through
    std::string strip_prefix(const std::string& p)
    {
        if (p == kNullPath)
            return p;
        if (p.size() > 2 && (p[0] == 'a' || p[0] == 'b') && p[1] == '/')
            return p.substr(2);
        return p;
    }

    // parses "start[,len]" of a hunk range
    bool parse_range(std::string_view s, std::size_t& start, std::size_t& len)
    {
        std::size_t comma = s.find(',');
        std::string_view first = comma == std::string_view::npos ? s : s.substr(0, comma);
        auto r = std::from_chars(first.data(), first.data() + first.size(), start);
        if (r.ec != std::errc {} || r.ptr != first.data() + first.size())
            return false;
        if (comma == std::string_view::npos) {
            len = 1;
            return true;
        }
        std::string_view second = s.substr(comma + 1);
        r = std::from_chars(second.data(), second.data() + second.size(), len);
        return r.ec == std::errc {} && r.ptr == second.data() + second.size();
    }

    // "@@ -1,2 +1,3 @@ optional section heading"
    bool parse_hunk_header(const std::string& line, Hunk& hunk)
    {
        if (!starts_with(line, "@@ -"))
            return false;
        std::size_t close = line.find(" @@", 4);
        if (close == std::string::npos)
            return false;
        std::string_view ranges(line.data() + 4, close - 4);
        std::size_t plus = ranges.find(" +");
        if (plus == std::string_view::npos)
            return false;
        return parse_range(ranges.substr(0, plus), hunk.old_start, hunk.old_len)
            && parse_range(ranges.substr(plus + 2), hunk.new_start, hunk.new_len);
    }

    void check_hunk_counts(const Hunk& hunk, std::size_t header_line)
    {
        std::size_t old_count = 0;
        std::size_t new_count = 0;
        for (const auto& l : hunk.lines) {
            if (l.tag != LineTag::Added)
                ++old_count;
            if (l.tag != LineTag::Removed)
                ++new_count;
        }
        if (old_count != hunk.old_len || new_count != hunk.new_len)
            throw MalformedDiff("hunk body disagrees with header counts", header_line);
    }

} // namespace

CommitDiff parse_unified_diff(const std::string& text)
{
    CommitDiff diff;
    auto lines = split_lines(text);

    FileDiff* current = nullptr;
    std::size_t i = 0;

    auto begin_file = [&]() -> FileDiff* {
        diff.file_diffs.emplace_back();
        return &diff.file_diffs.back();
    };

    while (i < lines.size()) {
        const std::string& line = lines[i];

        if (starts_with(line, "diff --git ")) {
            current = begin_file();
            // paths confirmed by ---/+++ or rename headers below
            std::istringstream header(line.substr(11));
            std::string a, b;
            header >> a >> b;
            current->old_path = strip_prefix(a);
            current->new_path = strip_prefix(b);
            ++i;
            continue;
        }
        if (starts_with(line, "Binary files ") || starts_with(line, "GIT binary patch")) {
            if (!current)
                current = begin_file();
            current->textual = false;
            ++i;
            continue;
        }
        if (starts_with(line, "new file mode")) {
            if (current)
                current->kind = FileKind::Added;
            ++i;
            continue;
        }
        if (starts_with(line, "deleted file mode")) {
            if (current)
                current->kind = FileKind::Deleted;
            ++i;
            continue;
        }
        if (starts_with(line, "rename from ")) {
            if (current) {
                current->kind = FileKind::Renamed;
                current->old_path = line.substr(12);
            }
            ++i;
            continue;
        }
        if (starts_with(line, "rename to ")) {
            if (current)
                current->new_path = line.substr(10);
            ++i;
            continue;
        }
        if (starts_with(line, "--- ")) {
            // bare unified diff (no "diff --git" header)
            if (!current || !current->hunks.empty())
                current = begin_file();
            current->old_path = strip_prefix(line.substr(4));
            if (i + 1 < lines.size() && starts_with(lines[i + 1], "+++ ")) {
                current->new_path = strip_prefix(lines[i + 1].substr(4));
                ++i;
            }
            if (current->old_path == kNullPath)
                current->kind = FileKind::Added;
            else if (current->new_path == kNullPath)
                current->kind = FileKind::Deleted;
            ++i;
            continue;
        }
        if (starts_with(line, "@@ -")) {
            if (!current)
                throw MalformedDiff("hunk header before any file header", i + 1);
            Hunk hunk;
            if (!parse_hunk_header(line, hunk))
                throw MalformedDiff("unparseable hunk header: " + line, i + 1);
            std::size_t header_line = i + 1;
            std::size_t old_count = 0;
            std::size_t new_count = 0;
            ++i;
            while (i < lines.size()) {
                if (old_count >= hunk.old_len && new_count >= hunk.new_len)
                    break;
                const std::string& body = lines[i];
                if (starts_with(body, "\\ No newline")) {
                    ++i;
                    continue;
                }
                if (body.empty()) {
                    // git renders an empty context line as a single space,
                    // but tolerate fully empty lines from lenient sources
                    hunk.lines.push_back({ LineTag::Context, "" });
                    ++old_count;
                    ++new_count;
                    ++i;
                    continue;
                }
                char tag = body[0];
                if (tag == ' ') {
                    hunk.lines.push_back({ LineTag::Context, body.substr(1) });
                    ++old_count;
                    ++new_count;
                } else if (tag == '+') {
                    hunk.lines.push_back({ LineTag::Added, body.substr(1) });
                    ++new_count;
                } else if (tag == '-') {
                    hunk.lines.push_back({ LineTag::Removed, body.substr(1) });
                    ++old_count;
                } else {
                    break;
                }
                ++i;
            }
            check_hunk_counts(hunk, header_line);
            current->hunks.push_back(std::move(hunk));
            continue;
        }
        // index lines, mode lines, similarity scores, commit headers: skip
        ++i;
    }

    return diff;
}

std::string render_hunk(const FileDiff& file, const Hunk& hunk)
{
    std::ostringstream out;
    out << "--- " << (file.old_path == kNullPath ? std::string(kNullPath) : "a/" + file.old_path) << '\n';
    out << "+++ " << (file.new_path == kNullPath ? std::string(kNullPath) : "b/" + file.new_path) << '\n';
    out << "@@ -" << hunk.old_start << ',' << hunk.old_len
        << " +" << hunk.new_start << ',' << hunk.new_len << " @@\n";
    for (const auto& line : hunk.lines) {
        char tag = line.tag == LineTag::Context ? ' ' : (line.tag == LineTag::Added ? '+' : '-');
        out << tag << line.text << '\n';
    }
    return out.str();
}

std::string render_diff(const CommitDiff& diff)
{
    std::ostringstream out;
    for (const auto& file : diff.file_diffs) {
        std::string a = file.old_path == kNullPath ? file.new_path : file.old_path;
        std::string b = file.new_path == kNullPath ? file.old_path : file.new_path;
        out << "diff --git a/" << a << " b/" << b << '\n';
        switch (file.kind) {
        case FileKind::Added:
            out << "new file mode 100644\n";
            break;
        case FileKind::Deleted:
            out << "deleted file mode 100644\n";
            break;
        case FileKind::Renamed:
            out << "rename from " << file.old_path << '\n'
                << "rename to " << file.new_path << '\n';
            break;
        case FileKind::Modified:
            break;
        }
        if (!file.textual) {
            out << "Binary files a/" << a << " and b/" << b << " differ\n";
            continue;
        }
        if (file.hunks.empty())
            continue;
        out << "--- " << (file.old_path == kNullPath ? std::string(kNullPath) : "a/" + file.old_path) << '\n';
        out << "+++ " << (file.new_path == kNullPath ? std::string(kNullPath) : "b/" + file.new_path) << '\n';
        for (const auto& hunk : file.hunks) {
            out << "@@ -" << hunk.old_start << ',' << hunk.old_len
                << " +" << hunk.new_start << ',' << hunk.new_len << " @@\n";
            for (const auto& line : hunk.lines) {
                char tag = line.tag == LineTag::Context ? ' ' : (line.tag == LineTag::Added ? '+' : '-');
                out << tag << line.text << '\n';
            }
        }
    }
    return out.str();
}

bool glob_match(const std::string& pattern, const std::string& path)
{
    // recursive matcher; '**' crosses '/', '*' and '?' do not
    std::function<bool(std::size_t, std::size_t)> match = [&](std::size_t p, std::size_t s) -> bool {
        while (p < pattern.size()) {
            if (pattern[p] == '*' && p + 1 < pattern.size() && pattern[p + 1] == '*') {
                std::size_t next = p + 2;
                // collapse "**/" so it also matches zero directories
                if (next < pattern.size() && pattern[next] == '/') {
                    if (match(next + 1, s))
                        return true;
                    ++next;
                }
                for (std::size_t k = s; k <= path.size(); ++k)
                    if (match(p + 2, k))
                        return true;
                return false;
            }
            if (pattern[p] == '*') {
                for (std::size_t k = s; k <= path.size(); ++k) {
                    if (k > s && path[k - 1] == '/')
                        return false;
                    if (match(p + 1, k))
                        return true;
                }
                return false;
            }
            if (s >= path.size())
                return false;
            if (pattern[p] == '?') {
                if (path[s] == '/')
                    return false;
            } else if (pattern[p] != path[s]) {
                return false;
            }
            ++p;
            ++s;
        }
        return s == path.size();
    };
    return match(0, 0);
}

PathRules::PathRules(std::vector<std::pair<std::string, PathClass>> rules)
    : rules_(std::move(rules))
{
    for (const auto& [pattern, cls] : rules_) {
        if (pattern.empty())
            throw InvalidPattern("empty glob pattern");
        if (pattern.find("***") != std::string::npos)
            throw InvalidPattern("invalid glob pattern: " + pattern);
    }
}

PathRules PathRules::java_defaults()
{
    return PathRules({
        { "**/src/test/**", PathClass::Test },
        { "**/*Test.java", PathClass::Test },
        { "**/*Tests.java", PathClass::Test },
        { "**/*TestCase.java", PathClass::Test },
        { "**/test/**", PathClass::Test },
        { "**/*.java", PathClass::Source },
    });
}

PathClass PathRules::classify(const std::string& path) const
{
    for (const auto& [pattern, cls] : rules_)
        if (glob_match(pattern, path))
            return cls;
    return PathClass::Other;
}

std::string PathRules::digest() const
{
    // FNV-1a over the rule list; stable across runs and platforms
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& [pattern, cls] : rules_) {
        mix(pattern);
        mix(to_string(cls));
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PathClass classify_path(const std::string& path, const PathRules& rules)
{
    return rules.classify(path);
}

std::vector<CodeChange> split_changes(const CommitDiff& diff, const PathRules& rules)
{
    std::vector<CodeChange> changes;
    for (const auto& file : diff.file_diffs) {
        if (!file.textual)
            continue;
        if (rules.classify(file.effective_path()) != PathClass::Source)
            continue;
        for (const auto& hunk : file.hunks) {
            CodeChange change;
            change.commit_id = diff.commit_id;
            change.file_path = file.effective_path();
            change.hunk = hunk;
            change.rendered_text = render_hunk(file, hunk);
            changes.push_back(std::move(change));
        }
    }
    return changes;
}

const char* to_string(PathClass c)
{
    switch (c) {
    case PathClass::Source:
        return "source";
    case PathClass::Test:
        return "test";
    case PathClass::Other:
        return "other";
    }
    return "other";
}

const char* to_string(FileKind k)
{
    switch (k) {
    case FileKind::Modified:
        return "modified";
    case FileKind::Added:
        return "added";
    case FileKind::Deleted:
        return "deleted";
    case FileKind::Renamed:
        return "renamed";
    }
    return "modified";
}

} // namespace tmaint
