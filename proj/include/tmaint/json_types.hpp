// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/diff.hpp>
#include <tmaint/testcase.hpp>

#include <nlohmann/json.hpp>

namespace tmaint {

inline void to_json(nlohmann::json& j, const TestId& id)
{
    j = nlohmann::json { { "file", id.file_path }, { "container", id.container_name },
        { "method", id.method_name } };
}

inline void from_json(const nlohmann::json& j, TestId& id)
{
    j.at("file").get_to(id.file_path);
    j.at("container").get_to(id.container_name);
    j.at("method").get_to(id.method_name);
}

inline void to_json(nlohmann::json& j, const Hunk& hunk)
{
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& line : hunk.lines) {
        const char* tag = line.tag == LineTag::Context ? " " : (line.tag == LineTag::Added ? "+" : "-");
        lines.push_back(std::string(tag) + line.text);
    }
    j = nlohmann::json { { "old_start", hunk.old_start }, { "old_len", hunk.old_len },
        { "new_start", hunk.new_start }, { "new_len", hunk.new_len }, { "lines", lines } };
}

inline void from_json(const nlohmann::json& j, Hunk& hunk)
{
    j.at("old_start").get_to(hunk.old_start);
    j.at("old_len").get_to(hunk.old_len);
    j.at("new_start").get_to(hunk.new_start);
    j.at("new_len").get_to(hunk.new_len);
    hunk.lines.clear();
    for (const auto& entry : j.at("lines")) {
        std::string s = entry.get<std::string>();
        HunkLine line;
        line.tag = s.empty() || s[0] == ' ' ? LineTag::Context
                                            : (s[0] == '+' ? LineTag::Added : LineTag::Removed);
        line.text = s.empty() ? "" : s.substr(1);
        hunk.lines.push_back(std::move(line));
    }
}

inline void to_json(nlohmann::json& j, const CodeChange& change)
{
    j = nlohmann::json { { "commit", change.commit_id }, { "file", change.file_path },
        { "hunk", change.hunk }, { "rendered", change.rendered_text } };
}

inline void from_json(const nlohmann::json& j, CodeChange& change)
{
    j.at("commit").get_to(change.commit_id);
    j.at("file").get_to(change.file_path);
    j.at("hunk").get_to(change.hunk);
    j.at("rendered").get_to(change.rendered_text);
}

} // namespace tmaint
