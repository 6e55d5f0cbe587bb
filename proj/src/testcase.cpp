// SPDX-License-Identifier: Apache-2.0

#include <tmaint/testcase.hpp>

#include <cctype>
#include <regex>
#include <sstream>

namespace tmaint {

namespace {

    const std::regex kContainerDecl(R"(\b(?:class|interface|enum|record)\s+([A-Za-z_]\w*))");
    const std::regex kMethodSig(R"(([A-Za-z_]\w*)\s*\()");

    const char* kControlKeywords[] = { "if", "for", "while", "switch", "catch", "return",
        "new", "synchronized", "assert", "throw", "super", "this" };

    bool is_control_keyword(const std::string& name)
    {
        for (const char* kw : kControlKeywords)
            if (name == kw)
                return true;
        return false;
    }

    // strips // comments, /* */ comments and the contents of string/char
    // literals, so brace counting is not fooled; `in_block` carries the
    // block-comment state across lines
    std::string strip_noise(const std::string& line, bool& in_block)
    {
        std::string out;
        out.reserve(line.size());
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (in_block) {
                if (line[i] == '*' && i + 1 < line.size() && line[i + 1] == '/') {
                    in_block = false;
                    ++i;
                }
                continue;
            }
            char c = line[i];
            if (c == '/' && i + 1 < line.size() && line[i + 1] == '/')
                break;
            if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
                in_block = true;
                ++i;
                continue;
            }
            if (c == '"' || c == '\'') {
                char quote = c;
                out += quote;
                ++i;
                while (i < line.size()) {
                    if (line[i] == '\\')
                        ++i;
                    else if (line[i] == quote)
                        break;
                    ++i;
                }
                out += quote;
                continue;
            }
            out += c;
        }
        return out;
    }

    bool contains_token(const std::string& line, const std::string& token)
    {
        std::size_t pos = line.find(token);
        while (pos != std::string::npos) {
            std::size_t end = pos + token.size();
            bool boundary = end >= line.size()
                || !(std::isalnum(static_cast<unsigned char>(line[end])) || line[end] == '_');
            if (boundary)
                return true;
            pos = line.find(token, end);
        }
        return false;
    }

    bool has_prefix(const std::string& name, const std::string& prefix)
    {
        return name.size() > prefix.size() && name.rfind(prefix, 0) == 0;
    }

} // namespace

ExtractionResult extract_test_cases(const std::string& file_text, const TestConventions& conventions,
    const std::string& file_path)
{
    ExtractionResult result;

    std::vector<std::string> raw_lines;
    {
        std::istringstream stream(file_text);
        std::string line;
        while (std::getline(stream, line))
            raw_lines.push_back(line);
    }

    struct Container {
        std::string name;
        int depth_at_open;
    };
    std::vector<Container> containers;
    std::string pending_container;

    bool in_block_comment = false;
    int depth = 0;

    bool pending_annotation = false;
    std::size_t annotation_line = 0;

    bool in_method = false;
    bool is_test_method = false;
    int method_entry_depth = 0;
    std::size_t method_start = 0;
    std::string method_name;

    // a signature seen but whose '{' has not appeared yet
    bool awaiting_body = false;

    auto container_path = [&]() {
        std::string path;
        for (const auto& c : containers) {
            if (!path.empty())
                path += '.';
            path += c.name;
        }
        return path;
    };

    auto emit = [&](std::size_t end_line) {
        TestCase tc;
        tc.id = { file_path, container_path(), method_name };
        tc.start_line = method_start;
        tc.end_line = end_line;
        std::string body;
        for (std::size_t l = method_start; l <= end_line && l <= raw_lines.size(); ++l) {
            body += raw_lines[l - 1];
            body += '\n';
        }
        tc.body = std::move(body);
        result.cases.push_back(std::move(tc));
    };

    for (std::size_t i = 0; i < raw_lines.size(); ++i) {
        std::size_t lineno = i + 1;
        std::string line = strip_noise(raw_lines[i], in_block_comment);

        std::smatch m;
        if (!in_method && std::regex_search(line, m, kContainerDecl))
            pending_container = m[1];

        if (!in_method && !awaiting_body) {
            bool annotated_here = false;
            for (const auto& token : conventions.annotation_tokens) {
                if (contains_token(line, token)) {
                    if (!pending_annotation) {
                        pending_annotation = true;
                        annotation_line = lineno;
                    }
                    annotated_here = true;
                    break;
                }
            }
            if (!annotated_here && std::regex_search(line, m, kMethodSig) && !is_control_keyword(m[1])
                && line.find('=') == std::string::npos && line.find(';') == std::string::npos) {
                std::string name = m[1];
                bool prefixed = false;
                for (const auto& prefix : conventions.name_prefixes)
                    if (has_prefix(name, prefix))
                        prefixed = true;
                if (pending_annotation || prefixed) {
                    method_name = name;
                    method_start = pending_annotation ? annotation_line : lineno;
                    is_test_method = true;
                    awaiting_body = true;
                }
                pending_annotation = false;
            } else if (!annotated_here && pending_annotation && line.find(';') != std::string::npos) {
                // annotation followed by a field or abstract declaration
                pending_annotation = false;
            }
        }

        for (char c : line) {
            if (c == '{') {
                if (!pending_container.empty()) {
                    containers.push_back({ pending_container, depth });
                    pending_container.clear();
                } else if (awaiting_body) {
                    in_method = true;
                    awaiting_body = false;
                    method_entry_depth = depth;
                }
                ++depth;
            } else if (c == '}') {
                --depth;
                if (in_method && depth == method_entry_depth) {
                    if (is_test_method)
                        emit(lineno);
                    in_method = false;
                    is_test_method = false;
                }
                while (!containers.empty() && depth <= containers.back().depth_at_open)
                    containers.pop_back();
            } else if (c == ';' && awaiting_body) {
                // abstract/interface method, no body
                awaiting_body = false;
                is_test_method = false;
            }
        }
    }

    if (in_method || awaiting_body) {
        result.warnings.push_back("unbalanced braces at end of file"
            + (file_path.empty() ? std::string {} : ": " + file_path)
            + " (method " + method_name + " dropped)");
    }

    return result;
}

} // namespace tmaint
