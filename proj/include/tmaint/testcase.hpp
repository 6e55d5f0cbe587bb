// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <string>
#include <vector>

namespace tmaint {

struct TestId {
    std::string file_path;
    std::string container_name;
    std::string method_name;

    auto operator<=>(const TestId&) const = default;

    std::string to_string() const
    {
        return file_path + "::" + container_name + "::" + method_name;
    }
};

struct TestCase {
    TestId id;
    std::string body;
    std::size_t start_line = 0; // 1-based, inclusive
    std::size_t end_line = 0;   // 1-based, inclusive
    std::string commit_id;

    bool overlaps(std::size_t lo, std::size_t hi) const
    {
        return start_line <= hi && lo <= end_line;
    }
};

// What marks a method as a test, and how to bound its body.
struct TestConventions {
    std::vector<std::string> annotation_tokens { "@Test" };
    std::vector<std::string> name_prefixes { "test" };

    static TestConventions java_defaults() { return {}; }
};

struct ExtractionResult {
    std::vector<TestCase> cases;
    std::vector<std::string> warnings;
};

// Brace-balanced span extraction of test methods from a Java-like source file.
// A method is a test if it is preceded by a configured annotation token or its
// name carries a configured prefix. Never throws; parse trouble lands in
// warnings and the affected method is dropped.
ExtractionResult extract_test_cases(const std::string& file_text, const TestConventions& conventions,
    const std::string& file_path = {});

} // namespace tmaint
