// SPDX-License-Identifier: Apache-2.0

#include <tmaint/testcase.hpp>

#include <doctest.h>

using namespace tmaint;

TEST_CASE("two annotated methods are extracted with names and spans")
{
    std::string file = "package app;\n"
                       "import org.junit.Test;\n"
                       "public class CalcTest {\n"
                       "    @Test\n"
                       "    public void addsNumbers() {\n"
                       "        assertEquals(3, add(1, 2));\n"
                       "    }\n"
                       "\n"
                       "    @Test\n"
                       "    public void subtractsNumbers() {\n"
                       "        assertEquals(1, sub(3, 2));\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "CalcTest.java");
    REQUIRE(result.cases.size() == 2);
    CHECK(result.warnings.empty());

    CHECK(result.cases[0].id.method_name == "addsNumbers");
    CHECK(result.cases[0].id.container_name == "CalcTest");
    CHECK(result.cases[0].id.file_path == "CalcTest.java");
    CHECK(result.cases[0].start_line == 4); // includes the annotation line
    CHECK(result.cases[0].end_line == 7);

    CHECK(result.cases[1].id.method_name == "subtractsNumbers");
    CHECK(result.cases[1].start_line == 9);
    CHECK(result.cases[1].end_line == 12);
    CHECK(result.cases[1].body.find("sub(3, 2)") != std::string::npos);
}

TEST_CASE("name-prefix convention catches un-annotated test methods")
{
    std::string file = "public class T {\n"
                       "    public void testThing() {\n"
                       "        check();\n"
                       "    }\n"
                       "    public void helper() {\n"
                       "        noop();\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "T.java");
    REQUIRE(result.cases.size() == 1);
    CHECK(result.cases[0].id.method_name == "testThing");
}

TEST_CASE("file with only helper methods yields no test cases")
{
    std::string file = "public class Util {\n"
                       "    public int square(int x) {\n"
                       "        return x * x;\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "Util.java");
    CHECK(result.cases.empty());
    CHECK(result.warnings.empty());
}

TEST_CASE("brace-unbalanced test method at EOF produces a warning and no case")
{
    std::string file = "public class T {\n"
                       "    @Test\n"
                       "    public void testBroken() {\n"
                       "        if (x) {\n"
                       "            doIt();\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "T.java");
    CHECK(result.cases.empty());
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("unbalanced") != std::string::npos);
}

TEST_CASE("braces inside strings and comments do not fool the span tracker")
{
    std::string file = "public class T {\n"
                       "    @Test\n"
                       "    public void testQuotes() {\n"
                       "        String s = \"{{{\"; // }}} imbalance bait\n"
                       "        /* { */ check(s);\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "T.java");
    REQUIRE(result.cases.size() == 1);
    CHECK(result.cases[0].end_line == 6);
}

TEST_CASE("annotation on a field does not leak onto the next method")
{
    std::string file = "public class T {\n"
                       "    @Test // misuse, but seen in the wild\n"
                       "    private int counter = 0;\n"
                       "    public void plainHelper() {\n"
                       "        counter++;\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "T.java");
    CHECK(result.cases.empty());
}

TEST_CASE("nested container names are joined")
{
    std::string file = "public class Outer {\n"
                       "    public static class Inner {\n"
                       "        @Test\n"
                       "        public void testDeep() {\n"
                       "            ok();\n"
                       "        }\n"
                       "    }\n"
                       "}\n";
    auto result = extract_test_cases(file, TestConventions::java_defaults(), "O.java");
    REQUIRE(result.cases.size() == 1);
    CHECK(result.cases[0].id.container_name == "Outer.Inner");
}
