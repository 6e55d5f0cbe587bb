// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/diff.hpp>
#include <tmaint/llm.hpp>
#include <tmaint/retrieval.hpp>
#include <tmaint/testcase.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace tmaint {

struct ToolBinding {
    std::string name;
    std::string description;
    std::function<std::string(const std::string&)> invoke;
};

struct AgentSpec {
    std::string name;
    std::string role_prompt;
    std::vector<ToolBinding> tools;
    int max_iterations = 3;
    std::chrono::milliseconds per_prompt_timeout { 300'000 };
};

struct ReactAction {
    std::string tool_name;
    std::string tool_input;
};

struct ReactStep {
    std::string thought;
    std::optional<ReactAction> action; // empty for a FinalAnswer step
    std::string observation;           // empty for a FinalAnswer step
};

enum class ReactOutcome { Answered, IterationLimit, Timeout };

struct AgentTranscript {
    std::string agent_name;
    std::vector<ReactStep> steps;
    int reminders_issued = 0;
    ReactOutcome outcome = ReactOutcome::Answered;

    // model calls made during the run, reminders included
    int consumed_iterations() const { return static_cast<int>(steps.size()) + reminders_issued; }
};

class ReactIterationLimit : public Error {
public:
    ReactIterationLimit(const std::string& what, AgentTranscript transcript)
        : Error(what)
        , transcript_(std::move(transcript))
    {
    }
    const AgentTranscript& transcript() const { return transcript_; }

private:
    AgentTranscript transcript_;
};

class ReactTimeout : public Error {
public:
    ReactTimeout(const std::string& what, AgentTranscript transcript)
        : Error(what)
        , transcript_(std::move(transcript))
    {
    }
    const AgentTranscript& transcript() const { return transcript_; }

private:
    AgentTranscript transcript_;
};

struct ReactResult {
    std::string answer;
    AgentTranscript transcript;
};

// Thought-Action-Observation loop. A model reply carrying "Action:" invokes
// the named tool and feeds the result back as an observation; "Final Answer:"
// (or plain prose with neither marker) terminates the run. Unparseable output
// costs an iteration and triggers a format reminder. Tool execution failures
// surface as observations, never abort the run.
ReactResult run_react(const AgentSpec& spec, const std::string& input, ChatProvider& provider);

struct ChangeSummary {
    std::string commit_id;
    std::string file_path;
    std::string text;
};

struct MaintenanceDecision {
    bool needed = false;
    std::string explanation;
};

enum class Stance { NeedsUpdate, ShouldReview, SuggestNew };

const char* to_string(Stance stance);

struct TestSuggestion {
    std::optional<TestId> test_id; // absent for SuggestNew and general review advice
    std::string rationale;
    Stance stance = Stance::NeedsUpdate;
    std::string confidence_phrase;
};

struct Prediction {
    std::string commit_id;
    std::string file_path;
    MaintenanceDecision decision;
    std::vector<TestSuggestion> suggestions;
    std::vector<AgentTranscript> transcripts;
    std::vector<std::string> warnings; // e.g. suggested names absent from the universe
    std::string final_text;
};

class PipelineFailure : public Error {
public:
    PipelineFailure(const std::string& stage, const std::string& what,
        std::vector<AgentTranscript> transcripts)
        : Error(stage + ": " + what)
        , stage_(stage)
        , transcripts_(std::move(transcripts))
    {
    }
    const std::string& stage() const { return stage_; }
    const std::vector<AgentTranscript>& transcripts() const { return transcripts_; }

private:
    std::string stage_;
    std::vector<AgentTranscript> transcripts_;
};

struct PredictOptions {
    int max_iterations = 3;
    std::chrono::milliseconds per_prompt_timeout { 300'000 };
    std::size_t retrieval_k = 10;
    bool include_diff_in_decision = true;
    int verbosity = 1; // 0 terse, 1 normal
    std::ostream* trace = nullptr;
};

struct SummarizeResult {
    ChangeSummary summary;
    AgentTranscript transcript;
};

struct DecideResult {
    MaintenanceDecision decision;
    AgentTranscript transcript;
};

struct LocalizeResult {
    std::vector<TestSuggestion> suggestions;
    std::vector<std::string> unmatched;
    std::string answer_text;
    AgentTranscript transcript;
};

SummarizeResult summarize_change(const CodeChange& change, ChatProvider& provider,
    const PredictOptions& options = {});

// One-shot natural language summary of a test case, for Summary-mode indexing.
std::string summarize_test_case(const TestCase& test, ChatProvider& provider,
    const PredictOptions& options = {});

DecideResult decide_maintenance(const ChangeSummary& summary, ChatProvider& provider,
    const PredictOptions& options = {}, const std::string& rendered_diff = {});

LocalizeResult localize_tests(const CodeChange& change, const ChangeSummary& summary,
    const VectorIndex& index, ChatProvider& provider, EmbeddingProvider& embedder,
    const PredictOptions& options = {});

struct NameExtraction {
    std::vector<TestId> matched;
    std::vector<std::string> unmatched;
};

// Harvests backtick-quoted and "name()" identifiers plus enumerated list
// items from an agent answer and resolves them against the test universe by
// method name (exact match first, then unique case-insensitive match).
NameExtraction extract_test_names(const std::string& answer_text, const std::set<TestId>& universe);

// Maps the answer's phrasing onto a stance via a fixed phrase-priority table.
Stance classify_stance(const std::string& text);

// The planning protocol: summarize, decide, and when maintenance is needed,
// localize and assemble a final response. Each sub-agent gets at most one
// re-invocation when its output is empty or unparseable.
Prediction predict(const CodeChange& change, const VectorIndex& index, ChatProvider& provider,
    EmbeddingProvider& embedder, const PredictOptions& options = {});

void to_json(nlohmann::json& j, const Prediction& prediction);
void print_transcript(std::ostream& out, const AgentTranscript& transcript);

} // namespace tmaint
