// SPDX-License-Identifier: Apache-2.0

#include <tmaint/agents.hpp>

#include <tmaint/json_types.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <sstream>

namespace tmaint {

using nlohmann::json;

namespace {

    std::string trim(const std::string& s)
    {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::string lowercase(const std::string& s)
    {
        std::string out = s;
        std::transform(out.begin(), out.end(), out.begin(),
            [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    // marker must start a line (ignoring leading whitespace)
    std::size_t find_marker(const std::string& text, const std::string& marker)
    {
        std::size_t pos = 0;
        while ((pos = text.find(marker, pos)) != std::string::npos) {
            std::size_t line_start = text.rfind('\n', pos);
            line_start = line_start == std::string::npos ? 0 : line_start + 1;
            bool leading_ws_only = true;
            for (std::size_t i = line_start; i < pos; ++i)
                if (text[i] != ' ' && text[i] != '\t') {
                    leading_ws_only = false;
                    break;
                }
            if (leading_ws_only)
                return pos;
            pos += marker.size();
        }
        return std::string::npos;
    }

    struct ParsedReply {
        enum class Kind { Final, Action, Malformed } kind = Kind::Malformed;
        std::string thought;
        std::string final_answer;
        std::string tool_name;
        std::string tool_input;
    };

    ParsedReply parse_reply(const std::string& text, const std::vector<ToolBinding>& tools)
    {
        ParsedReply reply;
        std::string trimmed = trim(text);
        if (trimmed.empty())
            return reply;

        std::size_t final_pos = find_marker(text, "Final Answer:");
        std::size_t action_pos = find_marker(text, "Action:");

        auto extract_thought = [&](std::size_t stop) {
            std::string head = text.substr(0, stop);
            std::size_t t = find_marker(head, "Thought:");
            if (t != std::string::npos)
                head = head.substr(t + 8);
            return trim(head);
        };

        if (final_pos != std::string::npos && (action_pos == std::string::npos || final_pos < action_pos)) {
            reply.kind = ParsedReply::Kind::Final;
            reply.thought = extract_thought(final_pos);
            reply.final_answer = trim(text.substr(final_pos + 13));
            if (reply.final_answer.empty())
                reply.kind = ParsedReply::Kind::Malformed;
            return reply;
        }

        if (action_pos != std::string::npos) {
            std::size_t name_end = text.find('\n', action_pos);
            std::string name = trim(text.substr(action_pos + 7,
                (name_end == std::string::npos ? text.size() : name_end) - action_pos - 7));
            std::size_t input_pos = find_marker(text, "Action Input:");
            std::string input = input_pos == std::string::npos ? "" : trim(text.substr(input_pos + 13));

            bool known = std::any_of(tools.begin(), tools.end(),
                [&](const ToolBinding& t) { return t.name == name; });
            if (name.empty() || !known)
                return reply; // unknown tool is a format failure, not a tool failure

            reply.kind = ParsedReply::Kind::Action;
            reply.thought = extract_thought(action_pos);
            reply.tool_name = name;
            reply.tool_input = input;
            return reply;
        }

        // lenient path: plain prose with neither marker counts as the answer
        reply.kind = ParsedReply::Kind::Final;
        reply.final_answer = trimmed;
        return reply;
    }

    std::string format_instructions(const std::vector<ToolBinding>& tools)
    {
        std::ostringstream out;
        out << "\n\nAnswer using this format:\n"
               "Thought: your reasoning\n";
        if (!tools.empty()) {
            out << "Action: <tool name>\n"
                   "Action Input: <input for the tool>\n"
                   "(the tool result arrives as an Observation; repeat Thought/Action as needed)\n"
                   "Available tools:\n";
            for (const auto& tool : tools)
                out << "- " << tool.name << ": " << tool.description << '\n';
        }
        out << "When done, reply with:\n"
               "Final Answer: <your answer>\n";
        return out.str();
    }

    std::string reminder_message(const std::vector<ToolBinding>& tools)
    {
        std::string msg = "Your previous reply did not follow the required format. "
                          "Reply either with\n"
                          "Thought: ...\nFinal Answer: ...\n";
        if (!tools.empty()) {
            msg += "or with\nThought: ...\nAction: <one of:";
            for (const auto& tool : tools)
                msg += " " + tool.name;
            msg += ">\nAction Input: ...\n";
        }
        return msg;
    }

} // namespace

ReactResult run_react(const AgentSpec& spec, const std::string& input, ChatProvider& provider)
{
    AgentTranscript transcript;
    transcript.agent_name = spec.name;

    ChatRequest request;
    request.system_prompt = spec.role_prompt + format_instructions(spec.tools);
    request.timeout = spec.per_prompt_timeout;
    request.messages.push_back({ "user", input });

    while (true) {
        if (transcript.consumed_iterations() >= spec.max_iterations) {
            transcript.outcome = ReactOutcome::IterationLimit;
            throw ReactIterationLimit(spec.name + ": no final answer within "
                    + std::to_string(spec.max_iterations) + " iterations",
                transcript);
        }

        ChatResponse response;
        try {
            response = provider.complete(request);
        } catch (const TimeoutExceeded& e) {
            transcript.outcome = ReactOutcome::Timeout;
            throw ReactTimeout(spec.name + ": " + e.what(), transcript);
        }

        ParsedReply reply = parse_reply(response.text, spec.tools);
        switch (reply.kind) {
        case ParsedReply::Kind::Malformed: {
            ++transcript.reminders_issued;
            if (transcript.consumed_iterations() >= spec.max_iterations) {
                transcript.outcome = ReactOutcome::IterationLimit;
                throw ReactIterationLimit(spec.name + ": no final answer within "
                        + std::to_string(spec.max_iterations) + " iterations",
                    transcript);
            }
            request.messages.push_back({ "assistant", response.text });
            request.messages.push_back({ "user", reminder_message(spec.tools) });
            break;
        }
        case ParsedReply::Kind::Final: {
            ReactStep step;
            step.thought = reply.thought;
            transcript.steps.push_back(step);
            transcript.outcome = ReactOutcome::Answered;
            return { reply.final_answer, std::move(transcript) };
        }
        case ParsedReply::Kind::Action: {
            const ToolBinding* tool = nullptr;
            for (const auto& t : spec.tools)
                if (t.name == reply.tool_name)
                    tool = &t;
            std::string observation;
            try {
                observation = tool->invoke(reply.tool_input);
            } catch (const std::exception& e) {
                observation = std::string("tool '") + reply.tool_name + "' failed: " + e.what();
            }
            ReactStep step;
            step.thought = reply.thought;
            step.action = ReactAction { reply.tool_name, reply.tool_input };
            step.observation = observation;
            transcript.steps.push_back(std::move(step));
            request.messages.push_back({ "assistant", response.text });
            request.messages.push_back({ "user", "Observation: " + observation });
            break;
        }
        }
    }
}

// ---- pipeline stages -------------------------------------------------------

namespace {

    const char* kSummarizerRole = "You are a code summarizer for a software maintenance tool. "
        "You receive one code change in unified git diff format. Describe in plain language: "
        "which classes, methods or configuration entries the change touches, what kind of change "
        "it is (signature, behavior, formatting, configuration, documentation), and its likely "
        "behavioral impact on callers. Be brief and factual.";

    const char* kDecisionRole = "You judge whether a source code change requires test maintenance "
        "(updating, adding or removing test cases). You receive a natural language summary of the "
        "change";

    const char* kLocalizerRole = "You are a test localization assistant. Given a source code change, "
        "its summary, and a list of candidate test cases retrieved from the project's test suite, "
        "identify which test cases need to be updated because of the change. Refer to test cases by "
        "their method name in backticks, e.g. `testSomething()`. For each, state briefly why. If no "
        "listed test is affected, say so; you may recommend reviewing related tests or creating new "
        "ones. Be brief.";

} // namespace

SummarizeResult summarize_change(const CodeChange& change, ChatProvider& provider,
    const PredictOptions& options)
{
    AgentSpec spec;
    spec.name = "code-summarizer";
    spec.role_prompt = kSummarizerRole;
    spec.max_iterations = options.max_iterations;
    spec.per_prompt_timeout = options.per_prompt_timeout;

    if (change.rendered_text.empty())
        throw SummarizationFailure("change has no rendered diff text");

    auto [answer, transcript] = run_react(spec, "Summarize this code change:\n\n" + change.rendered_text,
        provider);
    if (trim(answer).empty())
        throw SummarizationFailure("summarizer produced an empty summary");

    ChangeSummary summary;
    summary.commit_id = change.commit_id;
    summary.file_path = change.file_path;
    summary.text = trim(answer);
    return { std::move(summary), std::move(transcript) };
}

std::string summarize_test_case(const TestCase& test, ChatProvider& provider,
    const PredictOptions& options)
{
    ChatRequest request;
    request.system_prompt = "Summarize in one or two sentences what this test case verifies: the "
                            "behavior under test, notable inputs, and the expected outcome.";
    request.timeout = options.per_prompt_timeout;
    request.messages.push_back({ "user", "Test `" + test.id.method_name + "` in "
            + test.id.container_name + ":\n" + test.body });
    ChatResponse response = provider.complete(request);
    std::string text = trim(response.text);
    if (text.empty())
        throw SummarizationFailure("empty summary for test " + test.id.to_string());
    return text;
}

namespace {

    // first standalone YES or NO wins
    std::optional<bool> parse_verdict(const std::string& text)
    {
        static const std::regex verdict(R"(\b(yes|no)\b)", std::regex::icase);
        std::smatch m;
        if (!std::regex_search(text, m, verdict))
            return std::nullopt;
        return lowercase(m[1]) == "yes";
    }

    std::string parse_explanation(const std::string& text)
    {
        static const std::regex marker(R"(explanation\s*:)", std::regex::icase);
        std::smatch m;
        if (std::regex_search(text, m, marker))
            return trim(text.substr(m.position(0) + m.length(0)));
        // fall back to everything after the verdict token
        static const std::regex verdict(R"(\b(yes|no)\b)", std::regex::icase);
        if (std::regex_search(text, m, verdict)) {
            std::string rest = trim(text.substr(m.position(0) + m.length(0)));
            while (!rest.empty() && (std::ispunct(static_cast<unsigned char>(rest.front()))
                       || static_cast<unsigned char>(rest.front()) > 127))
                rest.erase(rest.begin());
            rest = trim(rest);
            if (!rest.empty())
                return rest;
        }
        return trim(text);
    }

} // namespace

DecideResult decide_maintenance(const ChangeSummary& summary, ChatProvider& provider,
    const PredictOptions& options, const std::string& rendered_diff)
{
    if (trim(summary.text).empty())
        throw ParseFailure("decision stage received an empty summary");

    // plain LLM instance: a prompt chain, no tools or agent memory
    AgentTranscript transcript;
    transcript.agent_name = "maintenance-decision";

    std::string prompt = std::string(kDecisionRole);
    if (options.include_diff_in_decision && !rendered_diff.empty())
        prompt += " and the raw diff";
    prompt += ".\nReply on the first line with exactly 'VERDICT: YES' or 'VERDICT: NO', then a line "
              "'Explanation: <one or two sentences>'.";

    ChatRequest request;
    request.system_prompt = prompt;
    request.timeout = options.per_prompt_timeout;
    std::string body = "Change summary:\n" + summary.text;
    if (options.include_diff_in_decision && !rendered_diff.empty())
        body += "\n\nDiff:\n" + rendered_diff;
    request.messages.push_back({ "user", body });

    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatResponse response = provider.complete(request);
        ReactStep step;
        step.thought = response.text;
        transcript.steps.push_back(step);

        auto verdict = parse_verdict(response.text);
        if (verdict) {
            MaintenanceDecision decision;
            decision.needed = *verdict;
            decision.explanation = parse_explanation(response.text);
            if (decision.explanation.empty())
                decision.explanation = trim(response.text);
            return { std::move(decision), std::move(transcript) };
        }
        // one re-ask with a stricter instruction
        request.messages.push_back({ "assistant", response.text });
        request.messages.push_back({ "user",
            "Answer strictly. First line must be exactly 'VERDICT: YES' or 'VERDICT: NO'." });
    }

    transcript.outcome = ReactOutcome::IterationLimit;
    throw ParseFailure("maintenance decision: no YES/NO verdict after re-ask");
}

const char* to_string(Stance stance)
{
    switch (stance) {
    case Stance::NeedsUpdate:
        return "needs_update";
    case Stance::ShouldReview:
        return "should_review";
    case Stance::SuggestNew:
        return "suggest_new";
    }
    return "needs_update";
}

Stance classify_stance(const std::string& text)
{
    std::string low = lowercase(text);
    auto has = [&](const char* phrase) { return low.find(phrase) != std::string::npos; };

    // phrase priority: needs > should-update > create-new > might/review
    if (has("needs to be updated") || has("need to be updated") || has("must be updated")
        || has("require maintenance") || has("requires maintenance") || has("needs to be changed")
        || has("need to be changed"))
        return Stance::NeedsUpdate;
    if (has("should be updated") || has("should be changed"))
        return Stance::NeedsUpdate;
    if ((has("new test") && (has("creat") || has("should be added"))) || has("be created"))
        return Stance::SuggestNew;
    if (has("might need") || has("may need") || has("review"))
        return Stance::ShouldReview;
    return Stance::NeedsUpdate;
}

namespace {

    const char* stance_phrase(const std::string& low)
    {
        static const char* phrases[] = { "needs to be updated", "need to be updated",
            "must be updated", "should be updated", "might need to be updated",
            "may need to be updated", "recommended to review", "should be created", "review" };
        for (const char* phrase : phrases)
            if (low.find(phrase) != std::string::npos)
                return phrase;
        return "";
    }

    // the sentence/list item around `pos`, used as a per-test rationale
    std::string surrounding_item(const std::string& text, std::size_t pos)
    {
        std::size_t begin = text.rfind('\n', pos);
        begin = begin == std::string::npos ? 0 : begin + 1;
        std::size_t end = pos;
        // run to the start of the next enumerated item or a blank line
        static const std::regex next_item(R"(\n\s*(\d+[.)]|\n))");
        std::smatch m;
        std::string tail = text.substr(pos);
        if (std::regex_search(tail, m, next_item))
            end = pos + static_cast<std::size_t>(m.position(0));
        else
            end = text.size();
        std::string item = text.substr(begin, end - begin);
        std::string out;
        for (char c : item)
            out += (c == '\n') ? ' ' : c;
        return trim(out);
    }

} // namespace

NameExtraction extract_test_names(const std::string& answer_text, const std::set<TestId>& universe)
{
    std::vector<std::string> candidates;
    auto add_candidate = [&](std::string name) {
        if (name.size() >= 2 && name.substr(name.size() - 2) == "()")
            name = name.substr(0, name.size() - 2);
        static const std::regex ident(R"(^[A-Za-z_]\w*$)");
        if (!std::regex_match(name, ident))
            return;
        if (std::find(candidates.begin(), candidates.end(), name) == candidates.end())
            candidates.push_back(std::move(name));
    };

    // backtick-quoted identifiers
    {
        static const std::regex backticked("`([^`]+)`");
        for (std::sregex_iterator it(answer_text.begin(), answer_text.end(), backticked), end; it != end; ++it)
            add_candidate(trim((*it)[1]));
    }
    // bare name() mentions
    {
        static const std::regex called(R"(([A-Za-z_]\w*)\(\))");
        for (std::sregex_iterator it(answer_text.begin(), answer_text.end(), called), end; it != end; ++it)
            add_candidate((*it)[1]);
    }
    // enumerated list items: "1. testFoo: ..." / "2) testBar ..."
    {
        static const std::regex item(R"((?:^|\n)\s*\d+[.)]\s*`?([A-Za-z_]\w*))");
        for (std::sregex_iterator it(answer_text.begin(), answer_text.end(), item), end; it != end; ++it)
            add_candidate((*it)[1]);
    }

    std::map<std::string, std::vector<TestId>> by_method;
    std::map<std::string, std::vector<TestId>> by_method_lower;
    for (const auto& id : universe) {
        by_method[id.method_name].push_back(id);
        by_method_lower[lowercase(id.method_name)].push_back(id);
    }

    NameExtraction result;
    std::set<TestId> seen;
    for (const auto& name : candidates) {
        auto exact = by_method.find(name);
        if (exact != by_method.end()) {
            for (const auto& id : exact->second)
                if (seen.insert(id).second)
                    result.matched.push_back(id);
            continue;
        }
        auto loose = by_method_lower.find(lowercase(name));
        if (loose != by_method_lower.end() && loose->second.size() == 1) {
            if (seen.insert(loose->second[0]).second)
                result.matched.push_back(loose->second[0]);
            continue;
        }
        result.unmatched.push_back(name);
    }
    return result;
}

LocalizeResult localize_tests(const CodeChange& change, const ChangeSummary& summary,
    const VectorIndex& index, ChatProvider& provider, EmbeddingProvider& embedder,
    const PredictOptions& options)
{
    if (index.commit_id != change.commit_id)
        throw MixedCommit("index snapshot is for commit " + index.commit_id + ", change is for "
            + change.commit_id);

    std::string query = summary.text + "\n" + change.rendered_text;
    auto hits = retrieve_top_k(index, query, std::max<std::size_t>(options.retrieval_k, 1), embedder);

    std::set<TestId> universe;
    std::map<TestId, const IndexedDocument*> docs;
    for (const auto& doc : index.documents) {
        universe.insert(doc.test_id);
        docs[doc.test_id] = &doc;
    }

    std::ostringstream input;
    input << "Code change summary:\n"
          << summary.text << "\n\nCode change (diff):\n"
          << change.rendered_text << "\nCandidate test cases (retrieved as most relevant):\n";
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const IndexedDocument* doc = docs[hits[i].test_id];
        std::string text = doc->text;
        if (text.size() > 1200)
            text = text.substr(0, 1200) + "\n[truncated]";
        input << (i + 1) << ". `" << hits[i].test_id.method_name << "()` in "
              << hits[i].test_id.container_name << " (" << hits[i].test_id.file_path << ")\n"
              << text << "\n\n";
    }
    if (hits.empty())
        input << "(none - the test suite snapshot is empty)\n";

    AgentSpec spec;
    spec.name = "test-localization";
    spec.role_prompt = kLocalizerRole;
    spec.max_iterations = options.max_iterations;
    spec.per_prompt_timeout = options.per_prompt_timeout;

    auto [answer, transcript] = run_react(spec, input.str(), provider);

    LocalizeResult result;
    result.answer_text = answer;
    result.transcript = std::move(transcript);

    NameExtraction names = extract_test_names(answer, universe);
    result.unmatched = std::move(names.unmatched);

    std::string low = lowercase(answer);
    Stance global = classify_stance(answer);

    for (const auto& id : names.matched) {
        TestSuggestion suggestion;
        suggestion.test_id = id;
        std::size_t pos = answer.find(id.method_name);
        suggestion.rationale = pos == std::string::npos ? answer : surrounding_item(answer, pos);
        std::string local = lowercase(suggestion.rationale);
        Stance stance = global;
        if (local.find("might need") != std::string::npos || local.find("may need") != std::string::npos
            || local.find("review") != std::string::npos) {
            // per-item hedging downgrades only when the overall answer is not confident
            if (global == Stance::ShouldReview)
                stance = Stance::ShouldReview;
        }
        suggestion.stance = stance == Stance::SuggestNew ? Stance::NeedsUpdate : stance;
        suggestion.confidence_phrase = stance_phrase(local);
        if (suggestion.confidence_phrase.empty())
            suggestion.confidence_phrase = stance_phrase(low);
        result.suggestions.push_back(std::move(suggestion));
    }

    bool wants_new = (low.find("new test") != std::string::npos
                         && (low.find("creat") != std::string::npos || low.find("should be added") != std::string::npos))
        || global == Stance::SuggestNew;
    if (wants_new) {
        TestSuggestion suggestion;
        suggestion.stance = Stance::SuggestNew;
        suggestion.rationale = trim(answer);
        suggestion.confidence_phrase = "should be created";
        result.suggestions.push_back(std::move(suggestion));
    }

    if (names.matched.empty() && !wants_new && global == Stance::ShouldReview) {
        TestSuggestion suggestion;
        suggestion.stance = Stance::ShouldReview;
        suggestion.rationale = trim(answer);
        suggestion.confidence_phrase = stance_phrase(low);
        result.suggestions.push_back(std::move(suggestion));
    }

    return result;
}

namespace {

    std::string assemble_final_text(const MaintenanceDecision& decision,
        const std::vector<TestSuggestion>& suggestions, int verbosity)
    {
        std::ostringstream out;
        if (!decision.needed) {
            out << "No test maintenance is needed. " << decision.explanation;
            return out.str();
        }
        bool any_named = std::any_of(suggestions.begin(), suggestions.end(),
            [](const TestSuggestion& s) { return s.test_id.has_value(); });
        if (!any_named) {
            out << "No specific test cases were identified as needing updates. "
                   "It is recommended to review test cases related to the changed code.";
            for (const auto& s : suggestions)
                if (s.stance == Stance::SuggestNew)
                    out << "\nConsider creating new test cases: " << s.rationale;
            return out.str();
        }
        out << "The following test cases require maintenance due to the code change:\n";
        int n = 0;
        for (const auto& s : suggestions) {
            if (!s.test_id)
                continue;
            out << ++n << ". `" << s.test_id->method_name << "()`";
            if (verbosity > 0 && !s.rationale.empty())
                out << ": " << s.rationale;
            out << '\n';
        }
        for (const auto& s : suggestions)
            if (s.stance == Stance::SuggestNew)
                out << "Additionally, new test cases should be created: " << s.rationale << '\n';
        return out.str();
    }

} // namespace

Prediction predict(const CodeChange& change, const VectorIndex& index, ChatProvider& provider,
    EmbeddingProvider& embedder, const PredictOptions& options)
{
    Prediction prediction;
    prediction.commit_id = change.commit_id;
    prediction.file_path = change.file_path;

    auto emit_trace = [&](const AgentTranscript& transcript) {
        if (options.trace)
            print_transcript(*options.trace, transcript);
    };

    // keep transcripts of failed agent runs too
    auto note_failure = [&](const Error& e) {
        if (auto* limit = dynamic_cast<const ReactIterationLimit*>(&e)) {
            prediction.transcripts.push_back(limit->transcript());
            emit_trace(limit->transcript());
        } else if (auto* timeout = dynamic_cast<const ReactTimeout*>(&e)) {
            prediction.transcripts.push_back(timeout->transcript());
            emit_trace(timeout->transcript());
        }
    };

    // one retry per sub-agent, triggered by empty or unparseable output
    auto with_retry = [&](const char* stage, auto&& call) {
        try {
            return call();
        } catch (const PipelineFailure&) {
            throw;
        } catch (const Error& first) {
            note_failure(first);
            try {
                return call();
            } catch (const Error& second) {
                note_failure(second);
                throw PipelineFailure(stage, std::string(first.what()) + "; retry: " + second.what(),
                    prediction.transcripts);
            }
        }
    };

    SummarizeResult summarized = with_retry("summarize", [&] {
        auto result = summarize_change(change, provider, options);
        prediction.transcripts.push_back(result.transcript);
        emit_trace(result.transcript);
        return result;
    });

    DecideResult decided = with_retry("decide", [&] {
        auto result = decide_maintenance(summarized.summary, provider, options,
            options.include_diff_in_decision ? change.rendered_text : std::string {});
        prediction.transcripts.push_back(result.transcript);
        emit_trace(result.transcript);
        return result;
    });
    prediction.decision = decided.decision;

    if (!prediction.decision.needed) {
        prediction.final_text = assemble_final_text(prediction.decision, {}, options.verbosity);
        return prediction;
    }

    LocalizeResult localized = with_retry("localize", [&] {
        auto result = localize_tests(change, summarized.summary, index, provider, embedder, options);
        prediction.transcripts.push_back(result.transcript);
        emit_trace(result.transcript);
        return result;
    });

    prediction.suggestions = std::move(localized.suggestions);
    for (const auto& name : localized.unmatched)
        prediction.warnings.push_back("suggested test '" + name + "' not found in the commit's test universe");

    prediction.final_text = assemble_final_text(prediction.decision, prediction.suggestions,
        options.verbosity);
    return prediction;
}

void print_transcript(std::ostream& out, const AgentTranscript& transcript)
{
    out << "=== agent: " << transcript.agent_name << " ===\n";
    for (const auto& step : transcript.steps) {
        if (!step.thought.empty())
            out << "Thought: " << step.thought << '\n';
        if (step.action) {
            out << "Action: " << step.action->tool_name << '\n';
            out << "Action Input: " << step.action->tool_input << '\n';
            out << "Observation: " << step.observation << '\n';
        }
    }
    if (transcript.reminders_issued > 0)
        out << "(format reminders issued: " << transcript.reminders_issued << ")\n";
    const char* outcome = transcript.outcome == ReactOutcome::Answered
        ? "answered"
        : (transcript.outcome == ReactOutcome::IterationLimit ? "iteration limit" : "timeout");
    out << "outcome: " << outcome << '\n';
}

void to_json(json& j, const Prediction& prediction)
{
    json suggestions = json::array();
    for (const auto& s : prediction.suggestions) {
        json entry = { { "stance", to_string(s.stance) }, { "rationale", s.rationale },
            { "confidence_phrase", s.confidence_phrase } };
        if (s.test_id)
            entry["test_id"] = *s.test_id;
        suggestions.push_back(std::move(entry));
    }
    j = json { { "commit", prediction.commit_id }, { "file", prediction.file_path },
        { "maintenance_needed", prediction.decision.needed },
        { "explanation", prediction.decision.explanation }, { "suggestions", suggestions },
        { "warnings", prediction.warnings }, { "final_text", prediction.final_text } };
}

} // namespace tmaint
