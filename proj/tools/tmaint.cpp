// SPDX-License-Identifier: Apache-2.0

#include <tmaint/agents.hpp>
#include <tmaint/config.hpp>
#include <tmaint/dataset.hpp>
#include <tmaint/evaluation.hpp>
#include <tmaint/git.hpp>
#include <tmaint/retrieval.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace tmaint;
using nlohmann::json;

namespace {

    TestSummarizer make_summarizer(ChatProvider& chat, const PredictOptions& options)
    {
        return [&chat, options](const TestCase& test) {
            return summarize_test_case(test, chat, options);
        };
    }

    VectorIndex obtain_index(const Config& config, const GitRepo& repo, const std::string& commit,
        ChatProvider& chat, EmbeddingProvider& embedder, const PredictOptions& options,
        bool rebuild)
    {
        if (!rebuild) {
            try {
                return load_index(config.cache_dir, commit, config.mode, embedder.fingerprint());
            } catch (const Error&) {
                // not cached; build below
            }
        }
        TestSummarizer summarizer;
        if (config.mode == IndexMode::Summary)
            summarizer = make_summarizer(chat, options);
        VectorIndex index = index_commit(repo, commit, config.mode, config.path_rules,
            config.conventions, embedder, summarizer);
        save_index(index, config.cache_dir);
        return index;
    }

    PredictOptions predict_options(const Config& config, bool trace)
    {
        PredictOptions options;
        options.max_iterations = config.max_iterations;
        options.per_prompt_timeout = config.per_prompt_timeout;
        options.retrieval_k = config.retrieval_k;
        options.include_diff_in_decision = config.include_diff_in_decision;
        options.verbosity = config.verbosity;
        options.trace = trace ? &std::cerr : nullptr;
        return options;
    }

    void print_prediction_text(std::ostream& out, const Prediction& prediction)
    {
        out << prediction.final_text << '\n';
        for (const auto& warning : prediction.warnings)
            out << "warning: " << warning << '\n';
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Test maintenance prediction for co-evolving source and test code" };
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override file values)");

    // dataset build
    auto* dataset_cmd = app.add_subcommand("dataset", "Dataset operations");
    dataset_cmd->require_subcommand(1);
    auto* build_cmd = dataset_cmd->add_subcommand("build", "Mine a commit range into an evaluation dataset");
    std::string repo_arg, from_arg, to_arg = "HEAD", out_arg = "dataset.jsonl";
    long context_arg = -1;
    build_cmd->add_option("--repo", repo_arg, "Path to the git repository");
    build_cmd->add_option("--from", from_arg, "Start of the commit range (exclusive); default: root");
    build_cmd->add_option("--to", to_arg, "End of the commit range (inclusive)")->capture_default_str();
    build_cmd->add_option("--context", context_arg, "Context lines around each hunk (default 9)");
    build_cmd->add_option("--out", out_arg, "Output dataset file")->capture_default_str();

    // index
    auto* index_cmd = app.add_subcommand("index", "Build the retrieval index for a commit snapshot");
    std::string index_commit_arg, index_mode_arg;
    index_cmd->add_option("--repo", repo_arg, "Path to the git repository");
    index_cmd->add_option("--commit", index_commit_arg, "Commit whose test universe to index")->required();
    index_cmd->add_option("--mode", index_mode_arg, "raw | summary");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Predict test maintenance for a code change");
    std::string diff_arg, commit_arg, format_arg = "text", predict_mode_arg;
    bool build_index_flag = false, trace_flag = false;
    predict_cmd->add_option("--repo", repo_arg, "Path to the git repository");
    predict_cmd->add_option("--diff", diff_arg, "Unified diff file to predict on");
    predict_cmd->add_option("--commit", commit_arg, "Commit to predict on (diff taken from the repo)");
    predict_cmd->add_option("--mode", predict_mode_arg, "raw | summary");
    predict_cmd->add_flag("--build-index", build_index_flag, "(Re)build the snapshot index first");
    predict_cmd->add_flag("--trace", trace_flag, "Print agent transcripts to stderr");
    predict_cmd->add_option("--format", format_arg, "text | json")->capture_default_str();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a dataset with the agent pipeline");
    std::string dataset_arg, report_arg, eval_mode_arg;
    long trials_arg = 2;
    evaluate_cmd->add_option("--dataset", dataset_arg, "Dataset file produced by `dataset build`")->required();
    evaluate_cmd->add_option("--repo", repo_arg, "Path to the git repository");
    evaluate_cmd->add_option("--trials", trials_arg, "Number of evaluation trials")->capture_default_str();
    evaluate_cmd->add_option("--mode", eval_mode_arg, "raw | summary");
    evaluate_cmd->add_option("--out", report_arg, "Write the full report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config config = config_path.empty() ? Config {} : load_config(config_path);
        if (!repo_arg.empty())
            config.repo = repo_arg;
        if (context_arg >= 0)
            config.context_lines = static_cast<std::size_t>(context_arg);

        if (build_cmd->parsed()) {
            GitRepo repo(config.repo);
            MiningOptions options;
            options.context_lines = config.context_lines;
            options.range_from = from_arg;
            options.range_to = to_arg;
            Dataset dataset = build_dataset(repo, options, config.path_rules, config.conventions);
            serialize_dataset(dataset, out_arg);
            for (const auto& warning : dataset.warnings)
                std::cerr << "warning: " << warning << '\n';
            const auto& m = dataset.manifest;
            std::cout << "dataset written to " << out_arg << '\n'
                      << "commits: " << m.commits << " (" << m.changed_commits << " changed, "
                      << m.unchanged_commits << " unchanged)\n"
                      << "code changes: " << m.changes << " (mean " << m.mean_changes_changed
                      << " per changed commit, " << m.mean_changes_unchanged << " per unchanged)\n"
                      << "context lines: " << m.context_lines << '\n';
            return 0;
        }

        if (index_cmd->parsed()) {
            if (!index_mode_arg.empty())
                config.mode = index_mode_from_string(index_mode_arg);
            GitRepo repo(config.repo);
            auto chat = make_chat_provider(config);
            auto embedder = make_embedding_provider(config);
            PredictOptions options = predict_options(config, false);
            VectorIndex index = obtain_index(config, repo, repo.resolve(index_commit_arg), *chat,
                *embedder, options, true);
            for (const auto& warning : index.warnings)
                std::cerr << "warning: " << warning << '\n';
            std::cout << "indexed " << index.documents.size() << " test cases for commit "
                      << index.commit_id << " (" << to_string(index.mode) << " mode)\n";
            return 0;
        }

        if (predict_cmd->parsed()) {
            if (!predict_mode_arg.empty())
                config.mode = index_mode_from_string(predict_mode_arg);
            if (diff_arg.empty() && commit_arg.empty())
                throw ConfigError("predict requires --diff or --commit");

            GitRepo repo(config.repo);
            auto chat = make_chat_provider(config);
            auto embedder = make_embedding_provider(config);
            PredictOptions options = predict_options(config, trace_flag);

            std::string commit = repo.resolve(commit_arg.empty() ? "HEAD" : commit_arg);
            CommitDiff diff;
            if (!diff_arg.empty()) {
                std::ifstream in(diff_arg);
                if (!in)
                    throw ConfigError("cannot read diff file: " + diff_arg);
                std::stringstream buffer;
                buffer << in.rdbuf();
                diff = parse_unified_diff(buffer.str());
                diff.commit_id = commit;
            } else {
                diff = produce_diff(repo, commit, config.context_lines);
            }

            auto changes = split_changes(diff, config.path_rules);
            if (changes.empty()) {
                std::cout << "no source code changes to predict on\n";
                return 0;
            }

            VectorIndex index = obtain_index(config, repo, commit, *chat, *embedder, options,
                build_index_flag);

            json output = json::array();
            for (const auto& change : changes) {
                Prediction prediction = predict(change, index, *chat, *embedder, options);
                if (format_arg == "json") {
                    output.push_back(prediction);
                } else {
                    std::cout << "== " << change.file_path << " @@ -" << change.hunk.old_start
                              << " +" << change.hunk.new_start << " ==\n";
                    print_prediction_text(std::cout, prediction);
                }
            }
            if (format_arg == "json")
                std::cout << output.dump(2) << '\n';
            return 0;
        }

        if (evaluate_cmd->parsed()) {
            if (!eval_mode_arg.empty())
                config.mode = index_mode_from_string(eval_mode_arg);
            Dataset dataset = load_dataset(dataset_arg);
            GitRepo repo(config.repo);
            auto chat = make_chat_provider(config);
            auto embedder = make_embedding_provider(config);
            PredictOptions options = predict_options(config, false);

            PipelineHooks hooks;
            hooks.build_index = [&](const CommitRecord& record) {
                return obtain_index(config, repo, record.commit_id, *chat, *embedder, options, false);
            };
            hooks.predict_change = [&](const CodeChange& change, const VectorIndex& index) {
                return predict(change, index, *chat, *embedder, options);
            };

            EvaluationRun run = evaluate_dataset(dataset, hooks, config.mode,
                static_cast<std::size_t>(trials_arg), &std::cerr);
            run.dataset_path = dataset_arg;
            print_report(std::cout, run);
            if (!report_arg.empty()) {
                std::ofstream out(report_arg);
                out << json(run).dump(2) << '\n';
                std::cout << "report written to " << report_arg << '\n';
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }

    return 2;
}
