// SPDX-License-Identifier: Apache-2.0

#include <tmaint/evaluation.hpp>

#include <tmaint/json_types.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace tmaint {

using nlohmann::json;

std::set<TestId> aggregate_commit_prediction(const std::vector<Prediction>& predictions)
{
    std::set<TestId> suggested;
    std::string commit;
    for (const auto& prediction : predictions) {
        if (commit.empty())
            commit = prediction.commit_id;
        else if (prediction.commit_id != commit)
            throw MixedCommit("predictions span commits " + commit + " and " + prediction.commit_id);
        for (const auto& s : prediction.suggestions) {
            if (s.stance == Stance::SuggestNew)
                continue; // names no existing test
            if (s.test_id)
                suggested.insert(*s.test_id);
        }
    }
    return suggested;
}

ConfusionCounts classify_outcomes(const std::set<TestId>& suggested, const std::set<TestId>& ground_truth,
    const std::set<TestId>& universe)
{
    for (const auto& id : suggested)
        if (!universe.count(id))
            throw SubsetViolation("suggested test outside the universe: " + id.to_string());
    for (const auto& id : ground_truth)
        if (!universe.count(id))
            throw SubsetViolation("ground-truth test outside the universe: " + id.to_string());

    ConfusionCounts counts;
    for (const auto& id : universe) {
        bool s = suggested.count(id) > 0;
        bool g = ground_truth.count(id) > 0;
        if (s && g)
            ++counts.tp;
        else if (s && !g)
            ++counts.fp;
        else if (!s && g)
            ++counts.fn;
        else
            ++counts.tn;
    }
    return counts;
}

MetricsReport compute_metrics(const ConfusionCounts& c)
{
    MetricsReport report;
    if (c.total() > 0)
        report.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fn > 0)
        report.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.tp + c.fp > 0)
        report.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (report.precision && report.recall && (*report.precision + *report.recall) > 0.0) {
        double p = *report.precision;
        double r = *report.recall;
        report.f1 = 2.0 * p * r / (p + r);
        report.f2 = 5.0 * p * r / (4.0 * p + r); // F-beta with beta^2 = 4
    }
    return report;
}

namespace {

    std::optional<double> mean_of(const std::vector<std::optional<double>>& values)
    {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& v : values)
            if (v) {
                sum += *v;
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return sum / static_cast<double>(n);
    }

    SubsetReport subset_report(const std::vector<CommitOutcome>& commits, CommitSubset subset)
    {
        SubsetReport report;
        std::vector<std::optional<double>> accs, recalls, precisions, f1s, f2s;
        for (const auto& commit : commits) {
            if (commit.subset != subset)
                continue;
            ++report.commits;
            report.summed += commit.counts;
            MetricsReport per = compute_metrics(commit.counts);
            accs.push_back(per.accuracy);
            recalls.push_back(per.recall);
            precisions.push_back(per.precision);
            f1s.push_back(per.f1);
            f2s.push_back(per.f2);
        }
        report.micro = compute_metrics(report.summed);
        report.macro.accuracy = mean_of(accs);
        report.macro.recall = mean_of(recalls);
        report.macro.precision = mean_of(precisions);
        report.macro.f1 = mean_of(f1s);
        report.macro.f2 = mean_of(f2s);
        report.avg_fp_per_commit = report.commits
            ? static_cast<double>(report.summed.fp) / static_cast<double>(report.commits)
            : 0.0;
        return report;
    }

} // namespace

EvaluationRun evaluate_dataset(const Dataset& dataset, const PipelineHooks& hooks, IndexMode mode,
    std::size_t trials, std::ostream* log)
{
    if (!hooks.build_index || !hooks.predict_change)
        throw ConfigError("evaluation requires build_index and predict_change hooks");

    EvaluationRun run;
    run.mode = mode;
    run.trials = trials;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        TrialResult result;
        for (const auto& record : dataset.records) {
            // snapshot index rebuilt per commit so retrieval reflects that commit
            VectorIndex index = hooks.build_index(record);

            CommitOutcome outcome;
            outcome.commit_id = record.commit_id;
            outcome.subset = record.subset;
            outcome.total_changes = record.changes.size();

            std::vector<Prediction> predictions;
            for (const auto& change : record.changes) {
                try {
                    predictions.push_back(hooks.predict_change(change, index));
                } catch (const PipelineFailure& e) {
                    ++outcome.failed_changes;
                    result.failures.push_back({ record.commit_id, e.stage(), e.what() });
                    if (log)
                        *log << "WARNING: prediction failed for commit " << record.commit_id
                             << " (" << e.stage() << "): " << e.what() << "; change excluded\n";
                } catch (const Error& e) {
                    ++outcome.failed_changes;
                    result.failures.push_back({ record.commit_id, "pipeline", e.what() });
                    if (log)
                        *log << "WARNING: prediction failed for commit " << record.commit_id
                             << ": " << e.what() << "; change excluded\n";
                }
            }

            outcome.suggested = aggregate_commit_prediction(predictions);
            outcome.counts = classify_outcomes(outcome.suggested, record.ground_truth, record.universe);
            result.commits.push_back(std::move(outcome));
        }
        result.changed = subset_report(result.commits, CommitSubset::Changed);
        result.unchanged = subset_report(result.commits, CommitSubset::Unchanged);
        run.trial_results.push_back(std::move(result));
    }

    // mean across trials, over the micro metrics and FP averages
    auto mean_subset = [&](auto select) {
        SubsetReport mean;
        std::vector<std::optional<double>> accs, recalls, precisions, f1s, f2s;
        double fp_sum = 0.0;
        for (const auto& trial : run.trial_results) {
            const SubsetReport& r = select(trial);
            mean.commits = r.commits;
            mean.summed += r.summed;
            accs.push_back(r.micro.accuracy);
            recalls.push_back(r.micro.recall);
            precisions.push_back(r.micro.precision);
            f1s.push_back(r.micro.f1);
            f2s.push_back(r.micro.f2);
            fp_sum += r.avg_fp_per_commit;
        }
        mean.micro.accuracy = mean_of(accs);
        mean.micro.recall = mean_of(recalls);
        mean.micro.precision = mean_of(precisions);
        mean.micro.f1 = mean_of(f1s);
        mean.micro.f2 = mean_of(f2s);
        mean.avg_fp_per_commit = run.trial_results.empty()
            ? 0.0
            : fp_sum / static_cast<double>(run.trial_results.size());
        return mean;
    };
    run.mean_changed = mean_subset([](const TrialResult& t) -> const SubsetReport& { return t.changed; });
    run.mean_unchanged = mean_subset([](const TrialResult& t) -> const SubsetReport& { return t.unchanged; });

    return run;
}

// ---- reporting -------------------------------------------------------------

namespace {

    json metrics_json(const MetricsReport& m)
    {
        json j = json::object();
        auto put = [&](const char* key, const std::optional<double>& v) {
            if (v)
                j[key] = *v;
            else
                j[key] = nullptr;
        };
        put("accuracy", m.accuracy);
        put("recall", m.recall);
        put("precision", m.precision);
        put("f1", m.f1);
        put("f2", m.f2);
        return j;
    }

    json subset_json(const SubsetReport& r)
    {
        return json { { "commits", r.commits },
            { "counts", { { "tp", r.summed.tp }, { "tn", r.summed.tn }, { "fp", r.summed.fp }, { "fn", r.summed.fn } } },
            { "micro", metrics_json(r.micro) }, { "macro", metrics_json(r.macro) },
            { "avg_fp_per_commit", r.avg_fp_per_commit } };
    }

    std::string fmt(const std::optional<double>& v)
    {
        if (!v)
            return "  -  ";
        std::ostringstream out;
        out << std::fixed << std::setprecision(3) << *v;
        return out.str();
    }

} // namespace

void to_json(json& j, const EvaluationRun& run)
{
    json trials = json::array();
    for (const auto& trial : run.trial_results) {
        json commits = json::array();
        for (const auto& commit : trial.commits) {
            commits.push_back({ { "commit", commit.commit_id },
                { "subset", commit.subset == CommitSubset::Changed ? "changed" : "unchanged" },
                { "counts", { { "tp", commit.counts.tp }, { "tn", commit.counts.tn }, { "fp", commit.counts.fp }, { "fn", commit.counts.fn } } },
                { "suggested", commit.suggested },
                { "failed_changes", commit.failed_changes },
                { "total_changes", commit.total_changes } });
        }
        json failures = json::array();
        for (const auto& failure : trial.failures)
            failures.push_back({ { "commit", failure.commit_id }, { "stage", failure.stage },
                { "message", failure.message } });
        trials.push_back({ { "commits", commits }, { "changed", subset_json(trial.changed) },
            { "unchanged", subset_json(trial.unchanged) }, { "failures", failures } });
    }
    j = json { { "dataset", run.dataset_path }, { "mode", to_string(run.mode) },
        { "trials", run.trials }, { "trial_results", trials },
        { "mean", { { "changed", subset_json(run.mean_changed) }, { "unchanged", subset_json(run.mean_unchanged) } } } };
}

void print_report(std::ostream& out, const EvaluationRun& run)
{
    auto changed_row = [&](const std::string& label, const SubsetReport& r) {
        out << "  " << std::left << std::setw(16) << label << std::right
            << "  recall=" << fmt(r.micro.recall) << "  precision=" << fmt(r.micro.precision)
            << "  accuracy=" << fmt(r.micro.accuracy) << "  f1=" << fmt(r.micro.f1)
            << "  f2=" << fmt(r.micro.f2) << '\n';
        out << "  " << std::left << std::setw(16) << " (macro)" << std::right
            << "  recall=" << fmt(r.macro.recall) << "  precision=" << fmt(r.macro.precision)
            << "  accuracy=" << fmt(r.macro.accuracy) << "  f1=" << fmt(r.macro.f1)
            << "  f2=" << fmt(r.macro.f2) << '\n';
    };
    auto unchanged_row = [&](const std::string& label, const SubsetReport& r) {
        out << "  " << std::left << std::setw(16) << label << std::right << "  avg FPs/commit="
            << std::fixed << std::setprecision(1) << r.avg_fp_per_commit
            << "  accuracy=" << fmt(r.micro.accuracy) << '\n';
    };

    out << "Evaluation (" << to_string(run.mode) << " mode, " << run.trials << " trial"
        << (run.trials == 1 ? "" : "s") << ")\n";
    out << "Commits with updated tests (" << run.mean_changed.commits << "):\n";
    for (std::size_t i = 0; i < run.trial_results.size(); ++i)
        changed_row("trial " + std::to_string(i + 1), run.trial_results[i].changed);
    changed_row("mean", run.mean_changed);
    out << "Commits with no updated tests (" << run.mean_unchanged.commits << "):\n";
    for (std::size_t i = 0; i < run.trial_results.size(); ++i)
        unchanged_row("trial " + std::to_string(i + 1), run.trial_results[i].unchanged);
    unchanged_row("mean", run.mean_unchanged);

    std::size_t failures = 0;
    std::size_t changes = 0;
    for (const auto& trial : run.trial_results) {
        failures += trial.failures.size();
        for (const auto& commit : trial.commits)
            changes += commit.total_changes;
    }
    if (failures > 0)
        out << "WARNING: " << failures << " of " << changes
            << " change predictions failed and were excluded from the counts\n";
}

} // namespace tmaint
