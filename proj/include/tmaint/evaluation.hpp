// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tmaint/agents.hpp>
#include <tmaint/dataset.hpp>
#include <tmaint/retrieval.hpp>

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace tmaint {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }

    ConfusionCounts& operator+=(const ConfusionCounts& other)
    {
        tp += other.tp;
        tn += other.tn;
        fp += other.fp;
        fn += other.fn;
        return *this;
    }

    bool operator==(const ConfusionCounts&) const = default;
};

// A metric with a zero denominator is absent, never 0-by-convention.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
    std::optional<double> f2;
};

std::set<TestId> aggregate_commit_prediction(const std::vector<Prediction>& predictions);

ConfusionCounts classify_outcomes(const std::set<TestId>& suggested, const std::set<TestId>& ground_truth,
    const std::set<TestId>& universe);

MetricsReport compute_metrics(const ConfusionCounts& counts);

struct CommitOutcome {
    std::string commit_id;
    CommitSubset subset = CommitSubset::Unchanged;
    ConfusionCounts counts;
    std::set<TestId> suggested;
    std::size_t failed_changes = 0;
    std::size_t total_changes = 0;
};

struct SubsetReport {
    std::size_t commits = 0;
    ConfusionCounts summed;
    MetricsReport micro; // metrics over the summed counts
    MetricsReport macro; // mean of per-commit metrics (absent values skipped)
    double avg_fp_per_commit = 0.0;
};

struct PredictionFailure {
    std::string commit_id;
    std::string stage;
    std::string message;
};

struct TrialResult {
    std::vector<CommitOutcome> commits;
    SubsetReport changed;
    SubsetReport unchanged;
    std::vector<PredictionFailure> failures;
};

struct EvaluationRun {
    std::string dataset_path;
    IndexMode mode = IndexMode::RawCode;
    std::size_t trials = 2;
    std::vector<TrialResult> trial_results;
    SubsetReport mean_changed;   // micro metrics averaged across trials
    SubsetReport mean_unchanged;
};

// Wiring points so tests can run the evaluation protocol with scripted
// predictors and the CLI with the real agent pipeline.
struct PipelineHooks {
    std::function<VectorIndex(const CommitRecord&)> build_index;
    std::function<Prediction(const CodeChange&, const VectorIndex&)> predict_change;
};

EvaluationRun evaluate_dataset(const Dataset& dataset, const PipelineHooks& hooks, IndexMode mode,
    std::size_t trials = 2, std::ostream* log = nullptr);

void to_json(nlohmann::json& j, const EvaluationRun& run);
void print_report(std::ostream& out, const EvaluationRun& run);

} // namespace tmaint
