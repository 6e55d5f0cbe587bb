// SPDX-License-Identifier: Apache-2.0

#include <tmaint/evaluation.hpp>

#include <doctest.h>

#include <random>
#include <sstream>

using namespace tmaint;

namespace {

TestId tid(const std::string& method)
{
    return { "src/test/java/T.java", "T", method };
}

Prediction prediction_for(const std::string& commit, const std::vector<TestSuggestion>& suggestions)
{
    Prediction p;
    p.commit_id = commit;
    p.decision.needed = !suggestions.empty();
    p.suggestions = suggestions;
    return p;
}

TestSuggestion named(const std::string& method, Stance stance = Stance::NeedsUpdate)
{
    TestSuggestion s;
    s.test_id = tid(method);
    s.stance = stance;
    return s;
}

} // namespace

TEST_CASE("commit aggregation unions suggestions and drops SuggestNew")
{
    TestSuggestion new_test;
    new_test.stance = Stance::SuggestNew;
    std::vector<Prediction> predictions = {
        prediction_for("c1", { named("testA"), named("testB", Stance::ShouldReview) }),
        prediction_for("c1", { named("testB"), new_test }),
        prediction_for("c1", {}),
    };
    auto suggested = aggregate_commit_prediction(predictions);
    CHECK(suggested == std::set<TestId> { tid("testA"), tid("testB") });
}

TEST_CASE("aggregating predictions from different commits is rejected")
{
    std::vector<Prediction> predictions = {
        prediction_for("c1", { named("testA") }),
        prediction_for("c2", { named("testB") }),
    };
    CHECK_THROWS_AS(aggregate_commit_prediction(predictions), MixedCommit);
}

TEST_CASE("confusion counts over a universe")
{
    std::set<TestId> universe = { tid("t1"), tid("t2"), tid("t3"), tid("t4"), tid("t5") };
    std::set<TestId> suggested = { tid("t1"), tid("t2") };
    std::set<TestId> truth = { tid("t2"), tid("t3") };
    ConfusionCounts counts = classify_outcomes(suggested, truth, universe);
    CHECK(counts.tp == 1); // t2
    CHECK(counts.fp == 1); // t1
    CHECK(counts.fn == 1); // t3
    CHECK(counts.tn == 2); // t4, t5
    CHECK(counts.total() == universe.size());
}

TEST_CASE("suggestions or ground truth outside the universe violate the subset invariant")
{
    std::set<TestId> universe = { tid("t1") };
    CHECK_THROWS_AS(classify_outcomes({ tid("ghost") }, {}, universe), SubsetViolation);
    CHECK_THROWS_AS(classify_outcomes({}, { tid("ghost") }, universe), SubsetViolation);
}

TEST_CASE("metrics on the reference operating point")
{
    // counts engineered for precision 0.275 and recall 0.676 (to 3 decimals)
    ConfusionCounts counts;
    counts.tp = 338;
    counts.fn = 162;   // recall = 338/500 = 0.676
    counts.fp = 891;   // precision = 338/1229 = 0.2750...
    counts.tn = 1000;
    MetricsReport m = compute_metrics(counts);
    REQUIRE(m.precision.has_value());
    REQUIRE(m.recall.has_value());
    CHECK(*m.precision == doctest::Approx(0.275).epsilon(1e-3));
    CHECK(*m.recall == doctest::Approx(0.676).epsilon(1e-3));
    CHECK(*m.f1 == doctest::Approx(0.391).epsilon(2e-3));
    CHECK(*m.f2 == doctest::Approx(0.523).epsilon(2e-3));
}

TEST_CASE("zero-denominator metrics are absent, not zero")
{
    ConfusionCounts counts; // everything zero
    MetricsReport m = compute_metrics(counts);
    CHECK_FALSE(m.accuracy.has_value());
    CHECK_FALSE(m.recall.has_value());
    CHECK_FALSE(m.precision.has_value());
    CHECK_FALSE(m.f1.has_value());

    counts.tn = 10; // unchanged-commit shape: no positives anywhere
    m = compute_metrics(counts);
    REQUIRE(m.accuracy.has_value());
    CHECK(*m.accuracy == doctest::Approx(1.0));
    CHECK_FALSE(m.recall.has_value());
    CHECK_FALSE(m.precision.has_value());

    counts = {};
    counts.fn = 3;
    counts.tn = 7; // predicted nothing, missed everything
    m = compute_metrics(counts);
    REQUIRE(m.recall.has_value());
    CHECK(*m.recall == doctest::Approx(0.0));
    CHECK_FALSE(m.precision.has_value());
    CHECK_FALSE(m.f1.has_value());
}

TEST_CASE("f-scores match their definition on random counts")
{
    std::mt19937 rng(20240819);
    for (int i = 0; i < 300; ++i) {
        ConfusionCounts c;
        c.tp = rng() % 20;
        c.fp = rng() % 20;
        c.fn = rng() % 20;
        c.tn = rng() % 50;
        MetricsReport m = compute_metrics(c);
        if (!m.precision || !m.recall)
            continue;
        double p = *m.precision;
        double r = *m.recall;
        if (p + r == 0.0) {
            CHECK_FALSE(m.f1.has_value());
            continue;
        }
        REQUIRE(m.f1.has_value());
        CHECK(*m.f1 == doctest::Approx(2 * p * r / (p + r)));
        CHECK(*m.f2 == doctest::Approx((1 + 4) * p * r / (4 * p + r)));
    }
}

namespace {

// builds a scripted dataset straight from parts; no git needed
Dataset scripted_dataset()
{
    Dataset dataset;
    auto make_record = [](const std::string& commit, CommitSubset subset,
                           std::set<TestId> truth, std::set<TestId> universe, std::size_t changes) {
        CommitRecord record;
        record.commit_id = commit;
        record.subset = subset;
        record.ground_truth = std::move(truth);
        record.universe = std::move(universe);
        for (std::size_t i = 0; i < changes; ++i) {
            CodeChange change;
            change.commit_id = commit;
            change.file_path = "src/main/java/F" + std::to_string(i) + ".java";
            change.rendered_text = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-a\n+b\n";
            record.changes.push_back(std::move(change));
        }
        return record;
    };
    std::set<TestId> universe = { tid("t1"), tid("t2"), tid("t3"), tid("t4") };
    dataset.records.push_back(make_record("c1", CommitSubset::Changed, { tid("t1"), tid("t2") }, universe, 2));
    dataset.records.push_back(make_record("c2", CommitSubset::Changed, { tid("t3") }, universe, 1));
    dataset.records.push_back(make_record("c3", CommitSubset::Unchanged, {}, universe, 1));
    refresh_manifest_counts(dataset.manifest, dataset.records);
    return dataset;
}

PipelineHooks oracle_hooks(const Dataset& dataset)
{
    // perfect predictor: suggests exactly the ground truth on the first change
    PipelineHooks hooks;
    hooks.build_index = [](const CommitRecord& record) {
        VectorIndex index;
        index.commit_id = record.commit_id;
        return index;
    };
    auto truths = std::make_shared<std::map<std::string, std::set<TestId>>>();
    for (const auto& record : dataset.records)
        (*truths)[record.commit_id] = record.ground_truth;
    hooks.predict_change = [truths](const CodeChange& change, const VectorIndex&) {
        Prediction p;
        p.commit_id = change.commit_id;
        for (const auto& id : (*truths)[change.commit_id]) {
            TestSuggestion s;
            s.test_id = id;
            p.suggestions.push_back(std::move(s));
        }
        p.decision.needed = !p.suggestions.empty();
        return p;
    };
    return hooks;
}

} // namespace

TEST_CASE("oracle predictor scores perfectly on both subsets")
{
    Dataset dataset = scripted_dataset();
    EvaluationRun run = evaluate_dataset(dataset, oracle_hooks(dataset), IndexMode::RawCode, 2);

    REQUIRE(run.trial_results.size() == 2);
    const SubsetReport& changed = run.trial_results[0].changed;
    CHECK(changed.commits == 2);
    CHECK(*changed.micro.recall == doctest::Approx(1.0));
    CHECK(*changed.micro.precision == doctest::Approx(1.0));
    CHECK(*changed.micro.f1 == doctest::Approx(1.0));
    CHECK(*changed.macro.f1 == doctest::Approx(1.0));

    const SubsetReport& unchanged = run.trial_results[0].unchanged;
    CHECK(unchanged.commits == 1);
    CHECK(unchanged.avg_fp_per_commit == doctest::Approx(0.0));
    CHECK(*unchanged.micro.accuracy == doctest::Approx(1.0));
    CHECK_FALSE(unchanged.micro.recall.has_value()); // no positives to recall

    CHECK(*run.mean_changed.micro.f1 == doctest::Approx(1.0));
}

TEST_CASE("always-negative predictor: zero recall, absent precision, clean unchanged subset")
{
    Dataset dataset = scripted_dataset();
    PipelineHooks hooks = oracle_hooks(dataset);
    hooks.predict_change = [](const CodeChange& change, const VectorIndex&) {
        Prediction p;
        p.commit_id = change.commit_id;
        return p;
    };
    EvaluationRun run = evaluate_dataset(dataset, hooks, IndexMode::RawCode, 1);
    const SubsetReport& changed = run.trial_results[0].changed;
    CHECK(*changed.micro.recall == doctest::Approx(0.0));
    CHECK_FALSE(changed.micro.precision.has_value());
    CHECK_FALSE(changed.micro.f1.has_value());
    CHECK(run.trial_results[0].unchanged.avg_fp_per_commit == doctest::Approx(0.0));
}

TEST_CASE("always-suggest-everything predictor: full recall, FP floods the unchanged subset")
{
    Dataset dataset = scripted_dataset();
    PipelineHooks hooks = oracle_hooks(dataset);
    hooks.predict_change = [](const CodeChange& change, const VectorIndex&) {
        Prediction p;
        p.commit_id = change.commit_id;
        for (const auto& m : { "t1", "t2", "t3", "t4" }) {
            TestSuggestion s;
            s.test_id = tid(m);
            p.suggestions.push_back(std::move(s));
        }
        p.decision.needed = true;
        return p;
    };
    EvaluationRun run = evaluate_dataset(dataset, hooks, IndexMode::RawCode, 1);
    const TrialResult& trial = run.trial_results[0];
    CHECK(*trial.changed.micro.recall == doctest::Approx(1.0));
    // c1: 2 FP of 4, c2: 3 FP of 4 -> micro precision 3/8
    CHECK(*trial.changed.micro.precision == doctest::Approx(3.0 / 8.0));
    CHECK(trial.unchanged.avg_fp_per_commit == doctest::Approx(4.0));
    CHECK(*trial.unchanged.micro.accuracy == doctest::Approx(0.0));
}

TEST_CASE("failing changes are excluded with a warning, not fatal")
{
    Dataset dataset = scripted_dataset();
    PipelineHooks hooks = oracle_hooks(dataset);
    auto real_predict = hooks.predict_change;
    hooks.predict_change = [real_predict](const CodeChange& change, const VectorIndex& index) {
        if (change.commit_id == "c2")
            throw PipelineFailure("summarize", "model never answered", {});
        return real_predict(change, index);
    };
    std::ostringstream log;
    EvaluationRun run = evaluate_dataset(dataset, hooks, IndexMode::RawCode, 1, &log);

    const TrialResult& trial = run.trial_results[0];
    REQUIRE(trial.failures.size() == 1);
    CHECK(trial.failures[0].commit_id == "c2");
    CHECK(trial.failures[0].stage == "summarize");
    CHECK(log.str().find("WARNING") != std::string::npos);
    CHECK(log.str().find("c2") != std::string::npos);

    // c2 still scored, with an empty suggestion set (its only change failed)
    const CommitOutcome* c2 = nullptr;
    for (const auto& commit : trial.commits)
        if (commit.commit_id == "c2")
            c2 = &commit;
    REQUIRE(c2 != nullptr);
    CHECK(c2->failed_changes == 1);
    CHECK(c2->suggested.empty());
    CHECK(c2->counts.fn == 1);
}

TEST_CASE("evaluation is deterministic across trials with deterministic hooks")
{
    Dataset dataset = scripted_dataset();
    EvaluationRun run = evaluate_dataset(dataset, oracle_hooks(dataset), IndexMode::RawCode, 2);
    nlohmann::json first, second;
    to_json(first, EvaluationRun { run.dataset_path, run.mode, 1, { run.trial_results[0] },
                       run.trial_results[0].changed, run.trial_results[0].unchanged });
    to_json(second, EvaluationRun { run.dataset_path, run.mode, 1, { run.trial_results[1] },
                        run.trial_results[1].changed, run.trial_results[1].unchanged });
    CHECK(first == second);
}

TEST_CASE("subset reports agree with a brute-force recomputation on random predictors")
{
    std::mt19937 rng(4242);
    for (int round = 0; round < 30; ++round) {
        Dataset dataset = scripted_dataset();
        PipelineHooks hooks = oracle_hooks(dataset);
        unsigned seed = rng();
        hooks.predict_change = [seed](const CodeChange& change, const VectorIndex&) {
            std::mt19937 local(seed ^ std::hash<std::string> {}(change.commit_id + change.file_path));
            Prediction p;
            p.commit_id = change.commit_id;
            for (const auto& m : { "t1", "t2", "t3", "t4" })
                if (local() % 2) {
                    TestSuggestion s;
                    s.test_id = tid(m);
                    p.suggestions.push_back(std::move(s));
                }
            p.decision.needed = !p.suggestions.empty();
            return p;
        };
        EvaluationRun run = evaluate_dataset(dataset, hooks, IndexMode::RawCode, 1);
        const TrialResult& trial = run.trial_results[0];

        // brute force: recompute summed counts per subset from the commit outcomes
        ConfusionCounts changed_sum, unchanged_sum;
        for (const auto& commit : trial.commits) {
            const CommitRecord* record = nullptr;
            for (const auto& r : dataset.records)
                if (r.commit_id == commit.commit_id)
                    record = &r;
            REQUIRE(record != nullptr);
            ConfusionCounts expected = classify_outcomes(commit.suggested, record->ground_truth,
                record->universe);
            CHECK(expected == commit.counts);
            (commit.subset == CommitSubset::Changed ? changed_sum : unchanged_sum) += expected;
        }
        CHECK(trial.changed.summed == changed_sum);
        CHECK(trial.unchanged.summed == unchanged_sum);

        MetricsReport micro = compute_metrics(changed_sum);
        CHECK(micro.f1.has_value() == trial.changed.micro.f1.has_value());
        if (micro.f1)
            CHECK(*micro.f1 == doctest::Approx(*trial.changed.micro.f1));
    }
}

TEST_CASE("console report prints trials, means, and the failure warning")
{
    Dataset dataset = scripted_dataset();
    PipelineHooks hooks = oracle_hooks(dataset);
    auto real_predict = hooks.predict_change;
    hooks.predict_change = [real_predict](const CodeChange& change, const VectorIndex& index) {
        if (change.file_path.find("F1") != std::string::npos)
            throw PipelineFailure("decide", "no verdict", {});
        return real_predict(change, index);
    };
    EvaluationRun run = evaluate_dataset(dataset, hooks, IndexMode::RawCode, 2);
    std::ostringstream out;
    print_report(out, run);
    std::string text = out.str();
    CHECK(text.find("2 trials") != std::string::npos);
    CHECK(text.find("trial 1") != std::string::npos);
    CHECK(text.find("mean") != std::string::npos);
    CHECK(text.find("avg FPs/commit") != std::string::npos);
    CHECK(text.find("WARNING") != std::string::npos);
}

TEST_CASE("missing hooks are a configuration error")
{
    Dataset dataset = scripted_dataset();
    CHECK_THROWS_AS(evaluate_dataset(dataset, {}, IndexMode::RawCode, 1), ConfigError);
}
