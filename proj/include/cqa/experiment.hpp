#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqa/boosting.hpp"
#include "cqa/kvconfig.hpp"

namespace cqa {

// Balanced under-sampling protocol: num_runs independent balanced subsets,
// each split train/test, with k-fold cross-validation inside the training
// portion and models trained per incremental feature-set prefix. The
// positive (closed) class is presumed the minority.
struct ExperimentConfig {
    int num_runs = 10;
    double train_fraction = 0.7;
    int cv_folds = 10;
    // each entry names a union of feature sets, e.g. "A" or "A,B,C"
    std::vector<std::string> feature_sets = {"A", "A,B", "A,B,C", "A,B,C,D"};
    BoostParams boost;
    std::uint64_t master_seed = 0;

    void validate() const;
};

// Key-value config file; unknown keys are usage errors.
ExperimentConfig parse_experiment_config(const kv::Document& doc);
ExperimentConfig load_experiment_config(const std::string& path);
std::string default_experiment_config_text();

// Binary confusion counts; the positive class is "closed".
struct ConfusionCounts {
    std::int64_t tp = 0;  // actual closed, predicted closed
    std::int64_t fn = 0;  // actual closed, predicted open
    std::int64_t fp = 0;  // actual open, predicted closed
    std::int64_t tn = 0;  // actual open, predicted open

    std::int64_t total() const { return tp + fn + fp + tn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }

    // [row][col]: rows actual {closed, open}, cols predicted {closed, open},
    // each row normalized to percentages (zeros for an empty row).
    std::array<std::array<double, 2>, 2> row_percentages() const;
};

struct ClassificationMetrics {
    ConfusionCounts confusion;
    double accuracy = 0.0;
    double precision = 0.0;  // positive class; 0 when undefined
    double recall = 0.0;     // positive class; 0 when undefined
    double f1 = 0.0;         // positive class; 0 when undefined
    bool f1_defined = true;
    double macro_f1 = 0.0;  // mean of both per-class F1 values
};

// Balanced index sets: every positive index plus an equal-size sample of
// negatives, drawn independently per run from seeds derived off `seed`.
// More positives than negatives is an error (`not_imbalanced`).
std::vector<std::vector<std::uint32_t>> undersample_runs(const std::vector<std::uint8_t>& labels,
                                                         int num_runs, std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> test;
};

// Stratified: each class contributes floor(train_fraction * class size) to
// the training side, remainder to test.
TrainTestSplit split_train_test(const std::vector<std::uint32_t>& indices,
                                const std::vector<std::uint8_t>& labels, double train_fraction,
                                std::uint64_t seed);

struct FoldPair {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> validation;
};

// Stratified k-fold partition; per class the fold sizes differ by at most 1.
std::vector<FoldPair> kfold(const std::vector<std::uint32_t>& indices,
                            const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed);

ClassificationMetrics classification_metrics(const std::vector<std::uint8_t>& predictions,
                                             const std::vector<std::uint8_t>& truth);

// Mann-Whitney statistic: P(score(pos) > score(neg)) + 0.5 P(equal) over
// all positive/negative pairs. Single-class truth is `degenerate_labels`.
double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& truth);

// One (run, feature set) cell of the experiment grid.
struct RunCellMetrics {
    int run = 0;
    std::string feature_set;
    std::vector<int> columns;

    // means over the k cross-validation folds inside the training portion
    double cv_accuracy = 0.0;
    double cv_f1 = 0.0;
    double cv_auc = 0.0;

    // held-out test portion
    double test_accuracy = 0.0;
    double test_f1 = 0.0;
    bool test_f1_defined = true;
    double test_macro_f1 = 0.0;
    double test_auc = 0.0;
    ConfusionCounts confusion;

    // split-gain importance mapped back onto all 19 canonical columns
    Eigen::VectorXd importance;
    bool importance_defined = false;
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation over runs
};

// Per-feature-set aggregation over all runs.
struct FeatureSetSummary {
    std::string feature_set;
    std::vector<int> columns;
    MetricSummary accuracy;
    MetricSummary f1;
    MetricSummary auc;
    MetricSummary cv_accuracy;
    MetricSummary cv_f1;
    MetricSummary cv_auc;
    ConfusionCounts pooled;  // counts summed over runs, then row-normalized
    Eigen::VectorXd mean_importance;
    bool importance_defined = false;
};

struct EvaluationReport {
    ExperimentConfig config;
    std::int64_t num_samples = 0;
    std::int64_t num_closed = 0;
    std::int64_t num_open = 0;
    std::int64_t run_size = 0;  // samples per balanced run

    std::vector<RunCellMetrics> cells;          // runs x feature sets
    std::vector<FeatureSetSummary> summaries;   // one per feature set

    // model trained on the best run (highest test accuracy on the final
    // feature set; ties resolved to the lowest run index)
    int best_run = 0;
    BoostedModel best_model;
};

// X must have all 19 canonical columns; labels[i] is 1 for closed.
// Deterministic given config.master_seed, at any thread count.
EvaluationReport run_experiment(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& labels,
                                const ExperimentConfig& config);

}  // namespace cqa
