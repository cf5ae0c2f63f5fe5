#include "cqa/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqa/common.hpp"
#include "cqa/features.hpp"
#include "cqa/rng.hpp"
#include "cqa/stats.hpp"

namespace cqa {

namespace {

// Seed-chain salts; with run_seed = derive_seed(master_seed, run) every
// sampling decision is reproducible in isolation.
constexpr std::uint64_t kSaltUndersample = 1;
constexpr std::uint64_t kSaltSplit = 2;
constexpr std::uint64_t kSaltFolds = 3;
constexpr std::uint64_t kSaltBoost = 4;

std::vector<char> parse_set_letters(const std::string& text) {
    std::vector<char> out;
    for (char raw : text) {
        if (raw == ',' || raw == ' ' || raw == '\t') continue;
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
        out.push_back(c);
    }
    if (out.empty()) fail_usage("feature set entry is empty");
    return out;
}

std::string normalize_set_label(const std::vector<char>& letters) {
    std::vector<char> uniq = letters;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::string label;
    for (char c : uniq) {
        if (!label.empty()) label += ',';
        label += c;
    }
    return label;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (num_runs < 1) fail_usage("num_runs must be >= 1");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        fail_usage("train_fraction must be strictly between 0 and 1");
    if (cv_folds < 2) fail_usage("cv_folds must be >= 2");
    if (feature_sets.empty()) fail_usage("feature_sets must name at least one feature set");
    for (const std::string& entry : feature_sets)
        feature_set_columns(parse_set_letters(entry));  // validates letters
    boost.validate();
}

ExperimentConfig parse_experiment_config(const kv::Document& doc) {
    static const std::vector<std::string> known = {
        "version",       "num_runs",   "train_fraction",     "cv_folds",
        "feature_sets",  "master_seed", "learning_rate",     "subsample_fraction",
        "num_trees",     "max_depth",  "min_samples_leaf",
    };
    doc.check_known(known);

    std::string version = doc.require("version");
    if (version != "1")
        fail_usage("config version " + version + " not supported (tool supports version 1): " +
                   doc.source);

    ExperimentConfig config;
    auto as_int = [&](std::string_view key, int fallback) {
        auto v = doc.get(key);
        if (!v) return fallback;
        auto parsed = kv::to_int(*v);
        if (!parsed) fail_usage(doc.source + ": " + std::string(key) + " is not an integer");
        return static_cast<int>(*parsed);
    };
    auto as_real = [&](std::string_view key, double fallback) {
        auto v = doc.get(key);
        if (!v) return fallback;
        auto parsed = kv::to_real(*v);
        if (!parsed) fail_usage(doc.source + ": " + std::string(key) + " is not a number");
        return *parsed;
    };

    config.num_runs = as_int("num_runs", config.num_runs);
    config.train_fraction = as_real("train_fraction", config.train_fraction);
    config.cv_folds = as_int("cv_folds", config.cv_folds);
    if (auto v = doc.get("master_seed")) {
        auto parsed = kv::to_int(*v);
        if (!parsed) fail_usage(doc.source + ": master_seed is not an integer");
        config.master_seed = static_cast<std::uint64_t>(*parsed);
    }
    if (auto v = doc.get("feature_sets")) {
        config.feature_sets.clear();
        std::string entry;
        std::istringstream stream(*v);
        while (std::getline(stream, entry, '|')) {
            std::string trimmed(kv::trim(entry));
            if (trimmed.empty()) fail_usage(doc.source + ": feature_sets has an empty entry");
            config.feature_sets.push_back(trimmed);
        }
        if (config.feature_sets.empty())
            fail_usage(doc.source + ": feature_sets must name at least one feature set");
    }

    config.boost.learning_rate = as_real("learning_rate", config.boost.learning_rate);
    config.boost.subsample_fraction =
        as_real("subsample_fraction", config.boost.subsample_fraction);
    config.boost.num_trees = as_int("num_trees", config.boost.num_trees);
    config.boost.max_depth = as_int("max_depth", config.boost.max_depth);
    config.boost.min_samples_leaf = as_int("min_samples_leaf", config.boost.min_samples_leaf);
    config.boost.seed = config.master_seed;

    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(kv::parse_file(path));
}

std::string default_experiment_config_text() {
    ExperimentConfig d;
    std::ostringstream out;
    out << "# balanced under-sampling experiment\n";
    out << "version = 1\n";
    out << "num_runs = " << d.num_runs << "\n";
    out << "train_fraction = " << d.train_fraction << "\n";
    out << "cv_folds = " << d.cv_folds << "\n";
    out << "feature_sets = A | A,B | A,B,C | A,B,C,D\n";
    out << "master_seed = " << d.master_seed << "\n";
    out << "# gradient boosting\n";
    out << "learning_rate = " << d.boost.learning_rate << "\n";
    out << "subsample_fraction = " << d.boost.subsample_fraction << "\n";
    out << "num_trees = " << d.boost.num_trees << "\n";
    out << "max_depth = " << d.boost.max_depth << "\n";
    out << "min_samples_leaf = " << d.boost.min_samples_leaf << "\n";
    return out.str();
}

std::array<std::array<double, 2>, 2> ConfusionCounts::row_percentages() const {
    std::array<std::array<double, 2>, 2> pct{};
    double closed_total = static_cast<double>(tp + fn);
    double open_total = static_cast<double>(fp + tn);
    if (closed_total > 0) {
        pct[0][0] = 100.0 * static_cast<double>(tp) / closed_total;
        pct[0][1] = 100.0 * static_cast<double>(fn) / closed_total;
    }
    if (open_total > 0) {
        pct[1][0] = 100.0 * static_cast<double>(fp) / open_total;
        pct[1][1] = 100.0 * static_cast<double>(tn) / open_total;
    }
    return pct;
}

std::vector<std::vector<std::uint32_t>> undersample_runs(const std::vector<std::uint8_t>& labels,
                                                         int num_runs, std::uint64_t seed) {
    if (num_runs < 1) fail_usage("num_runs must be >= 1");
    std::vector<std::uint32_t> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] ? positives : negatives).push_back(static_cast<std::uint32_t>(i));
    }
    if (positives.empty())
        fail_runtime("degenerate_labels", "under-sampling needs at least one positive sample");
    if (negatives.size() < positives.size())
        fail_runtime("not_imbalanced",
                     "positive class (" + std::to_string(positives.size()) +
                         ") outnumbers negative class (" + std::to_string(negatives.size()) +
                         "); balanced under-sampling presumes positives are the minority");

    std::vector<std::vector<std::uint32_t>> runs(static_cast<std::size_t>(num_runs));
    for (int r = 0; r < num_runs; ++r) {
        std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        std::vector<std::uint32_t> picks = sample_without_replacement(
            negatives.size(), positives.size(), derive_seed(run_seed, kSaltUndersample));
        std::vector<std::uint32_t>& out = runs[static_cast<std::size_t>(r)];
        out = positives;
        out.reserve(2 * positives.size());
        for (std::uint32_t p : picks) out.push_back(negatives[p]);
        std::sort(out.begin(), out.end());
    }
    return runs;
}

TrainTestSplit split_train_test(const std::vector<std::uint32_t>& indices,
                                const std::vector<std::uint8_t>& labels, double train_fraction,
                                std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        fail_usage("train_fraction must be strictly between 0 and 1");
    TrainTestSplit split;
    for (int cls = 1; cls >= 0; --cls) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i : indices)
            if (labels[i] == (cls == 1 ? 1 : 0)) members.push_back(i);
        std::size_t take = static_cast<std::size_t>(
            std::floor(train_fraction * static_cast<double>(members.size())));
        std::vector<std::uint32_t> picks = sample_without_replacement(
            members.size(), take, derive_seed(seed, static_cast<std::uint64_t>(cls)));
        std::vector<bool> in_train(members.size(), false);
        for (std::uint32_t p : picks) in_train[p] = true;
        for (std::size_t p = 0; p < members.size(); ++p)
            (in_train[p] ? split.train : split.test).push_back(members[p]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::vector<FoldPair> kfold(const std::vector<std::uint32_t>& indices,
                            const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed) {
    if (k < 2) fail_usage("cv_folds must be >= 2");
    if (static_cast<std::size_t>(k) > indices.size())
        fail_usage("cv_folds (" + std::to_string(k) + ") exceeds the sample count (" +
                   std::to_string(indices.size()) + ")");

    std::vector<std::vector<std::uint32_t>> fold_members(static_cast<std::size_t>(k));
    for (int cls = 1; cls >= 0; --cls) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i : indices)
            if (labels[i] == (cls == 1 ? 1 : 0)) members.push_back(i);
        std::vector<std::uint32_t> perm =
            shuffled_range(members.size(), derive_seed(seed, static_cast<std::uint64_t>(cls)));
        for (std::size_t p = 0; p < perm.size(); ++p)
            fold_members[p % static_cast<std::size_t>(k)].push_back(members[perm[p]]);
    }

    std::vector<FoldPair> folds(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < folds.size(); ++f) {
        folds[f].validation = fold_members[f];
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
        for (std::size_t other = 0; other < fold_members.size(); ++other) {
            if (other == f) continue;
            folds[f].train.insert(folds[f].train.end(), fold_members[other].begin(),
                                  fold_members[other].end());
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

ClassificationMetrics classification_metrics(const std::vector<std::uint8_t>& predictions,
                                             const std::vector<std::uint8_t>& truth) {
    if (predictions.size() != truth.size())
        fail_usage("prediction count does not match truth count");
    if (truth.empty()) fail_usage("metrics need at least one sample");

    ClassificationMetrics m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            (predictions[i] ? m.confusion.tp : m.confusion.fn) += 1;
        } else {
            (predictions[i] ? m.confusion.fp : m.confusion.tn) += 1;
        }
    }
    const ConfusionCounts& c = m.confusion;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());

    bool precision_defined = c.tp + c.fp > 0;
    bool recall_defined = c.tp + c.fn > 0;
    m.precision = precision_defined ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                                    : 0.0;
    m.recall =
        recall_defined ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1_defined = precision_defined && recall_defined && (m.precision + m.recall > 0.0);
    m.f1 = m.f1_defined ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;

    double precision_neg =
        c.tn + c.fn > 0 ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fn) : 0.0;
    double recall_neg =
        c.tn + c.fp > 0 ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp) : 0.0;
    double f1_neg = precision_neg + recall_neg > 0.0
                        ? 2.0 * precision_neg * recall_neg / (precision_neg + recall_neg)
                        : 0.0;
    m.macro_f1 = 0.5 * (m.f1 + f1_neg);
    return m;
}

double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& truth) {
    if (scores.size() != truth.size()) fail_usage("score count does not match truth count");
    std::size_t n_pos = 0;
    for (std::uint8_t t : truth) n_pos += t ? 1 : 0;
    std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        fail_runtime("degenerate_labels", "AUC needs both classes in the truth labels");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average 1-based ranks within tie groups; sum of half-integers stays exact
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = static_cast<double>(i + j + 1) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (truth[order[k]]) positive_rank_sum += avg_rank;
        i = j;
    }
    double u = positive_rank_sum -
               static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& X, const std::vector<std::uint32_t>& rows,
                       const std::vector<int>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                X(rows[r], cols[c]);
    return out;
}

std::vector<std::uint8_t> gather_labels(const std::vector<std::uint8_t>& labels,
                                        const std::vector<std::uint32_t>& rows) {
    std::vector<std::uint8_t> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = labels[rows[r]];
    return out;
}

std::vector<std::uint8_t> threshold_predictions(const Eigen::VectorXd& proba) {
    std::vector<std::uint8_t> preds(static_cast<std::size_t>(proba.size()));
    for (Eigen::Index i = 0; i < proba.size(); ++i)
        preds[static_cast<std::size_t>(i)] = proba(i) >= 0.5 ? 1 : 0;
    return preds;
}

struct CellResult {
    RunCellMetrics metrics;
    BoostedModel final_model;
};

CellResult evaluate_cell(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& labels,
                         const ExperimentConfig& config,
                         const std::vector<std::uint32_t>& run_indices, int run,
                         const std::string& fs_label, const std::vector<int>& cols) {
    CellResult cell;
    RunCellMetrics& out = cell.metrics;
    out.run = run;
    out.feature_set = fs_label;
    out.columns = cols;

    std::uint64_t run_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(run));
    TrainTestSplit split = split_train_test(run_indices, labels, config.train_fraction,
                                            derive_seed(run_seed, kSaltSplit));

    std::vector<FoldPair> folds =
        kfold(split.train, labels, config.cv_folds, derive_seed(run_seed, kSaltFolds));
    std::vector<double> fold_accuracy, fold_f1, fold_auc;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        BoostParams params = config.boost;
        params.seed = derive_seed(run_seed, kSaltBoost, static_cast<std::uint64_t>(f) + 1);
        BoostedModel model =
            fit_boosted(gather(X, folds[f].train, cols), gather_labels(labels, folds[f].train),
                        params);
        Eigen::VectorXd proba = model.predict_proba_rows(gather(X, folds[f].validation, cols));
        std::vector<std::uint8_t> val_truth = gather_labels(labels, folds[f].validation);
        ClassificationMetrics m = classification_metrics(threshold_predictions(proba), val_truth);
        fold_accuracy.push_back(m.accuracy);
        fold_f1.push_back(m.f1);
        fold_auc.push_back(
            auc(std::vector<double>(proba.data(), proba.data() + proba.size()), val_truth));
    }
    out.cv_accuracy = stats::mean(fold_accuracy);
    out.cv_f1 = stats::mean(fold_f1);
    out.cv_auc = stats::mean(fold_auc);

    BoostParams params = config.boost;
    params.seed = derive_seed(run_seed, kSaltBoost, 0);
    cell.final_model = fit_boosted(gather(X, split.train, cols),
                                   gather_labels(labels, split.train), params);
    Eigen::VectorXd proba = cell.final_model.predict_proba_rows(gather(X, split.test, cols));
    std::vector<std::uint8_t> test_truth = gather_labels(labels, split.test);
    ClassificationMetrics m = classification_metrics(threshold_predictions(proba), test_truth);
    out.test_accuracy = m.accuracy;
    out.test_f1 = m.f1;
    out.test_f1_defined = m.f1_defined;
    out.test_macro_f1 = m.macro_f1;
    out.test_auc =
        auc(std::vector<double>(proba.data(), proba.data() + proba.size()), test_truth);
    out.confusion = m.confusion;

    out.importance = Eigen::VectorXd::Zero(kNumFeatures);
    for (std::size_t c = 0; c < cols.size(); ++c)
        out.importance(cols[c]) = cell.final_model.importance(static_cast<Eigen::Index>(c));
    out.importance_defined = cell.final_model.importance_defined;
    return cell;
}

}  // namespace

EvaluationReport run_experiment(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& labels,
                                const ExperimentConfig& config) {
    config.validate();
    if (X.cols() != kNumFeatures)
        fail_usage("feature matrix must have " + std::to_string(kNumFeatures) +
                   " columns, got " + std::to_string(X.cols()));
    if (static_cast<std::size_t>(X.rows()) != labels.size())
        fail_usage("label count does not match feature matrix rows");

    EvaluationReport report;
    report.config = config;
    report.num_samples = static_cast<std::int64_t>(labels.size());
    for (std::uint8_t l : labels) (l ? report.num_closed : report.num_open) += 1;

    std::vector<std::vector<std::uint32_t>> runs =
        undersample_runs(labels, config.num_runs, config.master_seed);
    report.run_size = static_cast<std::int64_t>(runs.front().size());

    struct FsSpec {
        std::string label;
        std::vector<int> cols;
    };
    std::vector<FsSpec> fs;
    for (const std::string& entry : config.feature_sets) {
        std::vector<char> letters = parse_set_letters(entry);
        fs.push_back({normalize_set_label(letters), feature_set_columns(letters)});
    }

    const std::size_t num_fs = fs.size();
    const std::size_t grid = runs.size() * num_fs;
    std::vector<CellResult> cells(grid);
    parallel_for(grid, [&](std::size_t g) {
        std::size_t r = g / num_fs;
        std::size_t f = g % num_fs;
        try {
            cells[g] = evaluate_cell(X, labels, config, runs[r], static_cast<int>(r),
                                     fs[f].label, fs[f].cols);
        } catch (const CqaError& e) {
            throw CqaError(e.kind(), e.code(),
                           "run " + std::to_string(r) + ", feature set " + fs[f].label + ": " +
                               e.what());
        }
    });

    report.cells.reserve(grid);
    for (const CellResult& cell : cells) report.cells.push_back(cell.metrics);

    for (std::size_t f = 0; f < num_fs; ++f) {
        FeatureSetSummary s;
        s.feature_set = fs[f].label;
        s.columns = fs[f].cols;
        std::vector<double> acc, f1, aucs, cv_acc, cv_f1, cv_auc;
        s.mean_importance = Eigen::VectorXd::Zero(kNumFeatures);
        s.importance_defined = true;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const RunCellMetrics& cell = cells[r * num_fs + f].metrics;
            acc.push_back(cell.test_accuracy);
            f1.push_back(cell.test_f1);
            aucs.push_back(cell.test_auc);
            cv_acc.push_back(cell.cv_accuracy);
            cv_f1.push_back(cell.cv_f1);
            cv_auc.push_back(cell.cv_auc);
            s.pooled += cell.confusion;
            s.mean_importance += cell.importance;
            s.importance_defined = s.importance_defined && cell.importance_defined;
        }
        s.mean_importance /= static_cast<double>(runs.size());
        s.accuracy = {stats::mean(acc), stats::sample_std(acc)};
        s.f1 = {stats::mean(f1), stats::sample_std(f1)};
        s.auc = {stats::mean(aucs), stats::sample_std(aucs)};
        s.cv_accuracy = {stats::mean(cv_acc), stats::sample_std(cv_acc)};
        s.cv_f1 = {stats::mean(cv_f1), stats::sample_std(cv_f1)};
        s.cv_auc = {stats::mean(cv_auc), stats::sample_std(cv_auc)};
        report.summaries.push_back(std::move(s));
    }

    std::size_t last_fs = num_fs - 1;
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (cells[r * num_fs + last_fs].metrics.test_accuracy >
            cells[best * num_fs + last_fs].metrics.test_accuracy)
            best = r;
    }
    report.best_run = static_cast<int>(best);
    report.best_model = cells[best * num_fs + last_fs].final_model;
    return report;
}

}  // namespace cqa
