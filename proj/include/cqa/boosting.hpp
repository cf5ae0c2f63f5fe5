#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqa {

struct BoostParams {
    double learning_rate = 0.1;
    double subsample_fraction = 0.5;
    int num_trees = 100;
    int max_depth = 3;
    int min_samples_leaf = 20;
    std::uint64_t seed = 0;

    void validate() const;  // usage error on out-of-range fields
};

// Flat node array; `feature < 0` marks a leaf holding `value`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double gain = 0.0;  // training squared-error decrease at this split
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    template <typename GetFeature>
    double predict_with(GetFeature&& value_of) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = value_of(n.feature) < n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    double predict(const Eigen::VectorXd& x) const {
        return predict_with([&](int f) { return x(f); });
    }
};

struct BoostedModel {
    BoostParams params;
    int num_features = 0;
    double initial_score = 0.0;  // prior log-odds F0
    // Training prevalence. sigmoid(log-odds(p)) can land 1 ulp off p, so the
    // tree-less ensemble predicts this stored value instead of the roundtrip.
    double initial_proba = 0.5;
    std::vector<RegressionTree> trees;
    Eigen::VectorXd importance;     // per feature, sums to 1 when defined
    bool importance_defined = false;  // false when no split was ever made
    std::vector<double> training_deviance;  // mean deviance after each tree

    double decision_value(const Eigen::VectorXd& x) const;
    double predict_proba(const Eigen::VectorXd& x) const;
    bool predict(const Eigen::VectorXd& x, double threshold = 0.5) const;
    // Scores for every row of X.
    Eigen::VectorXd predict_proba_rows(const Eigen::MatrixXd& X) const;
};

// Stochastic gradient boosting for binary labels under binomial deviance:
// trees fit residuals y - sigmoid(F) on a fresh without-replacement subsample,
// leaves take the one-step Newton value, and the learning rate scales each
// tree's contribution. Bit-identical for a given seed at any thread count.
BoostedModel fit_boosted(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
                         const BoostParams& params);

// Normalized per-feature split-gain totals (all zeros when undefined).
Eigen::VectorXd feature_importance(const BoostedModel& model);

std::string model_to_json(const BoostedModel& model);
BoostedModel model_from_json(const std::string& text, const std::string& source);
void save_model(const BoostedModel& model, const std::string& path);
BoostedModel load_model(const std::string& path);

}  // namespace cqa
