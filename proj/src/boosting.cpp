#include "cqa/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "cqa/common.hpp"
#include "cqa/rng.hpp"

namespace cqa {

namespace {

using json = nlohmann::json;

double sigmoid(double z) {
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        double e = std::exp(z);
        s = e / (1.0 + e);
    }
    // keep the result strictly inside (0,1) even when exp saturates
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::clamp(s, std::numeric_limits<double>::min(), hi);
}

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

struct SplitCandidate {
    bool found = false;
    double gain = 0.0;
    double threshold = 0.0;
};

// Best squared-error split of `members` on one feature column. `members`
// arrive ascending by sample index so all accumulation orders are fixed.
SplitCandidate best_split_for_feature(const Eigen::MatrixXd& X, const Eigen::VectorXd& residual,
                                      const std::vector<std::uint32_t>& members, int feature,
                                      int min_samples_leaf) {
    const std::size_t n = members.size();
    std::vector<std::pair<double, std::uint32_t>> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = {X(static_cast<Eigen::Index>(members[i]), feature), members[i]};
    }
    std::sort(order.begin(), order.end());

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += residual(order[i].second);

    SplitCandidate best;
    double left_sum = 0.0;
    const std::size_t min_leaf = static_cast<std::size_t>(min_samples_leaf);
    for (std::size_t k = 1; k < n; ++k) {
        left_sum += residual(order[k - 1].second);
        double lo = order[k - 1].first;
        double hi = order[k].first;
        if (lo == hi) continue;
        if (k < min_leaf || n - k < min_leaf) continue;
        double threshold = lo + 0.5 * (hi - lo);
        if (!(threshold > lo)) continue;  // values too close to separate
        double right_sum = total - left_sum;
        double gain = left_sum * left_sum / static_cast<double>(k) +
                      right_sum * right_sum / static_cast<double>(n - k) -
                      total * total / static_cast<double>(n);
        if (!best.found || gain > best.gain) {
            best.found = true;
            best.gain = gain;
            best.threshold = threshold;
        }
    }
    return best;
}

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& residual;
    const Eigen::VectorXd& hessian;  // sigma(F)(1 - sigma(F)) per sample
    const BoostParams& params;
    RegressionTree tree;
    Eigen::VectorXd& gain_per_feature;

    int make_leaf(const std::vector<std::uint32_t>& members) {
        double num = 0.0, den = 0.0;
        for (std::uint32_t i : members) {
            num += residual(i);
            den += hessian(i);
        }
        TreeNode leaf;
        leaf.value = num / std::max(den, 1e-12);
        tree.nodes.push_back(leaf);
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int build(const std::vector<std::uint32_t>& members, int depth) {
        const int num_features = static_cast<int>(X.cols());
        if (depth >= params.max_depth ||
            members.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf))
            return make_leaf(members);

        SplitCandidate best;
        int best_feature = -1;
        std::vector<SplitCandidate> per_feature(static_cast<std::size_t>(num_features));
        auto search = [&](std::size_t f) {
            per_feature[f] = best_split_for_feature(X, residual, members, static_cast<int>(f),
                                                    params.min_samples_leaf);
        };
        // Feature-parallel search; the sequential reduction below keeps the
        // choice identical at any thread count.
        if (members.size() >= 4096) {
            parallel_for(static_cast<std::size_t>(num_features), search);
        } else {
            for (std::size_t f = 0; f < static_cast<std::size_t>(num_features); ++f) search(f);
        }
        // Zero-gain splits stay eligible: a balanced split can cancel in the
        // residual sums yet open up gain one level deeper (the XOR pattern).
        for (int f = 0; f < num_features; ++f) {
            const SplitCandidate& c = per_feature[static_cast<std::size_t>(f)];
            if (!c.found) continue;
            if (!best.found || c.gain > best.gain) {
                best = c;
                best_feature = f;
            }
        }
        if (!best.found) return make_leaf(members);

        std::vector<std::uint32_t> left, right;
        left.reserve(members.size());
        right.reserve(members.size());
        for (std::uint32_t i : members) {
            if (X(static_cast<Eigen::Index>(i), best_feature) < best.threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }

        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(node_id)].threshold = best.threshold;
        tree.nodes[static_cast<std::size_t>(node_id)].gain = best.gain;
        gain_per_feature(best_feature) += best.gain;

        int left_id = build(left, depth + 1);
        int right_id = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
        tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
        return node_id;
    }
};

}  // namespace

void BoostParams::validate() const {
    if (!(learning_rate > 0.0)) fail_usage("learning_rate must be > 0");
    if (!(subsample_fraction > 0.0) || subsample_fraction > 1.0)
        fail_usage("subsample_fraction must be in (0, 1]");
    if (num_trees < 0) fail_usage("num_trees must be >= 0");
    if (max_depth < 1) fail_usage("max_depth must be >= 1");
    if (min_samples_leaf < 1) fail_usage("min_samples_leaf must be >= 1");
}

double BoostedModel::decision_value(const Eigen::VectorXd& x) const {
    double f = initial_score;
    for (const auto& tree : trees) f += params.learning_rate * tree.predict(x);
    return f;
}

double BoostedModel::predict_proba(const Eigen::VectorXd& x) const {
    if (trees.empty()) return initial_proba;
    return sigmoid(decision_value(x));
}

bool BoostedModel::predict(const Eigen::VectorXd& x, double threshold) const {
    return predict_proba(x) >= threshold;
}

Eigen::VectorXd BoostedModel::predict_proba_rows(const Eigen::MatrixXd& X) const {
    if (trees.empty()) return Eigen::VectorXd::Constant(X.rows(), initial_proba);
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        double f = initial_score;
        for (const auto& tree : trees)
            f += params.learning_rate * tree.predict_with([&](int c) { return X(r, c); });
        out(r) = sigmoid(f);
    }
    return out;
}

BoostedModel fit_boosted(const Eigen::MatrixXd& X, const std::vector<std::uint8_t>& y,
                         const BoostParams& params) {
    params.validate();
    const std::size_t n = static_cast<std::size_t>(X.rows());
    if (n != y.size())
        fail_runtime("label count " + std::to_string(y.size()) + " does not match " +
                     std::to_string(n) + " feature rows");
    if (n < 2) fail_runtime("degenerate_labels", "training needs at least 2 samples");

    std::size_t positives = 0;
    for (std::uint8_t label : y) positives += label ? 1 : 0;
    if (positives == 0 || positives == n)
        fail_runtime("degenerate_labels", "training labels are single-class");

    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index c = 0; c < X.cols(); ++c)
            if (!std::isfinite(X(r, c)))
                fail_runtime("non-finite feature value at row " + std::to_string(r) +
                             " column " + std::to_string(c));

    BoostedModel model;
    model.params = params;
    model.num_features = static_cast<int>(X.cols());
    double p = static_cast<double>(positives) / static_cast<double>(n);
    model.initial_proba = p;
    model.initial_score = std::log(p / (1.0 - p));

    Eigen::VectorXd gain_per_feature = Eigen::VectorXd::Zero(X.cols());
    Eigen::VectorXd F = Eigen::VectorXd::Constant(X.rows(), model.initial_score);
    Eigen::VectorXd residual(X.rows()), hessian(X.rows());

    std::size_t subsample_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(params.subsample_fraction *
                                                          static_cast<double>(n)));
    subsample_size = std::min(subsample_size, n);

    for (int m = 0; m < params.num_trees; ++m) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double prob = sigmoid(F(i));
            residual(i) = static_cast<double>(y[static_cast<std::size_t>(i)]) - prob;
            hessian(i) = prob * (1.0 - prob);
        }

        std::vector<std::uint32_t> members =
            subsample_size == n
                ? [&] {
                      std::vector<std::uint32_t> all(n);
                      for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
                      return all;
                  }()
                : sample_without_replacement(
                      n, subsample_size,
                      derive_seed(params.seed, static_cast<std::uint64_t>(m)));

        TreeBuilder builder{X, residual, hessian, params, {}, gain_per_feature};
        builder.build(members, 0);
        model.trees.push_back(std::move(builder.tree));
        const RegressionTree& tree = model.trees.back();

        double deviance = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            F(i) += params.learning_rate * tree.predict_with([&](int c) { return X(i, c); });
            // -log p(y | F): log(1+e^F) - y*F
            deviance += log1pexp(F(i)) - static_cast<double>(y[static_cast<std::size_t>(i)]) * F(i);
        }
        model.training_deviance.push_back(deviance / static_cast<double>(n));
    }

    double total_gain = gain_per_feature.sum();
    if (total_gain > 0.0) {
        model.importance = gain_per_feature / total_gain;
        model.importance_defined = true;
    } else {
        model.importance = Eigen::VectorXd::Zero(X.cols());
        model.importance_defined = false;
    }
    return model;
}

Eigen::VectorXd feature_importance(const BoostedModel& model) { return model.importance; }

namespace {

constexpr const char* kModelFormat = "cqa-boost";
constexpr int kModelVersion = 1;

}  // namespace

std::string model_to_json(const BoostedModel& model) {
    json doc;
    doc["format"] = kModelFormat;
    doc["format_version"] = kModelVersion;
    doc["params"] = {
        {"learning_rate", model.params.learning_rate},
        {"subsample_fraction", model.params.subsample_fraction},
        {"num_trees", model.params.num_trees},
        {"max_depth", model.params.max_depth},
        {"min_samples_leaf", model.params.min_samples_leaf},
        {"seed", model.params.seed},
    };
    doc["num_features"] = model.num_features;
    doc["initial_score"] = model.initial_score;
    doc["initial_proba"] = model.initial_proba;
    doc["importance_defined"] = model.importance_defined;
    doc["importance"] = std::vector<double>(model.importance.data(),
                                            model.importance.data() + model.importance.size());
    doc["training_deviance"] = model.training_deviance;

    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"value", n.value},
                             {"gain", n.gain}});
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2) + "\n";
}

BoostedModel model_from_json(const std::string& text, const std::string& source) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail_runtime("model file is not valid JSON: " + source);
    try {
        if (doc.at("format").get<std::string>() != kModelFormat)
            fail_runtime("not a model file: " + source);
        int version = doc.at("format_version").get<int>();
        if (version != kModelVersion)
            fail_runtime("model format version " + std::to_string(version) +
                         " not supported (tool supports version " +
                         std::to_string(kModelVersion) + "): " + source);

        BoostedModel model;
        const json& p = doc.at("params");
        model.params.learning_rate = p.at("learning_rate").get<double>();
        model.params.subsample_fraction = p.at("subsample_fraction").get<double>();
        model.params.num_trees = p.at("num_trees").get<int>();
        model.params.max_depth = p.at("max_depth").get<int>();
        model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
        model.params.seed = p.at("seed").get<std::uint64_t>();
        model.num_features = doc.at("num_features").get<int>();
        model.initial_score = doc.at("initial_score").get<double>();
        model.initial_proba = doc.at("initial_proba").get<double>();
        model.importance_defined = doc.at("importance_defined").get<bool>();

        auto importance = doc.at("importance").get<std::vector<double>>();
        model.importance = Eigen::Map<Eigen::VectorXd>(importance.data(),
                                                       static_cast<Eigen::Index>(importance.size()));
        model.training_deviance = doc.at("training_deviance").get<std::vector<double>>();

        for (const json& jt : doc.at("trees")) {
            RegressionTree tree;
            for (const json& jn : jt.at("nodes")) {
                TreeNode n;
                n.feature = jn.at("feature").get<int>();
                n.threshold = jn.at("threshold").get<double>();
                n.left = jn.at("left").get<int>();
                n.right = jn.at("right").get<int>();
                n.value = jn.at("value").get<double>();
                n.gain = jn.at("gain").get<double>();
                if (n.feature >= model.num_features)
                    fail_runtime("model node references feature " + std::to_string(n.feature) +
                                 " beyond declared width: " + source);
                tree.nodes.push_back(n);
            }
            if (tree.nodes.empty()) fail_runtime("model contains an empty tree: " + source);
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const json::exception& e) {
        fail_runtime("malformed model file " + source + ": " + e.what());
    }
}

void save_model(const BoostedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_runtime("cannot write model: " + path);
    out << model_to_json(model);
    out.flush();
    if (!out) fail_runtime("cannot write model: " + path);
}

BoostedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_runtime("cannot open model: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text, path);
}

}  // namespace cqa
