#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cqa/analytics.hpp"
#include "cqa/boosting.hpp"
#include "cqa/common.hpp"
#include "cqa/csv.hpp"
#include "cqa/dump_parser.hpp"
#include "cqa/experiment.hpp"
#include "cqa/features.hpp"
#include "cqa/mapping.hpp"
#include "cqa/report.hpp"
#include "cqa/snapshot.hpp"

namespace fs = std::filesystem;
using cqa::fail_usage;

namespace {

const std::vector<std::string>& analytic_names() {
    static const std::vector<std::string> names = {
        "category-distribution", "monthly-closed-ratio", "newcomer-correlation",
        "close-vote-distribution", "favorite-vote-cdf", "closure-time",
        "ntr", "answer-patterns", "question-status", "code-prevalence",
    };
    return names;
}

std::string ensure_out_dir(const std::string& out) {
    if (out.empty()) fail_usage("--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail_usage("cannot create output directory " + out + ": " + ec.message());
    return out;
}

void add_output(cqa::report::RunManifest& manifest, const std::string& path,
                const std::string& content) {
    manifest.outputs.push_back({path, cqa::report::write_artifact(path, content)});
}

void write_manifest(cqa::report::RunManifest& manifest, const std::string& dir) {
    std::string path = (fs::path(dir) / "manifest.json").string();
    cqa::report::write_artifact(path, cqa::report::manifest_json(manifest));
}

struct IngestArgs {
    std::string dump_dir;
    std::string mapping;
    std::string out;
    std::string snapshot;
    int threads = 0;
};

int cmd_ingest(const IngestArgs& args) {
    cqa::set_max_threads(args.threads);
    ensure_out_dir(args.out);
    cqa::DumpMappingConfig mapping =
        args.mapping.empty() ? cqa::DumpMappingConfig{} : cqa::load_mapping(args.mapping);

    cqa::ParseResult result = cqa::parse_dump(args.dump_dir, mapping);
    std::string snapshot_path =
        args.snapshot.empty() ? (fs::path(args.out) / "dataset.snapshot").string()
                              : args.snapshot;
    cqa::SnapshotInfo info = cqa::snapshot_save(result.dataset, snapshot_path);

    cqa::report::RunManifest manifest;
    manifest.command = "ingest";
    manifest.parameters["dump_dir"] = args.dump_dir;
    manifest.parameters["mapping"] = args.mapping.empty() ? "builtin" : args.mapping;
    manifest.parameters["dataset_id"] = info.id;
    for (const auto& file : result.report.files) {
        std::string path = (fs::path(args.dump_dir) / file.file).string();
        manifest.inputs.push_back({path, cqa::report::digest_file(path)});
    }
    if (!args.mapping.empty())
        manifest.inputs.push_back({args.mapping, cqa::report::digest_file(args.mapping)});

    manifest.outputs.push_back({snapshot_path, cqa::report::digest_file(snapshot_path)});
    add_output(manifest, (fs::path(args.out) / "ingest-report.json").string(),
               cqa::report::ingest_report_json(result.report));
    write_manifest(manifest, args.out);
    return 0;
}

struct CharacterizeArgs {
    std::string snapshot;
    std::string out;
    std::vector<std::string> which;
    double epsilon = 1e-6;
    int score_threshold = 5;
    int threads = 0;
};

int cmd_characterize(const CharacterizeArgs& args) {
    cqa::set_max_threads(args.threads);

    std::vector<std::string> selected = args.which;
    if (selected.empty() || (selected.size() == 1 && selected[0] == "all"))
        selected = analytic_names();
    for (const std::string& name : selected) {
        if (std::find(analytic_names().begin(), analytic_names().end(), name) ==
            analytic_names().end()) {
            std::string valid = "all";
            for (const std::string& n : analytic_names()) valid += ", " + n;
            fail_usage("unknown analytic \"" + name + "\"; valid names: " + valid);
        }
    }

    auto [dataset, info] = cqa::snapshot_load(args.snapshot);
    ensure_out_dir(args.out);

    cqa::report::RunManifest manifest;
    manifest.command = "characterize";
    manifest.inputs.push_back({args.snapshot, cqa::report::digest_file(args.snapshot)});
    manifest.parameters["dataset_id"] = info.id;
    manifest.parameters["epsilon"] = cqa::csv::format_real(args.epsilon);
    manifest.parameters["score_threshold"] = std::to_string(args.score_threshold);

    auto emit = [&](const std::string& name, const std::string& csv, const std::string& json) {
        add_output(manifest, (fs::path(args.out) / (name + ".csv")).string(), csv);
        add_output(manifest, (fs::path(args.out) / (name + ".json")).string(), json);
    };

    namespace rep = cqa::report;
    auto compute = [&](const std::string& name) {
        if (name == "category-distribution") {
            auto d = cqa::category_distribution(dataset);
            emit(name, rep::category_distribution_csv(d), rep::category_distribution_json(d));
        } else if (name == "monthly-closed-ratio") {
            auto d = cqa::monthly_closed_ratio(dataset);
            emit(name, rep::monthly_closed_ratio_csv(d), rep::monthly_closed_ratio_json(d));
        } else if (name == "newcomer-correlation") {
            auto d = cqa::newcomer_correlation(dataset);
            emit(name, rep::newcomer_correlation_csv(d), rep::newcomer_correlation_json(d));
        } else if (name == "close-vote-distribution") {
            auto d = cqa::close_vote_distribution(dataset, true);
            emit(name, rep::close_vote_distribution_csv(d),
                 rep::close_vote_distribution_json(d));
        } else if (name == "favorite-vote-cdf") {
            auto d = cqa::favorite_vote_cdf(dataset, cqa::default_favorite_thresholds(), true);
            emit(name, rep::favorite_vote_cdf_csv(d), rep::favorite_vote_cdf_json(d));
        } else if (name == "closure-time") {
            auto d = cqa::closure_time_stats(dataset);
            emit(name, rep::closure_time_csv(d), rep::closure_time_json(d));
        } else if (name == "ntr") {
            auto d = cqa::ntr(dataset, args.epsilon);
            emit(name, rep::ntr_csv(d), rep::ntr_json(d));
        } else if (name == "answer-patterns") {
            auto d = cqa::answer_pattern_stats(dataset, args.score_threshold);
            emit(name, rep::answer_patterns_csv(d), rep::answer_patterns_json(d));
        } else if (name == "question-status") {
            auto d = cqa::question_status_distribution(dataset);
            emit(name, rep::question_status_csv(d), rep::question_status_json(d));
        } else if (name == "code-prevalence") {
            auto d = cqa::code_snippet_prevalence(dataset);
            emit(name, rep::code_prevalence_csv(d), rep::code_prevalence_json(d));
        }
    };
    for (const std::string& name : selected) {
        try {
            compute(name);
        } catch (const cqa::CqaError& e) {
            // Name the analytic that could not be computed on this dataset.
            throw cqa::CqaError(e.kind(), e.code(), "analytic " + name + ": " + e.what());
        }
    }
    write_manifest(manifest, args.out);
    return 0;
}

struct FeaturizeArgs {
    std::string snapshot;
    std::string out;
    int popular_k = 100;
    std::vector<std::string> site_hosts = {"stackoverflow.com"};
    std::string mode;  // empty = dataset default
    std::string fs_source = "favorite_count";
    int threads = 0;
};

int cmd_featurize(const FeaturizeArgs& args) {
    cqa::set_max_threads(args.threads);
    auto [dataset, info] = cqa::snapshot_load(args.snapshot);

    cqa::FeatureOptions opts;
    opts.site_hosts = args.site_hosts;
    if (args.mode.empty()) {
        opts.mode = cqa::default_score_mode(dataset);
    } else {
        auto mode = cqa::score_mode_from_name(args.mode);
        if (!mode) fail_usage("unknown --mode \"" + args.mode + "\" (snapshot or strict)");
        opts.mode = *mode;
    }
    if (args.fs_source == "favorite_count") {
        opts.fs_source = cqa::FavoriteScoreSource::favorite_count;
    } else if (args.fs_source == "post_score") {
        opts.fs_source = cqa::FavoriteScoreSource::post_score;
    } else {
        fail_usage("unknown --fs-source \"" + args.fs_source +
                   "\" (favorite_count or post_score)");
    }

    cqa::PopularTagSet popular = cqa::compute_popular_tags(dataset, args.popular_k);
    cqa::FeatureMatrix matrix = cqa::featurize_all(dataset, popular, opts);

    std::ostringstream csv;
    cqa::write_feature_matrix_csv(csv, matrix);

    fs::path out_path(args.out);
    if (out_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out_path.parent_path(), ec);
        if (ec)
            fail_usage("cannot create output directory " + out_path.parent_path().string() +
                       ": " + ec.message());
    }

    cqa::report::RunManifest manifest;
    manifest.command = "featurize";
    manifest.inputs.push_back({args.snapshot, cqa::report::digest_file(args.snapshot)});
    manifest.parameters["dataset_id"] = info.id;
    manifest.parameters["popular_k"] = std::to_string(args.popular_k);
    manifest.parameters["score_mode"] = std::string(cqa::score_mode_name(opts.mode));
    manifest.parameters["fs_source"] = args.fs_source;
    std::string hosts;
    for (const std::string& h : args.site_hosts) hosts += (hosts.empty() ? "" : ",") + h;
    manifest.parameters["site_hosts"] = hosts;
    manifest.parameters["rows"] = std::to_string(matrix.rows());
    manifest.parameters["skipped_missing_owner"] = std::to_string(matrix.skipped_missing_owner);
    manifest.parameters["text_fallback_rows"] = std::to_string(matrix.text_fallback_rows);

    add_output(manifest, args.out, csv.str());
    write_manifest(manifest, out_path.has_parent_path() ? out_path.parent_path().string() : ".");
    return 0;
}

struct TrainEvalArgs {
    std::string matrix;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
};

int cmd_train_eval(const TrainEvalArgs& args) {
    cqa::set_max_threads(args.threads);

    cqa::ExperimentConfig config;
    if (!args.config.empty()) config = cqa::load_experiment_config(args.config);
    if (args.seed_given) {
        config.master_seed = args.seed;
        config.boost.seed = args.seed;
    }
    config.validate();

    std::ifstream in(args.matrix, std::ios::binary);
    if (!in) fail_usage("cannot open feature matrix: " + args.matrix);
    cqa::FeatureMatrix matrix = cqa::read_feature_matrix_csv(in, args.matrix);

    cqa::EvaluationReport result = cqa::run_experiment(matrix.X, matrix.labels, config);
    ensure_out_dir(args.out);

    cqa::report::RunManifest manifest;
    manifest.command = "train-eval";
    manifest.inputs.push_back({args.matrix, cqa::report::digest_file(args.matrix)});
    if (!args.config.empty())
        manifest.inputs.push_back({args.config, cqa::report::digest_file(args.config)});
    manifest.parameters["config"] = args.config.empty() ? "builtin" : args.config;
    manifest.parameters["master_seed"] = std::to_string(config.master_seed);
    manifest.parameters["best_run"] = std::to_string(result.best_run);

    add_output(manifest, (fs::path(args.out) / "evaluation-report.json").string(),
               cqa::report::evaluation_report_json(result));
    add_output(manifest, (fs::path(args.out) / "evaluation-summary.csv").string(),
               cqa::report::evaluation_summary_csv(result));
    add_output(manifest, (fs::path(args.out) / "importance.csv").string(),
               cqa::report::importance_csv(result));
    add_output(manifest, (fs::path(args.out) / "model.json").string(),
               cqa::model_to_json(result.best_model));
    write_manifest(manifest, args.out);
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string matrix;
    std::string payload;
    std::string out;
    double threshold = 0.5;
    int threads = 0;
};

int cmd_predict(const PredictArgs& args) {
    cqa::set_max_threads(args.threads);
    if (args.matrix.empty() == args.payload.empty())
        fail_usage("predict needs exactly one of --matrix or --payload");
    if (!(args.threshold >= 0.0) || !(args.threshold <= 1.0))
        fail_usage("--threshold must be in [0, 1]");

    cqa::BoostedModel model = cqa::load_model(args.model);
    if (model.num_features != cqa::kNumFeatures)
        fail_usage("model expects " + std::to_string(model.num_features) +
                   " features; this tool produces " + std::to_string(cqa::kNumFeatures));

    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    if (!args.matrix.empty()) {
        std::ifstream in(args.matrix, std::ios::binary);
        if (!in) fail_usage("cannot open feature matrix: " + args.matrix);
        cqa::FeatureMatrix matrix = cqa::read_feature_matrix_csv(in, args.matrix);
        Eigen::VectorXd proba = model.predict_proba_rows(matrix.X);
        for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
            double p = proba(r);
            records.push_back({{"question_id", matrix.question_ids[static_cast<std::size_t>(r)]},
                               {"probability", p},
                               {"label", p >= args.threshold ? "closed" : "open"}});
        }
    } else {
        std::ifstream in(args.payload, std::ios::binary);
        if (!in) fail_usage("cannot open payload: " + args.payload);
        nlohmann::json payload = nlohmann::json::parse(in, nullptr, false);
        if (payload.is_discarded() || !payload.is_object())
            fail_usage("payload must be a JSON object of feature values: " + args.payload);
        Eigen::VectorXd x(cqa::kNumFeatures);
        for (int i = 0; i < cqa::kNumFeatures; ++i) {
            std::string name(cqa::feature_names()[static_cast<std::size_t>(i)]);
            if (!payload.contains(name))
                fail_usage("payload missing feature column \"" + name + "\"");
            if (!payload[name].is_number())
                fail_usage("payload feature \"" + name + "\" is not a number");
            x(i) = payload[name].get<double>();
        }
        for (const auto& [key, value] : payload.items()) {
            (void)value;
            if (key == "question_id") continue;
            bool known = false;
            for (auto name : cqa::feature_names()) known = known || key == name;
            if (!known) fail_usage("payload has unknown feature \"" + key + "\"");
        }
        double p = model.predict_proba(x);
        nlohmann::ordered_json record;
        if (payload.contains("question_id")) record["question_id"] = payload["question_id"];
        record["probability"] = p;
        record["label"] = p >= args.threshold ? "closed" : "open";
        records.push_back(std::move(record));
    }

    std::string text = records.dump(2) + "\n";
    if (args.out.empty()) {
        std::cout << text;
        return 0;
    }
    fs::path out_path(args.out);
    if (out_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out_path.parent_path(), ec);
        if (ec)
            fail_usage("cannot create output directory " + out_path.parent_path().string() +
                       ": " + ec.message());
    }
    cqa::report::RunManifest manifest;
    manifest.command = "predict";
    manifest.inputs.push_back({args.model, cqa::report::digest_file(args.model)});
    if (!args.matrix.empty())
        manifest.inputs.push_back({args.matrix, cqa::report::digest_file(args.matrix)});
    if (!args.payload.empty())
        manifest.inputs.push_back({args.payload, cqa::report::digest_file(args.payload)});
    manifest.parameters["threshold"] = cqa::csv::format_real(args.threshold);
    add_output(manifest, args.out, text);
    write_manifest(manifest, out_path.has_parent_path() ? out_path.parent_path().string() : ".");
    return 0;
}

void show_config() {
    std::cout << "# defaults: dump mapping\n";
    std::cout << cqa::default_mapping_text();
    std::cout << "\n# defaults: experiment config\n";
    std::cout << cqa::default_experiment_config_text();
    std::cout << "\n# defaults: flags\n";
    std::cout << "popular_k = 100\n";
    std::cout << "epsilon = 1e-06\n";
    std::cout << "score_threshold = 5\n";
    std::cout << "threshold = 0.5\n";
    std::cout << "site_hosts = stackoverflow.com\n";
    std::cout << "fs_source = favorite_count\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"question-closure triage toolkit"};
    app.set_version_flag("--version", std::string(cqa::kToolName) + " " + cqa::kToolVersion);
    bool wants_show_config = false;
    app.add_flag("--show-config", wants_show_config, "print built-in defaults and exit");

    IngestArgs ingest_args;
    CLI::App* ingest = app.add_subcommand("ingest", "parse a dump directory into a snapshot");
    ingest->add_option("--dump-dir", ingest_args.dump_dir, "dump directory")->required();
    ingest->add_option("--mapping", ingest_args.mapping, "mapping config file");
    ingest->add_option("--out", ingest_args.out, "output directory")->required();
    ingest->add_option("--snapshot", ingest_args.snapshot,
                       "snapshot path (default <out>/dataset.snapshot)");
    ingest->add_option("--threads", ingest_args.threads, "worker threads (0 = auto)");

    CharacterizeArgs char_args;
    CLI::App* characterize =
        app.add_subcommand("characterize", "closed-question analytics from a snapshot");
    characterize->add_option("--snapshot", char_args.snapshot, "snapshot file")->required();
    characterize->add_option("--out", char_args.out, "output directory")->required();
    characterize->add_option("--which", char_args.which, "analytics to run (default all)")
        ->delimiter(',');
    characterize->add_option("--epsilon", char_args.epsilon, "ntr smoothing epsilon");
    characterize->add_option("--score-threshold", char_args.score_threshold,
                             "answer-pattern score threshold");
    characterize->add_option("--threads", char_args.threads, "worker threads (0 = auto)");

    FeaturizeArgs feat_args;
    CLI::App* featurize =
        app.add_subcommand("featurize", "write the creation-time feature matrix");
    featurize->add_option("--snapshot", feat_args.snapshot, "snapshot file")->required();
    featurize->add_option("--out", feat_args.out, "output matrix CSV path")->required();
    featurize->add_option("--popular-k", feat_args.popular_k, "popular tag list size");
    featurize->add_option("--site-hosts", feat_args.site_hosts, "hosts counted as site URLs")
        ->delimiter(',');
    featurize->add_option("--mode", feat_args.mode,
                          "prior-score mode: snapshot or strict (default: strict when the "
                          "snapshot has vote rows)");
    featurize->add_option("--fs-source", feat_args.fs_source,
                          "favorite-score source: favorite_count or post_score");
    featurize->add_option("--threads", feat_args.threads, "worker threads (0 = auto)");

    TrainEvalArgs train_args;
    CLI::App* train_eval =
        app.add_subcommand("train-eval", "balanced under-sampling experiment on a matrix");
    train_eval->add_option("--matrix", train_args.matrix, "feature matrix CSV")->required();
    train_eval->add_option("--config", train_args.config, "experiment config file");
    train_eval->add_option("--out", train_args.out, "output directory")->required();
    CLI::Option* seed_opt =
        train_eval->add_option("--seed", train_args.seed, "master seed (overrides config)");
    train_eval->add_option("--threads", train_args.threads, "worker threads (0 = auto)");

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand("predict", "score questions with a trained model");
    predict->add_option("--model", predict_args.model, "model artifact")->required();
    predict->add_option("--matrix", predict_args.matrix, "feature matrix CSV");
    predict->add_option("--payload", predict_args.payload, "single-question JSON payload");
    predict->add_option("--out", predict_args.out, "output path (default stdout)");
    predict->add_option("--threshold", predict_args.threshold, "closed-label threshold");
    predict->add_option("--threads", predict_args.threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wants_show_config) {
            show_config();
            return 0;
        }
        if (ingest->parsed()) return cmd_ingest(ingest_args);
        if (characterize->parsed()) return cmd_characterize(char_args);
        if (featurize->parsed()) return cmd_featurize(feat_args);
        if (train_eval->parsed()) {
            train_args.seed_given = seed_opt->count() > 0;
            return cmd_train_eval(train_args);
        }
        if (predict->parsed()) return cmd_predict(predict_args);
        std::fprintf(stderr, "%s: a subcommand is required (see --help)\n", cqa::kToolName);
        return 2;
    } catch (const cqa::CqaError& e) {
        std::fprintf(stderr, "%s: error: %s\n", cqa::kToolName, e.what());
        return e.kind() == cqa::ErrorKind::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: error: %s\n", cqa::kToolName, e.what());
        return 1;
    }
}
