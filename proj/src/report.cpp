#include "cqa/report.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cqa/common.hpp"
#include "cqa/csv.hpp"
#include "cqa/features.hpp"

namespace cqa::report {

namespace {

using json = nlohmann::ordered_json;

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string real(double x) { return csv::format_real(x); }

std::vector<std::string> category_columns() {
    std::vector<std::string> cols;
    for (int c = 0; c < kNumCloseCategories; ++c)
        cols.emplace_back(category_name(static_cast<CloseCategory>(c)));
    return cols;
}

json box_to_json(const stats::BoxStats& b) {
    return json{{"n", b.n},
                {"min", b.min},
                {"q1", b.q1},
                {"median", b.median},
                {"q3", b.q3},
                {"max", b.max},
                {"mean", b.mean},
                {"num_outliers", b.outliers.size()}};
}

json correlation_to_json(const stats::Correlation& c) {
    return json{{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
}

json confusion_to_json(const ConfusionCounts& c) {
    auto pct = c.row_percentages();
    return json{{"tp", c.tp},
                {"fn", c.fn},
                {"fp", c.fp},
                {"tn", c.tn},
                {"row_percentages",
                 {{"closed", {pct[0][0], pct[0][1]}}, {"open", {pct[1][0], pct[1][1]}}}}};
}

json summary_to_json(const MetricSummary& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

std::string category_distribution_csv(const CategoryDistribution& d) {
    std::ostringstream out;
    csv::write_record(out, {"category", "count", "percentage"});
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<CloseCategory>(c);
        csv::write_record(out, {std::string(category_name(cat)),
                                std::to_string(d.counts[static_cast<std::size_t>(c)]),
                                real(d.percentage(cat))});
    }
    csv::write_record(out, {"Unknown", std::to_string(d.unknown_count), ""});
    return out.str();
}

std::string category_distribution_json(const CategoryDistribution& d) {
    json cats = json::array();
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<CloseCategory>(c);
        cats.push_back({{"category", category_name(cat)},
                        {"count", d.counts[static_cast<std::size_t>(c)]},
                        {"percentage", d.percentage(cat)}});
    }
    return dump(json{{"kind", "category-distribution"},
                     {"total_known", d.total_known()},
                     {"unknown_count", d.unknown_count},
                     {"categories", std::move(cats)}});
}

std::string monthly_closed_ratio_csv(const MonthlyClosedRatio& d) {
    std::ostringstream out;
    std::vector<std::string> header = {"month", "total", "closed", "ratio"};
    for (const std::string& c : category_columns()) header.push_back(c);
    csv::write_record(out, header);
    for (const auto& row : d.rows) {
        std::vector<std::string> fields = {row.month, std::to_string(row.total),
                                           std::to_string(row.closed),
                                           row.ratio ? real(*row.ratio) : ""};
        for (int64_t n : row.closed_by_category) fields.push_back(std::to_string(n));
        csv::write_record(out, fields);
    }
    return out.str();
}

std::string monthly_closed_ratio_json(const MonthlyClosedRatio& d) {
    json rows = json::array();
    for (const auto& row : d.rows) {
        json by_cat = json::object();
        for (int c = 0; c < kNumCloseCategories; ++c)
            by_cat[std::string(category_name(static_cast<CloseCategory>(c)))] =
                row.closed_by_category[static_cast<std::size_t>(c)];
        rows.push_back({{"month", row.month},
                        {"total", row.total},
                        {"closed", row.closed},
                        {"ratio", row.ratio ? json(*row.ratio) : json(nullptr)},
                        {"closed_by_category", std::move(by_cat)}});
    }
    return dump(json{{"kind", "monthly-closed-ratio"}, {"rows", std::move(rows)}});
}

std::string newcomer_correlation_csv(const NewcomerCorrelation& d) {
    std::ostringstream out;
    csv::write_record(out, {"month", "new_users", "questions", "closed", "cumulative_users",
                            "cumulative_closed_pct"});
    for (const auto& row : d.rows) {
        csv::write_record(out, {row.month, std::to_string(row.new_users),
                                std::to_string(row.questions), std::to_string(row.closed),
                                real(row.cumulative_users),
                                row.cumulative_closed_pct ? real(*row.cumulative_closed_pct) : ""});
    }
    return out.str();
}

std::string newcomer_correlation_json(const NewcomerCorrelation& d) {
    json rows = json::array();
    for (const auto& row : d.rows) {
        rows.push_back({{"month", row.month},
                        {"new_users", row.new_users},
                        {"questions", row.questions},
                        {"closed", row.closed},
                        {"cumulative_users", row.cumulative_users},
                        {"cumulative_closed_pct", row.cumulative_closed_pct
                                                      ? json(*row.cumulative_closed_pct)
                                                      : json(nullptr)}});
    }
    return dump(json{{"kind", "newcomer-correlation"},
                     {"cumulative", correlation_to_json(d.cumulative)},
                     {"per_month",
                      d.per_month ? correlation_to_json(*d.per_month) : json(nullptr)},
                     {"rows", std::move(rows)}});
}

std::string close_vote_distribution_csv(const CloseVoteDistribution& d) {
    std::ostringstream out;
    std::vector<std::string> header = {"votes", "count", "share"};
    if (d.by_category)
        for (const std::string& c : category_columns()) header.push_back(c);
    csv::write_record(out, header);
    int64_t denom = d.denominator();
    for (std::size_t v = 0; v < d.buckets.size(); ++v) {
        std::vector<std::string> fields = {
            std::to_string(v + 1), std::to_string(d.buckets[v]),
            denom > 0 ? real(static_cast<double>(d.buckets[v]) / static_cast<double>(denom))
                      : ""};
        if (d.by_category)
            for (int c = 0; c < kNumCloseCategories; ++c)
                fields.push_back(
                    std::to_string(d.category_buckets[static_cast<std::size_t>(c)][v]));
        csv::write_record(out, fields);
    }
    return out.str();
}

std::string close_vote_distribution_json(const CloseVoteDistribution& d) {
    int64_t denom = d.denominator();
    json buckets = json::array();
    for (std::size_t v = 0; v < d.buckets.size(); ++v) {
        json b = {{"votes", v + 1},
                  {"count", d.buckets[v]},
                  {"share", denom > 0 ? json(static_cast<double>(d.buckets[v]) /
                                             static_cast<double>(denom))
                                      : json(nullptr)}};
        if (d.by_category) {
            json by_cat = json::object();
            for (int c = 0; c < kNumCloseCategories; ++c)
                by_cat[std::string(category_name(static_cast<CloseCategory>(c)))] =
                    d.category_buckets[static_cast<std::size_t>(c)][v];
            b["by_category"] = std::move(by_cat);
        }
        buckets.push_back(std::move(b));
    }
    return dump(json{{"kind", "close-vote-distribution"},
                     {"with_vote_counts", denom},
                     {"excluded_unknown", d.excluded_unknown},
                     {"buckets", std::move(buckets)}});
}

std::string favorite_vote_cdf_csv(const FavoriteVoteCdf& d) {
    std::ostringstream out;
    std::vector<std::string> header = {"threshold", "count", "share"};
    if (d.by_category)
        for (const std::string& c : category_columns()) header.push_back(c);
    csv::write_record(out, header);
    for (std::size_t t = 0; t < d.thresholds.size(); ++t) {
        std::vector<std::string> fields = {
            std::to_string(d.thresholds[t]), std::to_string(d.counts[t]),
            d.closed_total > 0 ? real(static_cast<double>(d.counts[t]) /
                                      static_cast<double>(d.closed_total))
                               : ""};
        if (d.by_category)
            for (int c = 0; c < kNumCloseCategories; ++c)
                fields.push_back(
                    std::to_string(d.category_counts[static_cast<std::size_t>(c)][t]));
        csv::write_record(out, fields);
    }
    return out.str();
}

std::string favorite_vote_cdf_json(const FavoriteVoteCdf& d) {
    json rows = json::array();
    for (std::size_t t = 0; t < d.thresholds.size(); ++t) {
        json row = {{"threshold", d.thresholds[t]},
                    {"count", d.counts[t]},
                    {"share", d.closed_total > 0
                                  ? json(static_cast<double>(d.counts[t]) /
                                         static_cast<double>(d.closed_total))
                                  : json(nullptr)}};
        if (d.by_category) {
            json by_cat = json::object();
            for (int c = 0; c < kNumCloseCategories; ++c) {
                auto cat = static_cast<std::size_t>(c);
                by_cat[std::string(category_name(static_cast<CloseCategory>(c)))] = {
                    {"count", d.category_counts[cat][t]},
                    {"total", d.category_totals[cat]}};
            }
            row["by_category"] = std::move(by_cat);
        }
        rows.push_back(std::move(row));
    }
    return dump(json{{"kind", "favorite-vote-cdf"},
                     {"closed_total", d.closed_total},
                     {"thresholds", std::move(rows)}});
}

namespace {

std::vector<std::string> box_row(const std::string& label, const stats::BoxStats& b) {
    return {label,        std::to_string(b.n), real(b.min),  real(b.q1),
            real(b.median), real(b.q3),        real(b.max),  real(b.mean),
            std::to_string(b.outliers.size())};
}

}  // namespace

std::string closure_time_csv(const ClosureTimeStats& d) {
    std::ostringstream out;
    csv::write_record(out, {"category", "n", "min_hours", "q1_hours", "median_hours", "q3_hours",
                            "max_hours", "mean_hours", "num_outliers"});
    for (const auto& entry : d.per_category)
        csv::write_record(out, box_row(std::string(category_name(entry.category)), entry.hours));
    if (d.overall) csv::write_record(out, box_row("all", *d.overall));
    return out.str();
}

std::string closure_time_json(const ClosureTimeStats& d) {
    json per_cat = json::array();
    for (const auto& entry : d.per_category) {
        json e = box_to_json(entry.hours);
        e["category"] = category_name(entry.category);
        per_cat.push_back(std::move(e));
    }
    return dump(json{{"kind", "closure-time"},
                     {"unit", "hours"},
                     {"per_category", std::move(per_cat)},
                     {"overall", d.overall ? box_to_json(*d.overall) : json(nullptr)}});
}

std::string ntr_csv(const TagStatistics& d) {
    std::ostringstream out;
    csv::write_record(out, {"tag", "cq_count", "ncq_count", "r_cq", "r_ncq", "ntr"});
    for (const auto& row : d.rows) {
        csv::write_record(out, {row.tag, std::to_string(row.cq_count),
                                std::to_string(row.ncq_count), real(row.r_cq), real(row.r_ncq),
                                real(row.ntr)});
    }
    return out.str();
}

std::string ntr_json(const TagStatistics& d) {
    json rows = json::array();
    for (const auto& row : d.rows) {
        rows.push_back({{"tag", row.tag},
                        {"cq_count", row.cq_count},
                        {"ncq_count", row.ncq_count},
                        {"r_cq", row.r_cq},
                        {"r_ncq", row.r_ncq},
                        {"ntr", row.ntr}});
    }
    return dump(json{{"kind", "ntr"},
                     {"epsilon", d.epsilon},
                     {"cq_tag_occurrences", d.cq_tag_occurrences},
                     {"ncq_tag_occurrences", d.ncq_tag_occurrences},
                     {"rows", std::move(rows)}});
}

std::string answer_patterns_csv(const AnswerPatternStats& d) {
    std::ostringstream out;
    csv::write_record(out, {"group", "n", "pct_answered", "pct_accepted",
                            "pct_accepted_of_answered", "pct_negative_score",
                            "pct_score_at_threshold", "pct_zero_score"});
    for (const auto& row : d.rows) {
        csv::write_record(out, {row.group, std::to_string(row.n), real(row.pa), real(row.paa),
                                real(row.pac), real(row.qn), real(row.qt), real(row.qz)});
    }
    return out.str();
}

std::string answer_patterns_json(const AnswerPatternStats& d) {
    json rows = json::array();
    for (const auto& row : d.rows) {
        rows.push_back({{"group", row.group},
                        {"n", row.n},
                        {"pct_answered", row.pa},
                        {"pct_accepted", row.paa},
                        {"pct_accepted_of_answered", row.pac},
                        {"pct_negative_score", row.qn},
                        {"pct_score_at_threshold", row.qt},
                        {"pct_zero_score", row.qz}});
    }
    return dump(json{{"kind", "answer-patterns"},
                     {"score_threshold", d.score_threshold},
                     {"rows", std::move(rows)}});
}

std::string question_status_csv(const StatusDistribution& d) {
    std::ostringstream out;
    csv::write_record(out, {"category", "locked", "community_wiki", "protected", "closed_total"});
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<std::size_t>(c);
        csv::write_record(out, {std::string(category_name(static_cast<CloseCategory>(c))),
                                std::to_string(d.counts[cat][0]), std::to_string(d.counts[cat][1]),
                                std::to_string(d.counts[cat][2]),
                                std::to_string(d.category_totals[cat])});
    }
    return out.str();
}

std::string question_status_json(const StatusDistribution& d) {
    static const char* flag_names[StatusDistribution::kNumFlags] = {"locked", "community_wiki",
                                                                    "protected"};
    json rows = json::array();
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<std::size_t>(c);
        json row = {{"category", category_name(static_cast<CloseCategory>(c))},
                    {"closed_total", d.category_totals[cat]}};
        for (int f = 0; f < StatusDistribution::kNumFlags; ++f) {
            auto flag = static_cast<std::size_t>(f);
            row[flag_names[f]] = {
                {"count", d.counts[cat][flag]},
                {"column_share_pct",
                 d.flag_totals[flag] > 0
                     ? json(100.0 * static_cast<double>(d.counts[cat][flag]) /
                            static_cast<double>(d.flag_totals[flag]))
                     : json(nullptr)}};
        }
        rows.push_back(std::move(row));
    }
    json totals = json::object();
    for (int f = 0; f < StatusDistribution::kNumFlags; ++f)
        totals[flag_names[f]] = d.flag_totals[static_cast<std::size_t>(f)];
    return dump(json{{"kind", "question-status"},
                     {"flag_totals", std::move(totals)},
                     {"rows", std::move(rows)}});
}

std::string code_prevalence_csv(const CodePrevalence& d) {
    std::ostringstream out;
    csv::write_record(out, {"group", "total", "with_code", "percentage"});
    csv::write_record(out, {"closed", std::to_string(d.closed_total),
                            std::to_string(d.closed_with_code), real(d.closed_pct())});
    csv::write_record(out, {"open", std::to_string(d.open_total),
                            std::to_string(d.open_with_code), real(d.open_pct())});
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<std::size_t>(c);
        double pct = d.category_totals[cat] > 0
                         ? 100.0 * static_cast<double>(d.category_with_code[cat]) /
                               static_cast<double>(d.category_totals[cat])
                         : 0.0;
        csv::write_record(out, {std::string(category_name(static_cast<CloseCategory>(c))),
                                std::to_string(d.category_totals[cat]),
                                std::to_string(d.category_with_code[cat]), real(pct)});
    }
    return out.str();
}

std::string code_prevalence_json(const CodePrevalence& d) {
    json cats = json::array();
    for (int c = 0; c < kNumCloseCategories; ++c) {
        auto cat = static_cast<std::size_t>(c);
        cats.push_back(
            {{"category", category_name(static_cast<CloseCategory>(c))},
             {"total", d.category_totals[cat]},
             {"with_code", d.category_with_code[cat]},
             {"percentage", d.category_totals[cat] > 0
                                ? json(100.0 * static_cast<double>(d.category_with_code[cat]) /
                                       static_cast<double>(d.category_totals[cat]))
                                : json(nullptr)}});
    }
    return dump(json{
        {"kind", "code-prevalence"},
        {"closed",
         {{"total", d.closed_total}, {"with_code", d.closed_with_code}, {"percentage", d.closed_pct()}}},
        {"open",
         {{"total", d.open_total}, {"with_code", d.open_with_code}, {"percentage", d.open_pct()}}},
        {"per_category", std::move(cats)}});
}

std::string ingest_report_json(const IngestReport& r) {
    json files = json::array();
    for (const auto& f : r.files) {
        json skipped = json::object();
        for (const auto& [reason, count] : f.skipped) skipped[reason] = count;
        files.push_back({{"file", f.file},
                         {"rows", f.rows},
                         {"malformed", f.malformed},
                         {"skipped", std::move(skipped)}});
    }
    json unknown_reasons = json::object();
    for (const auto& [id, count] : r.unknown_close_reasons)
        unknown_reasons[std::to_string(id)] = count;
    return dump(json{{"kind", "ingest-report"},
                     {"files", std::move(files)},
                     {"questions", r.questions},
                     {"answers", r.answers},
                     {"other_posts", r.other_posts},
                     {"users", r.users},
                     {"badges", r.badges},
                     {"comments", r.comments},
                     {"history_events", r.history_events},
                     {"votes_kept", r.votes_kept},
                     {"quarantined_rows", r.quarantined_rows},
                     {"orphan_activity_rows", r.orphan_activity_rows},
                     {"closed_questions", r.closed_questions},
                     {"unknown_category_closed", r.unknown_category_closed},
                     {"unknown_close_reasons", std::move(unknown_reasons)},
                     {"unparseable_close_reasons", r.unparseable_close_reasons},
                     {"missing_owner_questions", r.missing_owner_questions},
                     {"vote_count_unavailable", r.vote_count_unavailable},
                     {"total_rows", r.total_rows()},
                     {"total_malformed", r.total_malformed()},
                     {"total_skipped", r.total_skipped()}});
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    return json{{"num_runs", c.num_runs},
                {"train_fraction", c.train_fraction},
                {"cv_folds", c.cv_folds},
                {"feature_sets", c.feature_sets},
                {"master_seed", c.master_seed},
                {"boost",
                 {{"learning_rate", c.boost.learning_rate},
                  {"subsample_fraction", c.boost.subsample_fraction},
                  {"num_trees", c.boost.num_trees},
                  {"max_depth", c.boost.max_depth},
                  {"min_samples_leaf", c.boost.min_samples_leaf},
                  {"seed", c.boost.seed}}}};
}

json importance_to_json(const Eigen::VectorXd& importance) {
    json out;
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i)
        out[std::string(names[static_cast<std::size_t>(i)])] = importance(i);
    return out;
}

}  // namespace

std::string evaluation_report_json(const EvaluationReport& r) {
    json runs = json::array();
    for (const auto& cell : r.cells) {
        runs.push_back(
            {{"run", cell.run},
             {"feature_set", cell.feature_set},
             {"columns", cell.columns},
             {"cv", {{"accuracy", cell.cv_accuracy}, {"f1", cell.cv_f1}, {"auc", cell.cv_auc}}},
             {"test",
              {{"accuracy", cell.test_accuracy},
               {"f1", cell.test_f1},
               {"f1_defined", cell.test_f1_defined},
               {"macro_f1", cell.test_macro_f1},
               {"auc", cell.test_auc}}},
             {"confusion", confusion_to_json(cell.confusion)}});
    }
    json summaries = json::array();
    for (const auto& s : r.summaries) {
        summaries.push_back({{"feature_set", s.feature_set},
                             {"columns", s.columns},
                             {"test",
                              {{"accuracy", summary_to_json(s.accuracy)},
                               {"f1", summary_to_json(s.f1)},
                               {"auc", summary_to_json(s.auc)}}},
                             {"cv",
                              {{"accuracy", summary_to_json(s.cv_accuracy)},
                               {"f1", summary_to_json(s.cv_f1)},
                               {"auc", summary_to_json(s.cv_auc)}}},
                             {"pooled_confusion", confusion_to_json(s.pooled)},
                             {"mean_importance", importance_to_json(s.mean_importance)},
                             {"importance_defined", s.importance_defined}});
    }
    return dump(json{{"kind", "evaluation-report"},
                     {"config", config_to_json(r.config)},
                     {"data",
                      {{"num_samples", r.num_samples},
                       {"num_closed", r.num_closed},
                       {"num_open", r.num_open},
                       {"run_size", r.run_size}}},
                     {"best_run", r.best_run},
                     {"runs", std::move(runs)},
                     {"feature_sets", std::move(summaries)}});
}

std::string evaluation_summary_csv(const EvaluationReport& r) {
    std::ostringstream out;
    csv::write_record(out, {"run", "feature_set", "cv_accuracy", "cv_f1", "cv_auc",
                            "test_accuracy", "test_f1", "test_f1_defined", "test_macro_f1",
                            "test_auc", "tp", "fn", "fp", "tn"});
    for (const auto& cell : r.cells) {
        csv::write_record(
            out, {std::to_string(cell.run), cell.feature_set, real(cell.cv_accuracy),
                  real(cell.cv_f1), real(cell.cv_auc), real(cell.test_accuracy),
                  real(cell.test_f1), cell.test_f1_defined ? "true" : "false",
                  real(cell.test_macro_f1), real(cell.test_auc),
                  std::to_string(cell.confusion.tp), std::to_string(cell.confusion.fn),
                  std::to_string(cell.confusion.fp), std::to_string(cell.confusion.tn)});
    }
    return out.str();
}

std::string importance_csv(const EvaluationReport& r) {
    std::ostringstream out;
    std::vector<std::string> header = {"feature"};
    for (const auto& s : r.summaries) header.push_back(s.feature_set);
    csv::write_record(out, header);
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i) {
        std::vector<std::string> fields = {std::string(names[static_cast<std::size_t>(i)])};
        for (const auto& s : r.summaries) fields.push_back(real(s.mean_importance(i)));
        csv::write_record(out, fields);
    }
    return out.str();
}

std::string digest_text(const std::string& text) { return hex64(fnv1a(text)); }

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_runtime("cannot read file for digest: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return digest_text(bytes);
}

std::string manifest_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("CQA_TRIAGE_EPOCH")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string manifest_json(const RunManifest& m) {
    auto artifacts = [](const std::vector<RunManifest::Artifact>& list) {
        json arr = json::array();
        for (const auto& a : list) arr.push_back({{"path", a.path}, {"digest", a.digest}});
        return arr;
    };
    json params = json::object();
    for (const auto& [key, value] : m.parameters) params[key] = value;
    return dump(json{{"kind", "run-manifest"},
                     {"tool", kToolName},
                     {"tool_version", kToolVersion},
                     {"command", m.command},
                     {"created", m.created.empty() ? manifest_timestamp() : m.created},
                     {"parameters", std::move(params)},
                     {"inputs", artifacts(m.inputs)},
                     {"outputs", artifacts(m.outputs)}});
}

std::string write_artifact(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_runtime("cannot write output file: " + path);
    out << content;
    out.flush();
    if (!out) fail_runtime("cannot write output file: " + path);
    return digest_text(content);
}

}  // namespace cqa::report
