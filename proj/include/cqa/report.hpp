#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cqa/analytics.hpp"
#include "cqa/dump_parser.hpp"
#include "cqa/experiment.hpp"

namespace cqa::report {

// Each analytic serializes to a CSV table (compact) and a JSON document
// (complete). Writers are pure so identical inputs give identical bytes.
std::string category_distribution_csv(const CategoryDistribution& d);
std::string category_distribution_json(const CategoryDistribution& d);

std::string monthly_closed_ratio_csv(const MonthlyClosedRatio& d);
std::string monthly_closed_ratio_json(const MonthlyClosedRatio& d);

std::string newcomer_correlation_csv(const NewcomerCorrelation& d);
std::string newcomer_correlation_json(const NewcomerCorrelation& d);

std::string close_vote_distribution_csv(const CloseVoteDistribution& d);
std::string close_vote_distribution_json(const CloseVoteDistribution& d);

std::string favorite_vote_cdf_csv(const FavoriteVoteCdf& d);
std::string favorite_vote_cdf_json(const FavoriteVoteCdf& d);

std::string closure_time_csv(const ClosureTimeStats& d);
std::string closure_time_json(const ClosureTimeStats& d);

std::string ntr_csv(const TagStatistics& d);
std::string ntr_json(const TagStatistics& d);

std::string answer_patterns_csv(const AnswerPatternStats& d);
std::string answer_patterns_json(const AnswerPatternStats& d);

std::string question_status_csv(const StatusDistribution& d);
std::string question_status_json(const StatusDistribution& d);

std::string code_prevalence_csv(const CodePrevalence& d);
std::string code_prevalence_json(const CodePrevalence& d);

std::string ingest_report_json(const IngestReport& r);

std::string evaluation_report_json(const EvaluationReport& r);
// One row per run x feature set.
std::string evaluation_summary_csv(const EvaluationReport& r);
// One row per feature, one mean-importance column per feature set.
std::string importance_csv(const EvaluationReport& r);

// Provenance record written last so it can list every artifact's digest.
struct RunManifest {
    std::string command;
    std::string created;  // ISO-8601 UTC; filled at serialization when empty
    std::map<std::string, std::string> parameters;

    struct Artifact {
        std::string path;
        std::string digest;  // 16-hex-digit content hash
    };
    std::vector<Artifact> inputs;
    std::vector<Artifact> outputs;
};

// Content hash of a file; errors if the file cannot be read.
std::string digest_file(const std::string& path);
std::string digest_text(const std::string& text);

// Current UTC time, overridable via CQA_TRIAGE_EPOCH (integer seconds since
// the epoch) so reruns can be byte-identical.
std::string manifest_timestamp();

std::string manifest_json(const RunManifest& m);

// Writes content to path, failing loudly; returns the content digest.
std::string write_artifact(const std::string& path, const std::string& content);

}  // namespace cqa::report
