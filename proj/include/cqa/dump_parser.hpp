#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cqa/dataset.hpp"
#include "cqa/mapping.hpp"

namespace cqa {

struct FileIngest {
    std::string file;
    std::size_t rows = 0;       // row elements seen
    std::size_t malformed = 0;  // unparseable row syntax
    std::map<std::string, std::size_t> skipped;  // reason -> count

    std::size_t total_skipped() const;
};

struct IngestReport {
    std::vector<FileIngest> files;  // posts, users, badges, comments, history, votes

    std::size_t questions = 0;
    std::size_t answers = 0;
    std::size_t other_posts = 0;
    std::size_t users = 0;
    std::size_t badges = 0;
    std::size_t comments = 0;
    std::size_t history_events = 0;  // close/reopen/status rows on known questions
    std::size_t votes_kept = 0;

    std::size_t quarantined_rows = 0;
    std::size_t orphan_activity_rows = 0;  // activity whose user is unknown

    std::size_t closed_questions = 0;
    std::size_t unknown_category_closed = 0;
    std::map<int64_t, std::size_t> unknown_close_reasons;  // id -> close rows
    std::size_t unparseable_close_reasons = 0;
    std::size_t missing_owner_questions = 0;
    std::size_t vote_count_unavailable = 0;

    std::size_t total_rows() const;
    std::size_t total_malformed() const;
    std::size_t total_skipped() const;
};

struct ParseResult {
    Dataset dataset;
    IngestReport report;
};

// Reads the six dump files named by the mapping. Missing files are fatal;
// malformed or semantically unusable rows are skipped and counted.
ParseResult parse_dump(const std::string& directory, const DumpMappingConfig& mapping);

}  // namespace cqa
