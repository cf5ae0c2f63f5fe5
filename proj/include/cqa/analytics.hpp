#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqa/dataset.hpp"
#include "cqa/stats.hpp"

namespace cqa {

// Closed questions partitioned by category. Unknown-category closures are
// reported separately and excluded from percentages here and in every other
// per-category analytic.
struct CategoryDistribution {
    std::array<int64_t, kNumCloseCategories> counts{};
    int64_t unknown_count = 0;

    int64_t total_known() const;
    double percentage(CloseCategory c) const;  // of total_known, in [0,100]
};

CategoryDistribution category_distribution(const Dataset& ds);

struct MonthlyClosedRatio {
    struct Row {
        int64_t month_index = 0;
        std::string month;  // YYYY-MM
        int64_t total = 0;
        int64_t closed = 0;
        std::optional<double> ratio;  // closed/total; null when total is 0
        std::array<int64_t, kNumCloseCategories> closed_by_category{};
    };
    std::vector<Row> rows;  // contiguous months spanning all questions
};

MonthlyClosedRatio monthly_closed_ratio(const Dataset& ds);  // needs >= 1 question

struct NewcomerCorrelation {
    struct Row {
        int64_t month_index = 0;
        std::string month;
        int64_t new_users = 0;
        int64_t questions = 0;
        int64_t closed = 0;
        double cumulative_users = 0;
        std::optional<double> cumulative_closed_pct;  // null until questions exist
    };
    std::vector<Row> rows;
    // Default construction: cumulative user count vs. cumulative closed share.
    stats::Correlation cumulative;
    // Alternative per-month construction; absent when degenerate.
    std::optional<stats::Correlation> per_month;
};

NewcomerCorrelation newcomer_correlation(const Dataset& ds);

struct CloseVoteDistribution {
    std::array<int64_t, 5> buckets{};  // vote counts 1..5
    int64_t excluded_unknown = 0;      // closed questions without vote data
    bool by_category = false;
    std::array<std::array<int64_t, 5>, kNumCloseCategories> category_buckets{};

    int64_t denominator() const;
};

CloseVoteDistribution close_vote_distribution(const Dataset& ds, bool by_category);

struct FavoriteVoteCdf {
    std::vector<int> thresholds;
    int64_t closed_total = 0;
    std::vector<int64_t> counts;  // per threshold, favorite_count >= threshold
    bool by_category = false;
    std::array<int64_t, kNumCloseCategories> category_totals{};
    std::array<std::vector<int64_t>, kNumCloseCategories> category_counts;
};

inline const std::vector<int>& default_favorite_thresholds() {
    static const std::vector<int> t = {1, 5, 10, 100, 500};
    return t;
}

FavoriteVoteCdf favorite_vote_cdf(const Dataset& ds, const std::vector<int>& thresholds,
                                  bool by_category);

struct ClosureTimeStats {
    struct Entry {
        CloseCategory category = CloseCategory::Unknown;
        stats::BoxStats hours;
    };
    std::vector<Entry> per_category;  // categories with >= 1 closure, in enum order
    std::optional<stats::BoxStats> overall;
};

ClosureTimeStats closure_time_stats(const Dataset& ds);

// Per-tag ratios of the closed (CQ) and non-closed (NCQ) corpora with the
// smoothed ratio ntr = r_cq / (r_ncq + epsilon).
struct TagStatistics {
    double epsilon = 0;
    int64_t cq_tag_occurrences = 0;
    int64_t ncq_tag_occurrences = 0;
    struct Row {
        std::string tag;
        int64_t cq_count = 0;
        int64_t ncq_count = 0;
        double r_cq = 0;
        double r_ncq = 0;
        double ntr = 0;
    };
    std::vector<Row> rows;  // tags occurring in CQ, ranked by ntr desc, tag asc
};

TagStatistics ntr(const Dataset& ds, double epsilon);

struct AnswerPatternStats {
    int score_threshold = 5;
    struct Row {
        std::string group;  // category name, "all_closed", or "non_closed"
        int64_t n = 0;
        double pa = 0;   // % with >= 1 answer
        double paa = 0;  // % with an accepted answer
        double pac = 0;  // % accepted among those with >= 1 answer
        double qn = 0;   // % score < 0
        double qt = 0;   // % score >= threshold
        double qz = 0;   // % score == 0
    };
    std::vector<Row> rows;
};

AnswerPatternStats answer_pattern_stats(const Dataset& ds, int score_threshold = 5);

// Status-flag counts per closure category; percentages are column shares
// (each flag's distribution across categories).
struct StatusDistribution {
    static constexpr int kNumFlags = 3;  // locked, community wiki, protected
    std::array<std::array<int64_t, kNumFlags>, kNumCloseCategories> counts{};
    std::array<int64_t, kNumFlags> flag_totals{};
    std::array<int64_t, kNumCloseCategories> category_totals{};
};

StatusDistribution question_status_distribution(const Dataset& ds);

struct CodePrevalence {
    int64_t closed_total = 0;
    int64_t closed_with_code = 0;
    int64_t open_total = 0;
    int64_t open_with_code = 0;
    std::array<int64_t, kNumCloseCategories> category_totals{};
    std::array<int64_t, kNumCloseCategories> category_with_code{};

    double closed_pct() const;
    double open_pct() const;
};

CodePrevalence code_snippet_prevalence(const Dataset& ds);

}  // namespace cqa
