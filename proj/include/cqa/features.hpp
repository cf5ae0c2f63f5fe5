#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cqa/dataset.hpp"

namespace cqa {

inline constexpr int kNumFeatures = 19;

/// Canonical column order: user set (A), prior-score set (B), content set (C),
// textual-style set (D).
const std::array<std::string_view, kNumFeatures>& feature_names();

// Half-open column range [begin, end) of one feature set.
struct FeatureSetSpan {
    int begin = 0;
    int end = 0;
};

// Accepts 'A'..'D'; anything else is a usage error.
FeatureSetSpan feature_set_span(char set);

// Columns of a union of sets, ascending and deduplicated.
std::vector<int> feature_set_columns(const std::vector<char>& sets);

struct PopularTagSet {
    std::vector<std::string> tags;  // sorted lexicographically for lookup
    std::vector<std::pair<std::string, int64_t>> ranked;  // by count desc, name asc
    std::string dataset_id;
    int k = 0;
    int64_t frequency_cutoff = 0;  // question count of the rarest included tag

    bool contains(std::string_view tag) const;
};

// Top-k tags by number of questions carrying them; ties break alphabetically.
PopularTagSet compute_popular_tags(const Dataset& ds, int k);

// snapshot: prior-post scores are the dump's end-of-time values.
// strict: prior-post score, favorite count, and acceptance are rebuilt from
// vote rows dated before the question's creation.
enum class ScoreMode : uint8_t { snapshot, strict };
enum class FavoriteScoreSource : uint8_t { favorite_count, post_score };

std::string_view score_mode_name(ScoreMode m);
std::optional<ScoreMode> score_mode_from_name(std::string_view name);
ScoreMode default_score_mode(const Dataset& ds);  // strict when vote rows exist

struct FeatureOptions {
    ScoreMode mode = ScoreMode::snapshot;
    FavoriteScoreSource fs_source = FavoriteScoreSource::favorite_count;
    std::vector<std::string> site_hosts = {"stackoverflow.com"};
};

struct FeatureVector {
    std::array<double, kNumFeatures> values{};
    bool text_fallback = false;

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

// --- individual feature operations ---

// Sum of 1/holders over the distinct badge names in the history. Every badge
// must appear in holder_counts with a positive count.
double badge_score(const HistorySlice& history,
                   const std::map<std::string, int64_t>& holder_counts);
int64_t post_score_sum(const HistorySlice& history);
int64_t comment_score_sum(const HistorySlice& history);
// Sum over prior posts with at least one favorite.
int64_t favorite_score_sum(const HistorySlice& history, FavoriteScoreSource source);
// 15 per prior accepted answer.
int64_t accepted_answer_score(const HistorySlice& history);
int64_t previous_negative_posts(const HistorySlice& history);
double age_of_account_days(Timestamp user_created, Timestamp t);
int popular_tag_count(const std::vector<std::string>& tags, const PopularTagSet& popular);

// Badge name -> sorted first-award times, one entry per holder. Lets badge
// scores use holder counts as of a question's creation instant.
struct BadgeAwardIndex {
    std::map<std::string, std::vector<Timestamp>> first_awards;

    static BadgeAwardIndex build(const Dataset& ds);
    int64_t holders_before(const std::string& name, Timestamp t) const;
    // Counts restricted to the badge names present in `history`.
    std::map<std::string, int64_t> counts_for(const HistorySlice& history, Timestamp t) const;
};

// The user's activity before t with per-post values adjusted for the mode.
HistorySlice history_at(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode);

FeatureVector featurize(const Dataset& ds, const BadgeAwardIndex& badges,
                        const QuestionRecord& q, const PopularTagSet& popular,
                        const FeatureOptions& opts);
FeatureVector featurize(const Dataset& ds, const QuestionRecord& q,
                        const PopularTagSet& popular, const FeatureOptions& opts);

struct FeatureMatrix {
    std::vector<int64_t> question_ids;  // ascending
    Eigen::MatrixXd X;                  // rows x 19
    std::vector<uint8_t> labels;        // 1 = closed
    std::size_t skipped_missing_owner = 0;
    std::size_t text_fallback_rows = 0;

    Eigen::Index rows() const { return X.rows(); }
};

// All questions with a resolvable owner, in id order. Row-parallel but
// output-identical at any thread count.
FeatureMatrix featurize_all(const Dataset& ds, const PopularTagSet& popular,
                            const FeatureOptions& opts);

std::vector<std::string> feature_matrix_header();
void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);
FeatureMatrix read_feature_matrix_csv(std::istream& in, const std::string& source);

}  // namespace cqa
