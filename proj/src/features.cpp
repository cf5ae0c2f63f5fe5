#include "cqa/features.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "cqa/common.hpp"
#include "cqa/csv.hpp"
#include "cqa/kvconfig.hpp"
#include "cqa/text.hpp"

namespace cqa {

const std::array<std::string_view, kNumFeatures>& feature_names() {
    static const std::array<std::string_view, kNumFeatures> names = {
        "age_of_account",
        "badge_score",
        "previous_negative_posts",
        "post_score",
        "accepted_answer_score",
        "comment_score",
        "favorite_score",
        "num_urls",
        "num_stack_overflow_urls",
        "num_popular_tags",
        "title_length",
        "body_length",
        "num_tags",
        "num_punctuation",
        "num_short_words",
        "code_snippet_length",
        "num_special_chars",
        "num_lowercase",
        "num_uppercase",
    };
    return names;
}

FeatureSetSpan feature_set_span(char set) {
    switch (set) {
        case 'A': return {0, 3};
        case 'B': return {3, 7};
        case 'C': return {7, 10};
        case 'D': return {10, 19};
    }
    fail_usage(std::string("unknown feature set '") + set + "' (expected A, B, C, or D)");
}

std::vector<int> feature_set_columns(const std::vector<char>& sets) {
    std::set<int> cols;
    for (char s : sets) {
        FeatureSetSpan span = feature_set_span(s);
        for (int c = span.begin; c < span.end; ++c) cols.insert(c);
    }
    return {cols.begin(), cols.end()};
}

bool PopularTagSet::contains(std::string_view tag) const {
    return std::binary_search(tags.begin(), tags.end(), tag);
}

PopularTagSet compute_popular_tags(const Dataset& ds, int k) {
    if (k < 0) fail_usage("popular tag count must be >= 0");
    std::map<std::string, int64_t> counts;
    for (const auto& q : ds.questions)
        for (const auto& t : q.tags) ++counts[t];

    std::vector<std::pair<std::string, int64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));

    PopularTagSet out;
    out.k = k;
    out.ranked = ranked;
    out.frequency_cutoff = ranked.empty() ? 0 : ranked.back().second;
    out.tags.reserve(ranked.size());
    for (auto& [tag, count] : ranked) out.tags.push_back(tag);
    std::sort(out.tags.begin(), out.tags.end());
    return out;
}

std::string_view score_mode_name(ScoreMode m) {
    return m == ScoreMode::snapshot ? "snapshot" : "strict";
}

std::optional<ScoreMode> score_mode_from_name(std::string_view name) {
    if (name == "snapshot") return ScoreMode::snapshot;
    if (name == "strict") return ScoreMode::strict;
    return std::nullopt;
}

ScoreMode default_score_mode(const Dataset& ds) {
    return ds.post_votes.empty() ? ScoreMode::snapshot : ScoreMode::strict;
}

double badge_score(const HistorySlice& history,
                   const std::map<std::string, int64_t>& holder_counts) {
    std::set<std::string_view> seen;
    double score = 0.0;
    for (const auto& b : history.badges) {
        if (!seen.insert(b.name).second) continue;
        auto it = holder_counts.find(b.name);
        if (it == holder_counts.end() || it->second < 1)
            fail_runtime("badge_holders", "no holder count for badge '" + b.name + "'");
        score += 1.0 / static_cast<double>(it->second);
    }
    return score;
}

int64_t post_score_sum(const HistorySlice& history) {
    int64_t sum = 0;
    for (const auto& p : history.posts) sum += p.score;
    return sum;
}

int64_t comment_score_sum(const HistorySlice& history) {
    int64_t sum = 0;
    for (const auto& c : history.comments) sum += c.score;
    return sum;
}

int64_t favorite_score_sum(const HistorySlice& history, FavoriteScoreSource source) {
    int64_t sum = 0;
    for (const auto& p : history.posts) {
        if (p.favorite_count < 1) continue;
        sum += source == FavoriteScoreSource::favorite_count ? p.favorite_count : p.score;
    }
    return sum;
}

int64_t accepted_answer_score(const HistorySlice& history) {
    int64_t accepted = 0;
    for (const auto& p : history.posts)
        if (p.kind == PostKind::answer && p.was_accepted) ++accepted;
    return 15 * accepted;
}

int64_t previous_negative_posts(const HistorySlice& history) {
    int64_t n = 0;
    for (const auto& p : history.posts)
        if (p.score < 0) ++n;
    return n;
}

double age_of_account_days(Timestamp user_created, Timestamp t) {
    double days = static_cast<double>(t - user_created) / kSecondsPerDay;
    return days < 0.0 ? 0.0 : days;
}

int popular_tag_count(const std::vector<std::string>& tags, const PopularTagSet& popular) {
    int n = 0;
    std::set<std::string_view> seen;
    for (const auto& t : tags)
        if (popular.contains(t) && seen.insert(t).second) ++n;
    return n;
}

BadgeAwardIndex BadgeAwardIndex::build(const Dataset& ds) {
    BadgeAwardIndex index;
    for (const auto& u : ds.users) {
        // u.badges is time-sorted, so the first time a name shows up is the
        // user's first award of it.
        std::set<std::string_view> seen;
        for (const auto& b : u.badges)
            if (seen.insert(b.name).second) index.first_awards[b.name].push_back(b.time);
    }
    for (auto& [name, times] : index.first_awards) std::sort(times.begin(), times.end());
    return index;
}

int64_t BadgeAwardIndex::holders_before(const std::string& name, Timestamp t) const {
    auto it = first_awards.find(name);
    if (it == first_awards.end()) return 0;
    const auto& times = it->second;
    return std::lower_bound(times.begin(), times.end(), t) - times.begin();
}

std::map<std::string, int64_t> BadgeAwardIndex::counts_for(const HistorySlice& history,
                                                           Timestamp t) const {
    std::map<std::string, int64_t> counts;
    for (const auto& b : history.badges)
        if (!counts.count(b.name)) counts[b.name] = holders_before(b.name, t);
    return counts;
}

HistorySlice history_at(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode) {
    HistorySlice slice = user_history_before(ds, user_id, t);
    if (mode == ScoreMode::snapshot || slice.missing_user) return slice;
    for (auto& p : slice.posts) {
        auto [lo, hi] = ds.votes_for_post(p.post_id);
        int score = 0, favorites = 0;
        bool accepted = false;
        for (const PostVote* v = lo; v != hi; ++v) {
            if (v->time >= t) break;
            switch (v->kind) {
                case VoteKind::up: ++score; break;
                case VoteKind::down: --score; break;
                case VoteKind::favorite: ++favorites; break;
                case VoteKind::accepted: accepted = true; break;
                case VoteKind::close: break;
            }
        }
        p.score = score;
        p.favorite_count = favorites;
        p.was_accepted = p.kind == PostKind::answer && accepted;
    }
    return slice;
}

FeatureVector featurize(const Dataset& ds, const BadgeAwardIndex& badges,
                        const QuestionRecord& q, const PopularTagSet& popular,
                        const FeatureOptions& opts) {
    if (!q.owner)
        fail_runtime("missing_asker",
                     "question " + std::to_string(q.id) + " has no asker on record");
    const UserRecord* user = ds.find_user(*q.owner);
    if (!user)
        fail_runtime("missing_asker", "question " + std::to_string(q.id) + " asker " +
                                          std::to_string(*q.owner) + " is not in the dataset");

    Timestamp t = q.creation_time;
    HistorySlice history = history_at(ds, user->id, t, opts.mode);

    FeatureVector out;
    auto& v = out.values;
    v[0] = age_of_account_days(user->creation_time, t);
    v[1] = badge_score(history, badges.counts_for(history, t));
    v[2] = static_cast<double>(previous_negative_posts(history));
    v[3] = static_cast<double>(post_score_sum(history));
    v[4] = static_cast<double>(accepted_answer_score(history));
    v[5] = static_cast<double>(comment_score_sum(history));
    v[6] = static_cast<double>(favorite_score_sum(history, opts.fs_source));

    text::UrlCounts urls = text::count_urls(q.body, opts.site_hosts);
    v[7] = urls.num_urls;
    v[8] = urls.num_site_urls;
    v[9] = popular_tag_count(q.tags, popular);

    text::StyleCounts style = text::style_counts(q.title, q.body);
    out.text_fallback = style.fallback_used;
    v[10] = static_cast<double>(style.title_length);
    v[11] = static_cast<double>(style.body_length);
    v[12] = static_cast<double>(q.tags.size());
    v[13] = static_cast<double>(style.num_punctuation);
    v[14] = static_cast<double>(style.num_short_words);
    v[15] = static_cast<double>(style.code_snippet_length);
    v[16] = static_cast<double>(style.num_special_chars);
    v[17] = static_cast<double>(style.num_lowercase);
    v[18] = static_cast<double>(style.num_uppercase);
    return out;
}

FeatureVector featurize(const Dataset& ds, const QuestionRecord& q,
                        const PopularTagSet& popular, const FeatureOptions& opts) {
    BadgeAwardIndex badges = BadgeAwardIndex::build(ds);
    return featurize(ds, badges, q, popular, opts);
}

FeatureMatrix featurize_all(const Dataset& ds, const PopularTagSet& popular,
                            const FeatureOptions& opts) {
    BadgeAwardIndex badges = BadgeAwardIndex::build(ds);

    std::vector<const QuestionRecord*> eligible;
    eligible.reserve(ds.questions.size());
    FeatureMatrix matrix;
    for (const auto& q : ds.questions) {
        if (q.owner && ds.find_user(*q.owner))
            eligible.push_back(&q);
        else
            ++matrix.skipped_missing_owner;
    }

    matrix.question_ids.resize(eligible.size());
    matrix.labels.resize(eligible.size());
    matrix.X.resize(static_cast<Eigen::Index>(eligible.size()), kNumFeatures);
    std::vector<uint8_t> fallback(eligible.size(), 0);

    parallel_for(eligible.size(), [&](std::size_t i) {
        const QuestionRecord& q = *eligible[i];
        FeatureVector fv = featurize(ds, badges, q, popular, opts);
        matrix.question_ids[i] = q.id;
        matrix.labels[i] = q.is_closed() ? 1 : 0;
        for (int c = 0; c < kNumFeatures; ++c)
            matrix.X(static_cast<Eigen::Index>(i), c) = fv.values[static_cast<std::size_t>(c)];
        fallback[i] = fv.text_fallback ? 1 : 0;
    });
    for (uint8_t f : fallback) matrix.text_fallback_rows += f;
    return matrix;
}

std::vector<std::string> feature_matrix_header() {
    std::vector<std::string> header;
    header.reserve(kNumFeatures + 2);
    header.emplace_back("question_id");
    for (auto name : feature_names()) header.emplace_back(name);
    header.emplace_back("label");
    return header;
}

void write_feature_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
    csv::write_record(out, feature_matrix_header());
    std::vector<std::string> row(kNumFeatures + 2);
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        std::size_t i = static_cast<std::size_t>(r);
        row[0] = std::to_string(matrix.question_ids[i]);
        for (int c = 0; c < kNumFeatures; ++c)
            row[static_cast<std::size_t>(c) + 1] = csv::format_real(matrix.X(r, c));
        row[kNumFeatures + 1] = matrix.labels[i] ? "closed" : "open";
        csv::write_record(out, row);
    }
}

FeatureMatrix read_feature_matrix_csv(std::istream& in, const std::string& source) {
    auto header = csv::read_record(in);
    if (!header) fail_usage("feature matrix " + source + ": empty file");
    if (*header != feature_matrix_header()) {
        for (const std::string& name : feature_matrix_header())
            if (std::find(header->begin(), header->end(), name) == header->end())
                fail_usage("feature matrix " + source + ": missing feature column \"" + name +
                           "\"");
        fail_usage("feature matrix " + source + ": unexpected header row");
    }

    std::vector<int64_t> ids;
    std::vector<std::array<double, kNumFeatures>> rows;
    std::vector<uint8_t> labels;
    std::size_t lineno = 1;
    while (auto rec = csv::read_record(in)) {
        ++lineno;
        if (rec->size() == 1 && (*rec)[0].empty()) continue;  // trailing newline
        if (rec->size() != kNumFeatures + 2)
            fail_usage("feature matrix " + source + " line " + std::to_string(lineno) +
                       ": expected " + std::to_string(kNumFeatures + 2) + " fields, got " +
                       std::to_string(rec->size()));
        auto id = kv::to_int((*rec)[0]);
        if (!id)
            fail_usage("feature matrix " + source + " line " + std::to_string(lineno) +
                       ": bad question id '" + (*rec)[0] + "'");
        std::array<double, kNumFeatures> values{};
        for (int c = 0; c < kNumFeatures; ++c) {
            auto x = kv::to_real((*rec)[static_cast<std::size_t>(c) + 1]);
            if (!x)
                fail_usage("feature matrix " + source + " line " + std::to_string(lineno) +
                           ": bad value for " + std::string(feature_names()[static_cast<std::size_t>(c)]));
            values[static_cast<std::size_t>(c)] = *x;
        }
        const std::string& label = (*rec)[kNumFeatures + 1];
        if (label != "closed" && label != "open")
            fail_usage("feature matrix " + source + " line " + std::to_string(lineno) +
                       ": label must be 'closed' or 'open', got '" + label + "'");
        ids.push_back(*id);
        rows.push_back(values);
        labels.push_back(label == "closed" ? 1 : 0);
    }

    FeatureMatrix matrix;
    matrix.question_ids = std::move(ids);
    matrix.labels = std::move(labels);
    matrix.X.resize(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < kNumFeatures; ++c)
            matrix.X(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
    return matrix;
}

}  // namespace cqa
