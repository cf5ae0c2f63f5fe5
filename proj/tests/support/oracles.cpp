#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace cqa::testing::oracle {

namespace {

const UserRecord& user_ref(const Dataset& ds, int64_t user_id) {
    for (const auto& u : ds.users)
        if (u.id == user_id) return u;
    throw std::runtime_error("oracle: unknown user " + std::to_string(user_id));
}

int strict_score(const Dataset& ds, int64_t post_id, Timestamp t) {
    int score = 0;
    for (const auto& v : ds.post_votes) {
        if (v.post_id != post_id || v.time >= t) continue;
        if (v.kind == VoteKind::up) ++score;
        if (v.kind == VoteKind::down) --score;
    }
    return score;
}

int strict_favorites(const Dataset& ds, int64_t post_id, Timestamp t) {
    int n = 0;
    for (const auto& v : ds.post_votes)
        if (v.post_id == post_id && v.time < t && v.kind == VoteKind::favorite) ++n;
    return n;
}

bool strict_accepted(const Dataset& ds, int64_t post_id, Timestamp t) {
    for (const auto& v : ds.post_votes)
        if (v.post_id == post_id && v.time < t && v.kind == VoteKind::accepted) return true;
    return false;
}

int post_score(const Dataset& ds, const UserPost& p, Timestamp t, ScoreMode mode) {
    return mode == ScoreMode::snapshot ? p.score : strict_score(ds, p.post_id, t);
}

}  // namespace

double badge_score(const Dataset& ds, int64_t user_id, Timestamp t) {
    const UserRecord& user = user_ref(ds, user_id);
    std::set<std::string> names;
    for (const auto& b : user.badges)
        if (b.time < t) names.insert(b.name);

    double score = 0.0;
    for (const auto& name : names) {
        int64_t holders = 0;
        for (const auto& u : ds.users) {
            Timestamp earliest = 0;
            bool has = false;
            for (const auto& b : u.badges)
                if (b.name == name && (!has || b.time < earliest)) {
                    earliest = b.time;
                    has = true;
                }
            if (has && earliest < t) ++holders;
        }
        score += 1.0 / static_cast<double>(holders);
    }
    return score;
}

int64_t post_score_sum(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode) {
    int64_t sum = 0;
    for (const auto& p : user_ref(ds, user_id).posts)
        if (p.time < t) sum += post_score(ds, p, t, mode);
    return sum;
}

int64_t comment_score_sum(const Dataset& ds, int64_t user_id, Timestamp t) {
    int64_t sum = 0;
    for (const auto& c : user_ref(ds, user_id).comments)
        if (c.time < t) sum += c.score;
    return sum;
}

int64_t favorite_score_sum(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode,
                           FavoriteScoreSource source) {
    int64_t sum = 0;
    for (const auto& p : user_ref(ds, user_id).posts) {
        if (p.time >= t) continue;
        int favorites = mode == ScoreMode::snapshot ? p.favorite_count
                                                    : strict_favorites(ds, p.post_id, t);
        if (favorites < 1) continue;
        sum += source == FavoriteScoreSource::favorite_count
                   ? favorites
                   : post_score(ds, p, t, mode);
    }
    return sum;
}

int64_t accepted_answer_score(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode) {
    int64_t accepted = 0;
    for (const auto& p : user_ref(ds, user_id).posts) {
        if (p.time >= t || p.kind != PostKind::answer) continue;
        bool was = mode == ScoreMode::snapshot ? p.was_accepted
                                               : strict_accepted(ds, p.post_id, t);
        if (was) ++accepted;
    }
    return 15 * accepted;
}

int64_t previous_negative_posts(const Dataset& ds, int64_t user_id, Timestamp t, ScoreMode mode) {
    int64_t n = 0;
    for (const auto& p : user_ref(ds, user_id).posts)
        if (p.time < t && post_score(ds, p, t, mode) < 0) ++n;
    return n;
}

int popular_tag_count(const Dataset& ds, const std::vector<std::string>& question_tags, int k) {
    std::map<std::string, int64_t> counts;
    for (const auto& q : ds.questions)
        for (const auto& tag : q.tags) ++counts[tag];

    std::set<std::string> matched;
    for (const auto& tag : question_tags) {
        auto it = counts.find(tag);
        if (it == counts.end()) continue;
        // The tag is popular when fewer than k tags rank strictly above it
        // (higher count, or same count and alphabetically earlier).
        int64_t above = 0;
        for (const auto& [name, count] : counts)
            if (count > it->second || (count == it->second && name < tag)) ++above;
        if (above < k) matched.insert(tag);
    }
    return static_cast<int>(matched.size());
}

std::vector<NtrRow> ntr(const Dataset& ds, double epsilon) {
    int64_t cq_total = 0, ncq_total = 0;
    for (const auto& q : ds.questions)
        (q.close_event ? cq_total : ncq_total) += static_cast<int64_t>(q.tags.size());

    std::set<std::string> cq_tags;
    for (const auto& q : ds.questions)
        if (q.close_event)
            for (const auto& tag : q.tags) cq_tags.insert(tag);

    std::vector<NtrRow> rows;
    for (const auto& tag : cq_tags) {
        NtrRow row;
        row.tag = tag;
        for (const auto& q : ds.questions)
            for (const auto& have : q.tags)
                if (have == tag) ++(q.close_event ? row.cq_count : row.ncq_count);
        row.r_cq = static_cast<double>(row.cq_count) / static_cast<double>(cq_total);
        row.r_ncq = ncq_total == 0
                        ? 0.0
                        : static_cast<double>(row.ncq_count) / static_cast<double>(ncq_total);
        row.ntr = row.r_cq / (row.r_ncq + epsilon);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const NtrRow& a, const NtrRow& b) {
        if (a.ntr != b.ntr) return a.ntr > b.ntr;
        return a.tag < b.tag;
    });
    return rows;
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const long double n = static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    long double num = n * sxy - sx * sy;
    long double den = sqrtl((n * sxx - sx * sx) * (n * syy - sy * sy));
    return static_cast<double>(num / den);
}

double auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    long double wins = 0;
    int64_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                wins += 0.5L;
        }
    }
    return static_cast<double>(wins / static_cast<long double>(pairs));
}

double accuracy(const std::vector<uint8_t>& predicted, const std::vector<uint8_t>& truth) {
    int64_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if ((predicted[i] != 0) == (truth[i] != 0)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double f1(const std::vector<uint8_t>& predicted, const std::vector<uint8_t>& truth) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) ++tp;
        if (predicted[i] && !truth[i]) ++fp;
        if (!predicted[i] && truth[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    double precision = tp / (tp + fp);
    double recall = tp / (tp + fn);
    return 2 * precision * recall / (precision + recall);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    double pos = q * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return values[n - 1];
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace cqa::testing::oracle
