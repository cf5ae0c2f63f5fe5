#include "cqa/dataset.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace cqa {

std::string_view category_name(CloseCategory c) {
    switch (c) {
        case CloseCategory::ExactDuplicate: return "ExactDuplicate";
        case CloseCategory::OffTopic: return "OffTopic";
        case CloseCategory::Subjective: return "Subjective";
        case CloseCategory::NotARealQuestion: return "NotARealQuestion";
        case CloseCategory::TooLocalized: return "TooLocalized";
        case CloseCategory::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<CloseCategory> category_from_name(std::string_view name) {
    if (name == "ExactDuplicate") return CloseCategory::ExactDuplicate;
    if (name == "OffTopic") return CloseCategory::OffTopic;
    if (name == "Subjective") return CloseCategory::Subjective;
    if (name == "NotARealQuestion") return CloseCategory::NotARealQuestion;
    if (name == "TooLocalized") return CloseCategory::TooLocalized;
    if (name == "Unknown") return CloseCategory::Unknown;
    return std::nullopt;
}

const QuestionRecord* Dataset::find_question(int64_t id) const {
    auto it = std::lower_bound(questions.begin(), questions.end(), id,
                               [](const QuestionRecord& q, int64_t v) { return q.id < v; });
    if (it == questions.end() || it->id != id) return nullptr;
    return &*it;
}

const UserRecord* Dataset::find_user(int64_t id) const {
    auto it = std::lower_bound(users.begin(), users.end(), id,
                               [](const UserRecord& u, int64_t v) { return u.id < v; });
    if (it == users.end() || it->id != id) return nullptr;
    return &*it;
}

std::pair<const PostVote*, const PostVote*> Dataset::votes_for_post(int64_t id) const {
    auto lo = std::lower_bound(post_votes.begin(), post_votes.end(), id,
                               [](const PostVote& v, int64_t x) { return v.post_id < x; });
    auto hi = lo;
    while (hi != post_votes.end() && hi->post_id == id) ++hi;
    const PostVote* base = post_votes.data();
    return {base + (lo - post_votes.begin()), base + (hi - post_votes.begin())};
}

namespace {

void sort_activity(UserRecord& u) {
    auto post_key = [](const UserPost& p) { return std::tuple(p.time, p.post_id); };
    auto comment_key = [](const UserComment& c) { return std::tuple(c.time, c.score); };
    auto badge_key = [](const UserBadge& b) { return std::tie(b.time, b.name); };
    auto by = [](auto key) { return [key](const auto& a, const auto& b) { return key(a) < key(b); }; };
    std::sort(u.posts.begin(), u.posts.end(), by(post_key));
    std::sort(u.comments.begin(), u.comments.end(), by(comment_key));
    std::sort(u.badges.begin(), u.badges.end(), by(badge_key));
    std::sort(u.quarantined_posts.begin(), u.quarantined_posts.end(), by(post_key));
    std::sort(u.quarantined_comments.begin(), u.quarantined_comments.end(), by(comment_key));
    std::sort(u.quarantined_badges.begin(), u.quarantined_badges.end(), by(badge_key));
}

}  // namespace

void Dataset::finalize() {
    std::sort(questions.begin(), questions.end(),
              [](const QuestionRecord& a, const QuestionRecord& b) { return a.id < b.id; });
    std::sort(users.begin(), users.end(),
              [](const UserRecord& a, const UserRecord& b) { return a.id < b.id; });
    std::sort(post_votes.begin(), post_votes.end(), [](const PostVote& a, const PostVote& b) {
        return std::tuple(a.post_id, a.time, a.kind) < std::tuple(b.post_id, b.time, b.kind);
    });

    badge_holder_counts.clear();
    bool any = false;
    Timestamp lo = 0, hi = 0;
    auto see = [&](Timestamp t) {
        if (!any) {
            lo = hi = t;
            any = true;
        } else {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    };

    for (auto& u : users) {
        sort_activity(u);
        see(u.creation_time);
        for (const auto& p : u.posts) see(p.time);
        for (const auto& c : u.comments) see(c.time);
        std::set<std::string_view> names;
        for (const auto& b : u.badges) {
            see(b.time);
            names.insert(b.name);
        }
        for (auto name : names) ++badge_holder_counts[std::string(name)];
    }
    for (const auto& q : questions) {
        see(q.creation_time);
        if (q.close_event) see(q.close_event->time);
    }
    for (const auto& v : post_votes) see(v.time);

    time_min = lo;
    time_max = hi;
}

HistorySlice user_history_before(const Dataset& ds, int64_t user_id, Timestamp t) {
    HistorySlice slice;
    const UserRecord* u = ds.find_user(user_id);
    if (!u) {
        slice.missing_user = true;
        return slice;
    }
    for (const auto& p : u->posts) {
        if (p.time >= t) break;
        slice.posts.push_back(p);
    }
    for (const auto& c : u->comments) {
        if (c.time >= t) break;
        slice.comments.push_back(c);
    }
    for (const auto& b : u->badges) {
        if (b.time >= t) break;
        slice.badges.push_back(b);
    }
    return slice;
}

}  // namespace cqa
