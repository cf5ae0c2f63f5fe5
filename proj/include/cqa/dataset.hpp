#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/time.hpp"

namespace cqa {

enum class CloseCategory : uint8_t {
    ExactDuplicate,
    OffTopic,
    Subjective,
    NotARealQuestion,
    TooLocalized,
    Unknown,
};

// The five real categories; Unknown is a parse-time placeholder.
inline constexpr int kNumCloseCategories = 5;

std::string_view category_name(CloseCategory c);
std::optional<CloseCategory> category_from_name(std::string_view name);

enum StatusFlag : uint8_t {
    kStatusLocked = 1,
    kStatusCommunityWiki = 2,
    kStatusProtected = 4,
};

struct CloseEvent {
    Timestamp time = 0;
    CloseCategory category = CloseCategory::Unknown;
    int vote_count = 0;  // 1..5; 0 when the dump carries no usable vote data
    bool moderator_closed = false;

    bool has_vote_count() const { return vote_count >= 1; }
    bool operator==(const CloseEvent&) const = default;
};

enum class PostKind : uint8_t { question, answer };

struct UserPost {
    int64_t post_id = 0;
    PostKind kind = PostKind::question;
    Timestamp time = 0;
    int score = 0;
    int favorite_count = 0;
    bool was_accepted = false;

    bool operator==(const UserPost&) const = default;
};

struct UserComment {
    Timestamp time = 0;
    int score = 0;

    bool operator==(const UserComment&) const = default;
};

struct UserBadge {
    std::string name;
    Timestamp time = 0;

    bool operator==(const UserBadge&) const = default;
};

struct UserRecord {
    int64_t id = 0;
    Timestamp creation_time = 0;
    // Sorted ascending by time (ties broken by post id / score / name).
    std::vector<UserPost> posts;
    std::vector<UserComment> comments;
    std::vector<UserBadge> badges;
    // Activity timestamped before the account existed: kept for audit,
    // excluded from history lookups.
    std::vector<UserPost> quarantined_posts;
    std::vector<UserComment> quarantined_comments;
    std::vector<UserBadge> quarantined_badges;

    bool operator==(const UserRecord&) const = default;
};

struct QuestionRecord {
    int64_t id = 0;
    Timestamp creation_time = 0;
    std::optional<int64_t> owner;
    std::string title;
    std::string body;  // raw HTML
    std::vector<std::string> tags;
    int score = 0;
    int view_count = 0;
    int answer_count = 0;
    std::optional<int64_t> accepted_answer_id;
    int favorite_count = 0;
    int comment_count = 0;
    std::optional<CloseEvent> close_event;
    uint8_t status_flags = 0;

    bool is_closed() const { return close_event.has_value(); }
    bool operator==(const QuestionRecord&) const = default;
};

// Vote rows are normalized to these kinds at ingest; dump-specific type ids
// live only in the mapping config.
enum class VoteKind : uint8_t { accepted, up, down, favorite, close };

struct PostVote {
    int64_t post_id = 0;
    VoteKind kind = VoteKind::up;
    Timestamp time = 0;

    bool operator==(const PostVote&) const = default;
};

struct Dataset {
    std::vector<QuestionRecord> questions;  // sorted by id
    std::vector<UserRecord> users;          // sorted by id
    std::vector<PostVote> post_votes;       // sorted by (post_id, time, type)

    // Derived by finalize(); never persisted.
    std::map<std::string, int64_t> badge_holder_counts;  // distinct holders
    Timestamp time_min = 0;
    Timestamp time_max = 0;

    const QuestionRecord* find_question(int64_t id) const;
    const UserRecord* find_user(int64_t id) const;
    // Contiguous [first, last) range of votes for one post.
    std::pair<const PostVote*, const PostVote*> votes_for_post(int64_t id) const;

    // Sorts all collections into canonical order and rebuilds derived fields.
    void finalize();

    bool operator==(const Dataset&) const = default;
};

struct HistorySlice {
    bool missing_user = false;  // unknown user id: empty history, flagged
    std::vector<UserPost> posts;
    std::vector<UserComment> comments;
    std::vector<UserBadge> badges;
};

// Activity strictly before t. Pure; unknown user yields an empty flagged slice.
HistorySlice user_history_before(const Dataset& ds, int64_t user_id, Timestamp t);

}  // namespace cqa
