#pragma once

#include <map>
#include <string>

#include "cqa/dataset.hpp"

namespace cqa {

// Names and ids used to read a dump directory. Defaults match the 2012-era
// Stack Exchange dump schema; every entry can be overridden from a key-value
// mapping file (see default_mapping_text for the full key list).
struct DumpMappingConfig {
    int version = 1;

    std::string posts_file = "Posts.xml";
    std::string users_file = "Users.xml";
    std::string badges_file = "Badges.xml";
    std::string comments_file = "Comments.xml";
    std::string post_history_file = "PostHistory.xml";
    std::string votes_file = "Votes.xml";

    struct PostAttrs {
        std::string id = "Id";
        std::string post_type = "PostTypeId";
        std::string creation = "CreationDate";
        std::string score = "Score";
        std::string view_count = "ViewCount";
        std::string body = "Body";
        std::string owner = "OwnerUserId";
        std::string title = "Title";
        std::string tags = "Tags";
        std::string answer_count = "AnswerCount";
        std::string comment_count = "CommentCount";
        std::string favorite_count = "FavoriteCount";
        std::string accepted_answer = "AcceptedAnswerId";
        std::string closed_date = "ClosedDate";
    } posts;

    struct UserAttrs {
        std::string id = "Id";
        std::string creation = "CreationDate";
    } users;

    struct BadgeAttrs {
        std::string user = "UserId";
        std::string name = "Name";
        std::string date = "Date";
    } badges;

    struct CommentAttrs {
        std::string post = "PostId";
        std::string user = "UserId";
        std::string score = "Score";
        std::string creation = "CreationDate";
    } comments;

    struct HistoryAttrs {
        std::string post = "PostId";
        std::string type = "PostHistoryTypeId";
        std::string creation = "CreationDate";
        std::string comment = "Comment";
        // Nonstandard: close rows may carry an explicit vote tally for dumps
        // whose close-vote rows have expired.
        std::string vote_count = "VoteCount";
    } history;

    struct VoteAttrs {
        std::string post = "PostId";
        std::string type = "VoteTypeId";
        std::string creation = "CreationDate";
    } votes;

    int post_type_question = 1;
    int post_type_answer = 2;

    int history_close = 10;
    int history_reopen = 11;
    int history_lock = 14;
    int history_unlock = 15;
    int history_community_wiki = 16;
    int history_protect = 19;
    int history_unprotect = 20;

    int vote_accepted = 1;
    int vote_up = 2;
    int vote_down = 3;
    int vote_favorite = 5;
    int vote_close = 6;

    // Close-reason id (the Comment attribute of a close row) -> category.
    std::map<int64_t, CloseCategory> close_reasons = {
        {1, CloseCategory::ExactDuplicate},
        {2, CloseCategory::OffTopic},
        {3, CloseCategory::Subjective},
        {4, CloseCategory::NotARealQuestion},
        {7, CloseCategory::TooLocalized},
    };
};

// Parses a mapping file and applies it over the defaults. Unknown keys,
// duplicate keys, a missing or unsupported version, and unparseable values
// are usage errors.
DumpMappingConfig load_mapping(const std::string& path);

// The built-in defaults in mapping-file form.
std::string default_mapping_text();

}  // namespace cqa
