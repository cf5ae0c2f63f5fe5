#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqa/dataset.hpp"

namespace cqa::testing {

// Self-deleting directory under the system temp path.
struct TempDir {
    std::filesystem::path path;

    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path.string(); }
    std::filesystem::path file(std::string_view name) const { return path / name; }
};

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// parse_timestamp or abort; keeps fixture setup terse.
Timestamp ts(std::string_view text);

// Writes the six-file sample dump: 12 questions (5 end up closed, one of
// them via ClosedDate only, one closed-then-reopened), 6 answers, 6 users,
// badges, comments, history events, and vote rows.
void write_sample_dump(const std::filesystem::path& dir);

// Hand-derived facts about the sample dump.
struct SampleDumpFacts {
    std::size_t questions = 12;
    std::size_t answers = 6;
    std::size_t users = 6;
    std::size_t badges = 6;
    std::size_t comments = 5;
    std::size_t votes = 22;
    std::size_t closed = 5;               // ids 2, 4, 6, 8, 9
    std::size_t unknown_category = 1;     // id 4, ClosedDate with no history row
    std::size_t vote_count_unavailable = 2;  // ids 4 and 8 have no close votes
    std::size_t quarantined = 2;          // one pre-creation answer, one comment
    std::size_t reopened = 1;             // id 11
};

// --- direct dataset construction ---

struct QuestionSpec {
    int64_t id = 0;
    std::optional<int64_t> owner;
    Timestamp created = 0;
    std::string title = "How do I do this";
    std::string body = "<p>Plain body text.</p>";
    std::vector<std::string> tags = {"tag"};
    int score = 0;
    int view_count = 0;
    int answer_count = 0;
    std::optional<int64_t> accepted_answer_id;
    int favorite_count = 0;
    int comment_count = 0;
    std::optional<CloseEvent> close;
    uint8_t status_flags = 0;
};

CloseEvent close_event(Timestamp t, CloseCategory cat, int votes = 5);

// Builds datasets the way ingest would: a question also lands in its owner's
// post history, answers/comments/badges attach to users, and build()
// finalizes a copy.
struct DatasetBuilder {
    Dataset ds;

    DatasetBuilder& user(int64_t id, Timestamp created);
    DatasetBuilder& question(const QuestionSpec& spec);
    DatasetBuilder& answer(int64_t user_id, int64_t post_id, Timestamp t, int score,
                           int favorite_count = 0, bool accepted = false);
    DatasetBuilder& comment(int64_t user_id, Timestamp t, int score);
    DatasetBuilder& badge(int64_t user_id, std::string name, Timestamp t);
    DatasetBuilder& vote(int64_t post_id, VoteKind kind, Timestamp t);

    Dataset build() const;
};

// Seeded random corpus exercising every feature channel: users of varying
// age, questions with tags/urls/code, answers, comments, badges, vote rows,
// and a mix of closed and open questions.
Dataset random_corpus(uint64_t seed, int num_users, int num_questions, bool with_votes);

// Seeded corpus where closed questions have short titles, no site links,
// and freshly created asker accounts, while open ones have long titles,
// site links, and old accounts.
Dataset separable_corpus(uint64_t seed, int num_closed, int num_open);

// Applies one seeded mutation dated at or after q's creation instant (new
// activity, new rows, or post-creation fields of q itself) and refinalizes.
// Returns a short description of the mutation.
std::string mutate_future(Dataset& ds, int64_t question_id, uint64_t seed);

// --- subprocess driver for CLI-level tests ---

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Path of the binary under test, from the CQA_TOOL environment variable.
std::string tool_path();
RunResult run_tool(const std::vector<std::string>& args);
std::string shell_quote(std::string_view s);

}  // namespace cqa::testing
