#include "fixtures.hpp"

#include <sys/wait.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cqa/rng.hpp"
#include "cqa/time.hpp"

namespace cqa::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "cqa-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Timestamp ts(std::string_view text) {
    auto t = parse_timestamp(text);
    if (!t) {
        std::fprintf(stderr, "bad fixture timestamp: %.*s\n", static_cast<int>(text.size()),
                     text.data());
        std::abort();
    }
    return *t;
}

void write_sample_dump(const fs::path& dir) {
    fs::create_directories(dir);

    write_file(dir / "Posts.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<posts>
  <row Id="1" PostTypeId="1" CreationDate="2011-01-10T08:00:00.000" Score="5" ViewCount="100" Body="&lt;p&gt;How do I sort a list in Python? See http://stackoverflow.com/q/1 &lt;/p&gt;&lt;code&gt;x.sort()&lt;/code&gt;" OwnerUserId="1" Title="Sorting a list" Tags="&lt;python&gt;&lt;list&gt;" AnswerCount="2" CommentCount="1" FavoriteCount="3" AcceptedAnswerId="101" />
  <row Id="2" PostTypeId="1" CreationDate="2011-02-15T09:30:00.000" Score="-2" ViewCount="40" Body="&lt;p&gt;what is best language??? plz help&lt;/p&gt;" OwnerUserId="2" Title="best language" Tags="&lt;discussion&gt;" AnswerCount="1" CommentCount="0" FavoriteCount="0" />
  <row Id="3" PostTypeId="1" CreationDate="2011-03-20T10:00:00.000" Score="1" ViewCount="55" Body="&lt;p&gt;Why does my code crash? http://example.com/x &lt;/p&gt;" OwnerUserId="3" Title="code crash" Tags="&lt;c++&gt;" AnswerCount="0" CommentCount="2" FavoriteCount="1" />
  <row Id="4" PostTypeId="1" CreationDate="2011-04-01T11:00:00.000" Score="0" ViewCount="10" Body="&lt;p&gt;Is Vim better than Emacs?&lt;/p&gt;" OwnerUserId="2" Title="Vim vs Emacs" Tags="&lt;editors&gt;&lt;discussion&gt;" AnswerCount="3" CommentCount="0" FavoriteCount="0" ClosedDate="2011-04-02T12:00:00.000" />
  <row Id="5" PostTypeId="1" CreationDate="2011-05-05T12:00:00.000" Score="7" ViewCount="200" Body="&lt;pre&gt;int main() { return 0; }&lt;/pre&gt;&lt;p&gt;Why does this work?&lt;/p&gt;" OwnerUserId="4" Title="main return" Tags="&lt;c&gt;" AnswerCount="1" CommentCount="0" FavoriteCount="2" AcceptedAnswerId="102" />
  <row Id="6" PostTypeId="1" CreationDate="2011-06-10T13:00:00.000" Score="-1" ViewCount="30" Body="&lt;p&gt;my homework is broken fix it for me&lt;/p&gt;" OwnerUserId="5" Title="hw" Tags="&lt;java&gt;" AnswerCount="0" CommentCount="0" FavoriteCount="0" />
  <row Id="7" PostTypeId="1" CreationDate="2011-07-12T14:00:00.000" Score="3" ViewCount="80" Body="&lt;p&gt;How to center a div in CSS? http://stackoverflow.com/q/7 and https://www.stackoverflow.com/a/9 &lt;/p&gt;" OwnerUserId="1" Title="center div" Tags="&lt;css&gt;&lt;html&gt;" AnswerCount="2" CommentCount="3" FavoriteCount="5" AcceptedAnswerId="103" />
  <row Id="8" PostTypeId="1" CreationDate="2011-08-18T15:00:00.000" Score="0" ViewCount="20" Body="&lt;p&gt;my local server at work does not boot, who can come by?&lt;/p&gt;" OwnerUserId="6" Title="server down at my desk" Tags="&lt;server&gt;" AnswerCount="0" CommentCount="0" FavoriteCount="0" />
  <row Id="9" PostTypeId="1" CreationDate="2011-09-22T16:00:00.000" Score="2" ViewCount="66" Body="&lt;p&gt;Duplicate of question one. How to sort in Python?&lt;/p&gt;" OwnerUserId="5" Title="sort python list" Tags="&lt;python&gt;" AnswerCount="1" CommentCount="0" FavoriteCount="1" />
  <row Id="10" PostTypeId="1" CreationDate="2012-01-03T17:00:00.000" Score="4" ViewCount="90" Body="&lt;p&gt;What does the static keyword mean? &lt;code&gt;static int x;&lt;/code&gt;&lt;/p&gt;" OwnerUserId="3" Title="static keyword" Tags="&lt;c&gt;&lt;keywords&gt;" AnswerCount="2" CommentCount="1" FavoriteCount="0" AcceptedAnswerId="104" />
  <row Id="11" PostTypeId="1" CreationDate="2012-02-14T18:00:00.000" Score="1" ViewCount="44" Body="&lt;p&gt;Opinions on the best ORM framework please&lt;/p&gt;" OwnerUserId="6" Title="best ORM" Tags="&lt;orm&gt;&lt;discussion&gt;" AnswerCount="1" CommentCount="0" FavoriteCount="0" />
  <row Id="12" PostTypeId="1" CreationDate="2012-03-25T19:00:00.000" Score="6" ViewCount="150" Body="&lt;p&gt;How do promises work in JS?&lt;/p&gt;" OwnerUserId="4" Title="JS promises" Tags="&lt;javascript&gt;" AnswerCount="1" CommentCount="2" FavoriteCount="4" AcceptedAnswerId="105" />
  <row Id="101" PostTypeId="2" CreationDate="2011-01-10T09:00:00.000" Score="8" Body="&lt;p&gt;Use sort().&lt;/p&gt;" OwnerUserId="2" CommentCount="0" />
  <row Id="102" PostTypeId="2" CreationDate="2011-05-05T13:00:00.000" Score="4" Body="&lt;p&gt;Because C.&lt;/p&gt;" OwnerUserId="1" CommentCount="0" />
  <row Id="103" PostTypeId="2" CreationDate="2011-07-12T15:00:00.000" Score="5" Body="&lt;p&gt;margin auto.&lt;/p&gt;" OwnerUserId="4" CommentCount="0" />
  <row Id="104" PostTypeId="2" CreationDate="2012-01-03T18:00:00.000" Score="2" Body="&lt;p&gt;Lifetime.&lt;/p&gt;" OwnerUserId="1" CommentCount="0" />
  <row Id="105" PostTypeId="2" CreationDate="2012-03-25T20:00:00.000" Score="3" Body="&lt;p&gt;Event loop.&lt;/p&gt;" OwnerUserId="5" CommentCount="0" />
  <row Id="106" PostTypeId="2" CreationDate="2011-02-15T10:30:00.000" Score="-3" Body="&lt;p&gt;PHP obviously.&lt;/p&gt;" OwnerUserId="6" CommentCount="0" />
</posts>
)");

    write_file(dir / "Users.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<users>
  <row Id="1" CreationDate="2010-06-01T00:00:00.000" />
  <row Id="2" CreationDate="2010-07-01T00:00:00.000" />
  <row Id="3" CreationDate="2011-03-01T00:00:00.000" />
  <row Id="4" CreationDate="2010-12-01T00:00:00.000" />
  <row Id="5" CreationDate="2011-06-01T00:00:00.000" />
  <row Id="6" CreationDate="2011-08-01T00:00:00.000" />
</users>
)");

    write_file(dir / "Badges.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<badges>
  <row UserId="1" Name="Teacher" Date="2010-08-01T00:00:00.000" />
  <row UserId="1" Name="Nice Answer" Date="2011-06-15T00:00:00.000" />
  <row UserId="2" Name="Teacher" Date="2010-09-15T00:00:00.000" />
  <row UserId="4" Name="Teacher" Date="2011-01-20T00:00:00.000" />
  <row UserId="4" Name="Editor" Date="2011-05-01T00:00:00.000" />
  <row UserId="5" Name="Student" Date="2011-07-01T00:00:00.000" />
</badges>
)");

    write_file(dir / "Comments.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<comments>
  <row PostId="1" UserId="3" Score="2" CreationDate="2011-01-10T10:00:00.000" />
  <row PostId="3" UserId="1" Score="0" CreationDate="2011-03-20T11:00:00.000" />
  <row PostId="3" UserId="2" Score="1" CreationDate="2011-03-21T09:00:00.000" />
  <row PostId="7" UserId="2" Score="3" CreationDate="2011-07-13T08:00:00.000" />
  <row PostId="10" UserId="4" Score="1" CreationDate="2012-01-04T08:00:00.000" />
</comments>
)");

    write_file(dir / "PostHistory.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<posthistory>
  <row Id="1" PostId="2" PostHistoryTypeId="10" CreationDate="2011-02-20T12:00:00.000" Comment="3" />
  <row Id="2" PostId="6" PostHistoryTypeId="10" CreationDate="2011-06-12T09:00:00.000" Comment="4" />
  <row Id="3" PostId="8" PostHistoryTypeId="10" CreationDate="2011-08-20T10:00:00.000" Comment="7" />
  <row Id="4" PostId="9" PostHistoryTypeId="10" CreationDate="2011-09-25T11:00:00.000" Comment="1" />
  <row Id="5" PostId="11" PostHistoryTypeId="10" CreationDate="2012-02-20T12:00:00.000" Comment="3" />
  <row Id="6" PostId="11" PostHistoryTypeId="11" CreationDate="2012-02-22T12:00:00.000" />
  <row Id="7" PostId="2" PostHistoryTypeId="14" CreationDate="2011-03-01T00:00:00.000" />
</posthistory>
)");

    write_file(dir / "Votes.xml", R"(<?xml version="1.0" encoding="utf-8"?>
<votes>
  <row Id="1" PostId="1" VoteTypeId="2" CreationDate="2011-01-10T12:00:00.000" />
  <row Id="2" PostId="1" VoteTypeId="2" CreationDate="2011-01-11T12:00:00.000" />
  <row Id="3" PostId="1" VoteTypeId="5" CreationDate="2011-01-12T12:00:00.000" />
  <row Id="4" PostId="101" VoteTypeId="1" CreationDate="2011-01-10T09:30:00.000" />
  <row Id="5" PostId="101" VoteTypeId="2" CreationDate="2011-01-10T10:30:00.000" />
  <row Id="6" PostId="2" VoteTypeId="3" CreationDate="2011-02-16T09:00:00.000" />
  <row Id="7" PostId="2" VoteTypeId="6" CreationDate="2011-02-19T09:00:00.000" />
  <row Id="8" PostId="2" VoteTypeId="6" CreationDate="2011-02-19T10:00:00.000" />
  <row Id="9" PostId="2" VoteTypeId="6" CreationDate="2011-02-19T11:00:00.000" />
  <row Id="10" PostId="2" VoteTypeId="6" CreationDate="2011-02-20T09:00:00.000" />
  <row Id="11" PostId="2" VoteTypeId="6" CreationDate="2011-02-20T11:00:00.000" />
  <row Id="12" PostId="6" VoteTypeId="6" CreationDate="2011-06-12T08:00:00.000" />
  <row Id="13" PostId="9" VoteTypeId="6" CreationDate="2011-09-24T08:00:00.000" />
  <row Id="14" PostId="9" VoteTypeId="6" CreationDate="2011-09-24T09:00:00.000" />
  <row Id="15" PostId="9" VoteTypeId="6" CreationDate="2011-09-24T10:00:00.000" />
  <row Id="16" PostId="9" VoteTypeId="6" CreationDate="2011-09-24T11:00:00.000" />
  <row Id="17" PostId="9" VoteTypeId="6" CreationDate="2011-09-25T10:00:00.000" />
  <row Id="18" PostId="5" VoteTypeId="2" CreationDate="2011-05-06T12:00:00.000" />
  <row Id="19" PostId="5" VoteTypeId="5" CreationDate="2011-05-07T12:00:00.000" />
  <row Id="20" PostId="7" VoteTypeId="5" CreationDate="2011-07-14T12:00:00.000" />
  <row Id="21" PostId="102" VoteTypeId="1" CreationDate="2011-05-05T14:00:00.000" />
  <row Id="22" PostId="106" VoteTypeId="3" CreationDate="2011-02-16T11:00:00.000" />
</votes>
)");
}

CloseEvent close_event(Timestamp t, CloseCategory cat, int votes) {
    CloseEvent ev;
    ev.time = t;
    ev.category = cat;
    ev.vote_count = votes;
    ev.moderator_closed = (votes == 1);
    return ev;
}

namespace {

UserRecord& user_ref(Dataset& ds, int64_t id) {
    for (auto& u : ds.users)
        if (u.id == id) return u;
    throw std::runtime_error("fixture references unknown user " + std::to_string(id));
}

}  // namespace

DatasetBuilder& DatasetBuilder::user(int64_t id, Timestamp created) {
    UserRecord u;
    u.id = id;
    u.creation_time = created;
    ds.users.push_back(std::move(u));
    return *this;
}

DatasetBuilder& DatasetBuilder::question(const QuestionSpec& spec) {
    QuestionRecord q;
    q.id = spec.id;
    q.creation_time = spec.created;
    q.owner = spec.owner;
    q.title = spec.title;
    q.body = spec.body;
    q.tags = spec.tags;
    q.score = spec.score;
    q.view_count = spec.view_count;
    q.answer_count = spec.answer_count;
    q.accepted_answer_id = spec.accepted_answer_id;
    q.favorite_count = spec.favorite_count;
    q.comment_count = spec.comment_count;
    q.close_event = spec.close;
    q.status_flags = spec.status_flags;
    ds.questions.push_back(std::move(q));
    if (spec.owner) {
        UserPost p{spec.id, PostKind::question, spec.created, spec.score, spec.favorite_count,
                   false};
        UserRecord& u = user_ref(ds, *spec.owner);
        (p.time < u.creation_time ? u.quarantined_posts : u.posts).push_back(p);
    }
    return *this;
}

DatasetBuilder& DatasetBuilder::answer(int64_t user_id, int64_t post_id, Timestamp t, int score,
                                       int favorite_count, bool accepted) {
    UserPost p{post_id, PostKind::answer, t, score, favorite_count, accepted};
    UserRecord& u = user_ref(ds, user_id);
    (t < u.creation_time ? u.quarantined_posts : u.posts).push_back(p);
    return *this;
}

DatasetBuilder& DatasetBuilder::comment(int64_t user_id, Timestamp t, int score) {
    UserRecord& u = user_ref(ds, user_id);
    (t < u.creation_time ? u.quarantined_comments : u.comments).push_back(UserComment{t, score});
    return *this;
}

DatasetBuilder& DatasetBuilder::badge(int64_t user_id, std::string name, Timestamp t) {
    UserRecord& u = user_ref(ds, user_id);
    (t < u.creation_time ? u.quarantined_badges : u.badges)
        .push_back(UserBadge{std::move(name), t});
    return *this;
}

DatasetBuilder& DatasetBuilder::vote(int64_t post_id, VoteKind kind, Timestamp t) {
    ds.post_votes.push_back(PostVote{post_id, kind, t});
    return *this;
}

Dataset DatasetBuilder::build() const {
    Dataset out = ds;
    out.finalize();
    return out;
}

namespace {

const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "how",  "why",   "does",   "the",    "code",   "build",  "fail",  "array",
        "loop", "class", "method", "thread", "memory", "value",  "index", "string",
        "file", "parse", "query",  "table",  "update", "branch", "merge", "Linker",
        "GCC",  "stack", "heap",   "mutex",  "socket", "buffer",
    };
    return words;
}

const std::vector<std::string>& tag_pool() {
    static const std::vector<std::string> tags = {
        "c++", "python", "java", "sql", "html", "css", "linux", "git", "regex", "json",
    };
    return tags;
}

const std::vector<std::string>& badge_pool() {
    static const std::vector<std::string> names = {
        "Teacher", "Student", "Editor", "Critic", "Scholar", "Commentator",
    };
    return names;
}

std::string random_words(SplitMix64& rng, int count, bool capitalize_first) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        std::string w = word_pool()[rng.bounded(word_pool().size())];
        if (i == 0 && capitalize_first && !w.empty())
            w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        if (i) out += ' ';
        out += w;
    }
    return out;
}

constexpr Timestamp kDay = 86400;
constexpr Timestamp kHour = 3600;

}  // namespace

Dataset random_corpus(uint64_t seed, int num_users, int num_questions, bool with_votes) {
    SplitMix64 rng(seed);
    DatasetBuilder b;

    const Timestamp epoch = ts("2010-01-01T00:00:00");
    for (int u = 1; u <= num_users; ++u)
        b.user(u, epoch + static_cast<Timestamp>(rng.bounded(500)) * kDay +
                      static_cast<Timestamp>(rng.bounded(24)) * kHour);

    int64_t next_post = num_questions + 1;
    for (int i = 1; i <= num_questions; ++i) {
        int64_t owner = 1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(num_users)));
        Timestamp owner_created = user_ref(b.ds, owner).creation_time;
        Timestamp created = owner_created + static_cast<Timestamp>(rng.bounded(700)) * kDay +
                            static_cast<Timestamp>(rng.bounded(86400));

        QuestionSpec q;
        q.id = i;
        q.owner = owner;
        q.created = created;
        q.title = random_words(rng, 2 + static_cast<int>(rng.bounded(8)), true);
        std::string body = "<p>" + random_words(rng, 4 + static_cast<int>(rng.bounded(40)), true);
        if (rng.bounded(3) == 0) body += " http://example.com/ref";
        if (rng.bounded(4) == 0) body += " see http://stackoverflow.com/q/7";
        body += ".</p>";
        if (rng.bounded(3) == 0)
            body += "<code>" + random_words(rng, 1 + static_cast<int>(rng.bounded(6)), false) +
                    "</code>";
        q.body = body;
        q.tags.clear();
        int ntags = 1 + static_cast<int>(rng.bounded(4));
        for (int k = 0; k < ntags; ++k) {
            const std::string& tag = tag_pool()[rng.bounded(tag_pool().size())];
            bool dup = false;
            for (const auto& have : q.tags) dup = dup || have == tag;
            if (!dup) q.tags.push_back(tag);
        }
        q.score = static_cast<int>(rng.bounded(12)) - 3;
        q.view_count = static_cast<int>(rng.bounded(500));
        q.answer_count = static_cast<int>(rng.bounded(4));
        q.favorite_count = rng.bounded(3) == 0 ? static_cast<int>(rng.bounded(6)) : 0;
        q.comment_count = static_cast<int>(rng.bounded(4));
        if (rng.bounded(10) < 3) {
            auto cat = static_cast<CloseCategory>(rng.bounded(5));
            int votes = 1 + static_cast<int>(rng.bounded(5));
            q.close = close_event(created + kHour + static_cast<Timestamp>(rng.bounded(90)) * kDay,
                                  cat, votes);
        }
        if (q.answer_count > 0 && rng.bounded(2) == 0) q.accepted_answer_id = next_post;
        b.question(q);

        for (int a = 0; a < q.answer_count; ++a) {
            int64_t who = 1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(num_users)));
            Timestamp at = created + kHour + static_cast<Timestamp>(rng.bounded(30)) * kDay;
            bool accepted = q.accepted_answer_id && *q.accepted_answer_id == next_post;
            b.answer(who, next_post++, at, static_cast<int>(rng.bounded(10)) - 2,
                     static_cast<int>(rng.bounded(2)), accepted);
        }
    }

    for (int u = 1; u <= num_users; ++u) {
        Timestamp created = user_ref(b.ds, u).creation_time;
        int ncomments = static_cast<int>(rng.bounded(6));
        for (int c = 0; c < ncomments; ++c)
            b.comment(u, created + static_cast<Timestamp>(rng.bounded(800)) * kDay,
                      static_cast<int>(rng.bounded(5)) - 1);
        int nbadges = static_cast<int>(rng.bounded(4));
        for (int k = 0; k < nbadges; ++k)
            b.badge(u, badge_pool()[rng.bounded(badge_pool().size())],
                    created + static_cast<Timestamp>(rng.bounded(800)) * kDay);
    }

    if (with_votes) {
        for (const auto& q : b.ds.questions) {
            int nvotes = static_cast<int>(rng.bounded(5));
            for (int v = 0; v < nvotes; ++v) {
                VoteKind kind = std::array{VoteKind::up, VoteKind::up, VoteKind::down,
                                           VoteKind::favorite}[rng.bounded(4)];
                b.vote(q.id, kind,
                       q.creation_time + static_cast<Timestamp>(rng.bounded(200)) * kDay);
            }
            if (q.close_event && q.close_event->vote_count > 1)
                for (int v = 0; v < q.close_event->vote_count; ++v)
                    b.vote(q.id, VoteKind::close, q.close_event->time - (v + 1) * kHour);
        }
        for (const auto& u : b.ds.users)
            for (const auto& p : u.posts)
                if (p.kind == PostKind::answer) {
                    if (p.was_accepted) b.vote(p.post_id, VoteKind::accepted, p.time + kHour);
                    int nvotes = static_cast<int>(rng.bounded(3));
                    for (int v = 0; v < nvotes; ++v)
                        b.vote(p.post_id, VoteKind::up,
                               p.time + static_cast<Timestamp>(rng.bounded(100)) * kDay);
                }
    }

    return b.build();
}

Dataset separable_corpus(uint64_t seed, int num_closed, int num_open) {
    SplitMix64 rng(seed);
    DatasetBuilder b;

    const Timestamp base = ts("2012-01-01T00:00:00");
    int64_t next_user = 1;
    int64_t next_question = 1;

    auto add = [&](bool closed) {
        Timestamp created = base + static_cast<Timestamp>(rng.bounded(180)) * kDay +
                            static_cast<Timestamp>(rng.bounded(86400));
        // Account ages overlap on purpose: age alone separates only partly,
        // while titles and links separate cleanly.
        Timestamp account;
        if (closed) {
            account = created - static_cast<Timestamp>(1 + rng.bounded(400 * 24)) * kHour;
        } else {
            account = created - static_cast<Timestamp>(30 + rng.bounded(870)) * kDay;
        }
        int64_t owner = next_user++;
        b.user(owner, account);

        QuestionSpec q;
        q.id = next_question++;
        q.owner = owner;
        q.created = created;
        int title_words = closed ? 1 + static_cast<int>(rng.bounded(2))
                                 : 5 + static_cast<int>(rng.bounded(6));
        q.title = random_words(rng, title_words, true);
        std::string body = "<p>" + random_words(rng, 10 + static_cast<int>(rng.bounded(30)), true);
        if (!closed) {
            int links = 1 + static_cast<int>(rng.bounded(3));
            for (int k = 0; k < links; ++k)
                body += " http://stackoverflow.com/q/" + std::to_string(1 + rng.bounded(900));
        }
        body += ".</p>";
        q.body = body;
        q.tags = {tag_pool()[rng.bounded(tag_pool().size())]};
        q.score = static_cast<int>(rng.bounded(7)) - 2;
        q.answer_count = static_cast<int>(rng.bounded(3));
        q.favorite_count = static_cast<int>(rng.bounded(3));
        if (closed)
            q.close = close_event(created + kDay, static_cast<CloseCategory>(rng.bounded(5)),
                                  1 + static_cast<int>(rng.bounded(5)));
        b.question(q);
    };

    for (int i = 0; i < num_closed; ++i) add(true);
    for (int i = 0; i < num_open; ++i) add(false);
    return b.build();
}

std::string mutate_future(Dataset& ds, int64_t question_id, uint64_t seed) {
    SplitMix64 rng(seed);
    const QuestionRecord* found = ds.find_question(question_id);
    if (!found || !found->owner) throw std::runtime_error("mutation needs an owned question");
    const Timestamp t = found->creation_time;
    const int64_t owner = *found->owner;
    const Timestamp delta = static_cast<Timestamp>(rng.bounded(90)) * kDay +
                            static_cast<Timestamp>(rng.bounded(2)) * kHour;

    std::string what;
    switch (rng.bounded(9)) {
        case 0: {
            int64_t post_id = 100000 + static_cast<int64_t>(rng.bounded(1000));
            user_ref(ds, owner).posts.push_back(UserPost{
                post_id, PostKind::answer, t + delta, static_cast<int>(rng.bounded(9)) - 2,
                static_cast<int>(rng.bounded(3)), rng.bounded(2) == 0});
            what = "future answer by the asker";
            break;
        }
        case 1:
            user_ref(ds, owner).comments.push_back(
                UserComment{t + delta, static_cast<int>(rng.bounded(5)) - 1});
            what = "future comment by the asker";
            break;
        case 2:
            user_ref(ds, owner).badges.push_back(
                UserBadge{badge_pool()[rng.bounded(badge_pool().size())], t + delta});
            what = "future badge award to the asker";
            break;
        case 3: {
            const auto& posts = user_ref(ds, owner).posts;
            int64_t target = question_id;
            if (!posts.empty()) target = posts[rng.bounded(posts.size())].post_id;
            VoteKind kind = std::array{VoteKind::up, VoteKind::down, VoteKind::favorite,
                                       VoteKind::accepted}[rng.bounded(4)];
            ds.post_votes.push_back(PostVote{target, kind, t + delta});
            what = "future vote on one of the asker's posts";
            break;
        }
        case 4: {
            QuestionRecord q;
            q.id = 200000 + static_cast<int64_t>(rng.bounded(1000));
            q.creation_time = t + delta;
            q.owner = ds.users[rng.bounded(ds.users.size())].id;
            q.title = "later question";
            q.body = "<p>later body</p>";
            q.tags = {tag_pool()[rng.bounded(tag_pool().size())]};
            UserPost p{q.id, PostKind::question, q.creation_time, 0, 0, false};
            user_ref(ds, *q.owner).posts.push_back(p);
            ds.questions.push_back(std::move(q));
            what = "question asked later by someone";
            break;
        }
        case 5: {
            UserRecord u;
            u.id = 300000 + static_cast<int64_t>(rng.bounded(1000));
            u.creation_time = t + delta;
            ds.users.push_back(std::move(u));
            what = "account registered later";
            break;
        }
        case 6: {
            QuestionRecord& q = const_cast<QuestionRecord&>(*found);
            if (q.close_event) {
                q.close_event.reset();
                what = "closure removed from the question";
            } else {
                q.close_event = close_event(t + kDay + delta, CloseCategory::OffTopic, 5);
                what = "closure added to the question";
            }
            break;
        }
        case 7: {
            QuestionRecord& q = const_cast<QuestionRecord&>(*found);
            q.view_count += 100;
            q.answer_count += 1;
            q.comment_count += 2;
            what = "view/answer/comment tallies bumped";
            break;
        }
        default: {
            QuestionRecord& q = const_cast<QuestionRecord&>(*found);
            q.status_flags ^= kStatusLocked;
            what = "lock flag toggled";
            break;
        }
    }
    ds.finalize();
    return what;
}

std::string tool_path() {
    const char* p = std::getenv("CQA_TOOL");
    if (!p || !*p) {
        std::fprintf(stderr, "CQA_TOOL must point at the binary under test\n");
        std::abort();
    }
    return p;
}

std::string shell_quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

RunResult run_tool(const std::vector<std::string>& args) {
    TempDir capture;
    fs::path out_file = capture.file("stdout");
    fs::path err_file = capture.file("stderr");

    std::string cmd = shell_quote(tool_path());
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " > " + shell_quote(out_file.string()) + " 2> " + shell_quote(err_file.string());

    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_file);
    r.err = read_file(err_file);
    return r;
}

}  // namespace cqa::testing
