#include "cqa/dump_parser.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "cqa/common.hpp"
#include "cqa/kvconfig.hpp"
#include "cqa/xml_rows.hpp"

namespace fs = std::filesystem;

namespace cqa {

std::size_t FileIngest::total_skipped() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

std::size_t IngestReport::total_rows() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.rows;
    return n;
}

std::size_t IngestReport::total_malformed() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.malformed;
    return n;
}

std::size_t IngestReport::total_skipped() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.total_skipped();
    return n;
}

namespace {

// Pulls typed attributes out of one row, recording the first failure reason.
struct RowReader {
    const xmlrow::Row& row;
    FileIngest& fi;
    bool ok = true;

    void skip(const std::string& reason) {
        if (ok) {
            ++fi.skipped[reason];
            ok = false;
        }
    }

    const std::string* raw(const std::string& attr) { return row.find(attr); }

    std::optional<int64_t> opt_int(const std::string& attr) {
        const std::string* v = raw(attr);
        if (!v) return std::nullopt;
        auto n = kv::to_int(*v);
        if (!n) {
            skip("bad " + attr);
            return std::nullopt;
        }
        return n;
    }

    std::optional<int64_t> req_int(const std::string& attr) {
        if (!raw(attr)) {
            skip("missing " + attr);
            return std::nullopt;
        }
        return opt_int(attr);
    }

    int int_or_zero(const std::string& attr) {
        auto n = opt_int(attr);
        return n ? static_cast<int>(*n) : 0;
    }

    std::optional<Timestamp> opt_time(const std::string& attr) {
        const std::string* v = raw(attr);
        if (!v) return std::nullopt;
        auto t = parse_timestamp(*v);
        if (!t) {
            skip("bad " + attr);
            return std::nullopt;
        }
        return t;
    }

    std::optional<Timestamp> req_time(const std::string& attr) {
        if (!raw(attr)) {
            skip("missing " + attr);
            return std::nullopt;
        }
        return opt_time(attr);
    }

    std::string str_or_empty(const std::string& attr) {
        const std::string* v = raw(attr);
        return v ? *v : std::string();
    }
};

std::optional<std::vector<std::string>> parse_tags(const std::string& raw) {
    std::vector<std::string> tags;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '<') return std::nullopt;
        std::size_t close = raw.find('>', i + 1);
        if (close == std::string::npos || close == i + 1) return std::nullopt;
        std::string tag = raw.substr(i + 1, close - i - 1);
        for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        tags.push_back(std::move(tag));
        i = close + 1;
    }
    if (tags.size() > 5) return std::nullopt;
    return tags;
}

struct AnswerTemp {
    int64_t id = 0;
    std::optional<int64_t> owner;
    Timestamp time = 0;
    int score = 0;
    int favorite_count = 0;
};

enum class EventKind : uint8_t { close, reopen, lock, unlock, community_wiki, protect_, unprotect };

struct HistoryEvent {
    Timestamp time = 0;
    EventKind kind = EventKind::close;
    std::optional<int64_t> reason_id;
    bool reason_unparseable = false;
    std::optional<int> vote_count_attr;
};

void scan_file(const fs::path& dir, const std::string& name, FileIngest& fi,
               const std::function<void(const xmlrow::Row&)>& on_row) {
    fs::path path = dir / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_usage("missing required dump file: " + path.string());
    xmlrow::ScanStats stats = xmlrow::scan_rows(in, on_row);
    fi.file = name;
    fi.rows = stats.rows;
    fi.malformed = stats.malformed;
}

}  // namespace

ParseResult parse_dump(const std::string& directory, const DumpMappingConfig& m) {
    fs::path dir(directory);
    if (!fs::is_directory(dir)) fail_runtime("dump directory not found: " + directory);

    ParseResult result;
    Dataset& ds = result.dataset;
    IngestReport& rep = result.report;
    rep.files.resize(6);
    FileIngest& fi_posts = rep.files[0];
    FileIngest& fi_users = rep.files[1];
    FileIngest& fi_badges = rep.files[2];
    FileIngest& fi_comments = rep.files[3];
    FileIngest& fi_history = rep.files[4];
    FileIngest& fi_votes = rep.files[5];

    std::unordered_set<int64_t> post_ids;
    std::unordered_map<int64_t, std::size_t> question_index;
    std::vector<AnswerTemp> answers;
    std::unordered_map<int64_t, std::size_t> answer_index;

    scan_file(dir, m.posts_file, fi_posts, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_posts};
        auto id = r.req_int(m.posts.id);
        auto type = r.req_int(m.posts.post_type);
        auto created = r.req_time(m.posts.creation);
        if (!r.ok) return;
        if (post_ids.count(*id)) {
            r.skip("duplicate " + m.posts.id);
            return;
        }
        if (*type == m.post_type_question) {
            QuestionRecord q;
            q.id = *id;
            q.creation_time = *created;
            q.owner = r.opt_int(m.posts.owner);
            q.score = r.int_or_zero(m.posts.score);
            q.view_count = r.int_or_zero(m.posts.view_count);
            q.answer_count = r.int_or_zero(m.posts.answer_count);
            q.comment_count = r.int_or_zero(m.posts.comment_count);
            q.favorite_count = r.int_or_zero(m.posts.favorite_count);
            q.accepted_answer_id = r.opt_int(m.posts.accepted_answer);
            q.title = r.str_or_empty(m.posts.title);
            q.body = r.str_or_empty(m.posts.body);
            if (!r.ok) return;
            if (const std::string* raw_tags = r.raw(m.posts.tags)) {
                auto tags = parse_tags(*raw_tags);
                if (!tags) {
                    r.skip("bad " + m.posts.tags);
                    return;
                }
                q.tags = std::move(*tags);
            }
            if (r.raw(m.posts.closed_date)) {
                auto closed = r.opt_time(m.posts.closed_date);
                if (!r.ok) return;
                // Placeholder; refined against history events below.
                CloseEvent ev;
                ev.time = *closed;
                q.close_event = ev;
            }
            question_index[q.id] = ds.questions.size();
            post_ids.insert(q.id);
            ds.questions.push_back(std::move(q));
            ++rep.questions;
        } else if (*type == m.post_type_answer) {
            AnswerTemp a;
            a.id = *id;
            a.time = *created;
            a.owner = r.opt_int(m.posts.owner);
            a.score = r.int_or_zero(m.posts.score);
            a.favorite_count = r.int_or_zero(m.posts.favorite_count);
            if (!r.ok) return;
            answer_index[a.id] = answers.size();
            post_ids.insert(a.id);
            answers.push_back(a);
            ++rep.answers;
        } else {
            ++rep.other_posts;
        }
    });

    std::unordered_map<int64_t, std::size_t> user_index;
    scan_file(dir, m.users_file, fi_users, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_users};
        auto id = r.req_int(m.users.id);
        auto created = r.req_time(m.users.creation);
        if (!r.ok) return;
        if (user_index.count(*id)) {
            r.skip("duplicate " + m.users.id);
            return;
        }
        UserRecord u;
        u.id = *id;
        u.creation_time = *created;
        user_index[u.id] = ds.users.size();
        ds.users.push_back(std::move(u));
        ++rep.users;
    });

    // Attach posts to their owners; track where each answer landed so the
    // accepted flag can be set once questions are resolved.
    struct AnswerSlot {
        std::size_t user = 0;
        std::size_t index = 0;
        bool quarantined = false;
    };
    std::unordered_map<int64_t, AnswerSlot> answer_slots;

    auto attach_post = [&](const UserPost& p, std::optional<int64_t> owner) -> std::optional<AnswerSlot> {
        if (!owner) return std::nullopt;
        auto it = user_index.find(*owner);
        if (it == user_index.end()) {
            ++rep.orphan_activity_rows;
            return std::nullopt;
        }
        UserRecord& u = ds.users[it->second];
        AnswerSlot slot;
        slot.user = it->second;
        if (p.time < u.creation_time) {
            slot.quarantined = true;
            slot.index = u.quarantined_posts.size();
            u.quarantined_posts.push_back(p);
            ++rep.quarantined_rows;
        } else {
            slot.index = u.posts.size();
            u.posts.push_back(p);
        }
        return slot;
    };

    for (const auto& q : ds.questions) {
        UserPost p{q.id, PostKind::question, q.creation_time, q.score, q.favorite_count, false};
        attach_post(p, q.owner);
        if (!q.owner || !user_index.count(*q.owner)) ++rep.missing_owner_questions;
    }
    for (const auto& a : answers) {
        UserPost p{a.id, PostKind::answer, a.time, a.score, a.favorite_count, false};
        if (auto slot = attach_post(p, a.owner)) answer_slots[a.id] = *slot;
    }
    for (const auto& q : ds.questions) {
        if (!q.accepted_answer_id) continue;
        auto it = answer_slots.find(*q.accepted_answer_id);
        if (it == answer_slots.end()) continue;
        UserRecord& u = ds.users[it->second.user];
        auto& list = it->second.quarantined ? u.quarantined_posts : u.posts;
        list[it->second.index].was_accepted = true;
    }

    scan_file(dir, m.badges_file, fi_badges, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_badges};
        auto user = r.req_int(m.badges.user);
        auto date = r.req_time(m.badges.date);
        const std::string* name = row.find(m.badges.name);
        if (r.ok && (!name || name->empty())) r.skip("missing " + m.badges.name);
        if (!r.ok) return;
        auto it = user_index.find(*user);
        if (it == user_index.end()) {
            ++rep.orphan_activity_rows;
            r.skip("unknown " + m.badges.user);
            return;
        }
        UserRecord& u = ds.users[it->second];
        UserBadge b{*name, *date};
        if (b.time < u.creation_time) {
            u.quarantined_badges.push_back(std::move(b));
            ++rep.quarantined_rows;
        } else {
            u.badges.push_back(std::move(b));
        }
        ++rep.badges;
    });

    scan_file(dir, m.comments_file, fi_comments, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_comments};
        auto post = r.req_int(m.comments.post);
        auto user = r.req_int(m.comments.user);
        auto created = r.req_time(m.comments.creation);
        int score = r.int_or_zero(m.comments.score);
        if (!r.ok) return;
        (void)post;
        auto it = user_index.find(*user);
        if (it == user_index.end()) {
            ++rep.orphan_activity_rows;
            r.skip("unknown " + m.comments.user);
            return;
        }
        UserRecord& u = ds.users[it->second];
        UserComment c{*created, score};
        if (c.time < u.creation_time) {
            u.quarantined_comments.push_back(c);
            ++rep.quarantined_rows;
        } else {
            u.comments.push_back(c);
        }
        ++rep.comments;
    });

    std::unordered_map<int64_t, std::vector<HistoryEvent>> events;
    scan_file(dir, m.post_history_file, fi_history, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_history};
        auto post = r.req_int(m.history.post);
        auto type = r.req_int(m.history.type);
        auto created = r.req_time(m.history.creation);
        if (!r.ok) return;
        EventKind kind;
        int t = static_cast<int>(*type);
        if (t == m.history_close) kind = EventKind::close;
        else if (t == m.history_reopen) kind = EventKind::reopen;
        else if (t == m.history_lock) kind = EventKind::lock;
        else if (t == m.history_unlock) kind = EventKind::unlock;
        else if (t == m.history_community_wiki) kind = EventKind::community_wiki;
        else if (t == m.history_protect) kind = EventKind::protect_;
        else if (t == m.history_unprotect) kind = EventKind::unprotect;
        else return;  // history kinds outside our model
        if (!question_index.count(*post)) {
            if (!post_ids.count(*post)) r.skip("unknown " + m.history.post);
            return;  // status changes on answers are out of scope
        }
        HistoryEvent ev;
        ev.time = *created;
        ev.kind = kind;
        if (kind == EventKind::close) {
            if (const std::string* reason = row.find(m.history.comment)) {
                auto id = kv::to_int(*reason);
                if (id) {
                    ev.reason_id = *id;
                } else {
                    ev.reason_unparseable = true;
                    ++rep.unparseable_close_reasons;
                }
            } else {
                ev.reason_unparseable = true;
                ++rep.unparseable_close_reasons;
            }
            if (ev.reason_id && !m.close_reasons.count(*ev.reason_id))
                ++rep.unknown_close_reasons[*ev.reason_id];
            if (const std::string* vc = row.find(m.history.vote_count)) {
                auto n = kv::to_int(*vc);
                if (n) ev.vote_count_attr = static_cast<int>(*n);
            }
        }
        events[*post].push_back(ev);
        ++rep.history_events;
    });

    scan_file(dir, m.votes_file, fi_votes, [&](const xmlrow::Row& row) {
        RowReader r{row, fi_votes};
        auto post = r.req_int(m.votes.post);
        auto type = r.req_int(m.votes.type);
        auto created = r.req_time(m.votes.creation);
        if (!r.ok) return;
        int t = static_cast<int>(*type);
        VoteKind kind;
        if (t == m.vote_accepted) kind = VoteKind::accepted;
        else if (t == m.vote_up) kind = VoteKind::up;
        else if (t == m.vote_down) kind = VoteKind::down;
        else if (t == m.vote_favorite) kind = VoteKind::favorite;
        else if (t == m.vote_close) kind = VoteKind::close;
        else return;
        if (!post_ids.count(*post)) {
            r.skip("unknown " + m.votes.post);
            return;
        }
        ds.post_votes.push_back({*post, kind, *created});
        ++rep.votes_kept;
    });

    // Resolve closure and status per question from its event timeline.
    std::sort(ds.post_votes.begin(), ds.post_votes.end(),
              [](const PostVote& a, const PostVote& b) {
                  return std::tuple(a.post_id, a.time, a.kind) <
                         std::tuple(b.post_id, b.time, b.kind);
              });
    auto count_close_votes = [&](int64_t qid, Timestamp after, Timestamp upto) {
        auto [lo, hi] = ds.votes_for_post(qid);
        int n = 0;
        for (const PostVote* v = lo; v != hi; ++v)
            if (v->kind == VoteKind::close && v->time > after && v->time <= upto) ++n;
        return n;
    };
    for (auto& q : ds.questions) {
        auto ev_it = events.find(q.id);
        std::vector<HistoryEvent>* evs = ev_it == events.end() ? nullptr : &ev_it->second;

        const HistoryEvent* last_close = nullptr;
        const HistoryEvent* last_reopen = nullptr;
        if (evs) {
            // Same-instant pairs resolve with the "applied" state winning.
            auto rank = [](EventKind k) {
                switch (k) {
                    case EventKind::reopen:
                    case EventKind::unlock:
                    case EventKind::unprotect: return 0;
                    default: return 1;
                }
            };
            std::stable_sort(evs->begin(), evs->end(),
                             [&](const HistoryEvent& a, const HistoryEvent& b) {
                                 return std::tuple(a.time, rank(a.kind)) <
                                        std::tuple(b.time, rank(b.kind));
                             });
            bool locked = false, protected_ = false, wiki = false;
            for (const auto& ev : *evs) {
                switch (ev.kind) {
                    case EventKind::close: last_close = &ev; break;
                    case EventKind::reopen: last_reopen = &ev; break;
                    case EventKind::lock: locked = true; break;
                    case EventKind::unlock: locked = false; break;
                    case EventKind::protect_: protected_ = true; break;
                    case EventKind::unprotect: protected_ = false; break;
                    case EventKind::community_wiki: wiki = true; break;
                }
            }
            q.status_flags = 0;
            if (locked) q.status_flags |= kStatusLocked;
            if (protected_) q.status_flags |= kStatusProtected;
            if (wiki) q.status_flags |= kStatusCommunityWiki;
        }

        if (!last_close && !last_reopen) {
            // No closure history; a ClosedDate placeholder (if any) stands,
            // refined with whatever close votes are on record.
            if (q.close_event) {
                CloseEvent& ev = *q.close_event;
                int votes = count_close_votes(q.id, INT64_MIN, ev.time);
                ev.vote_count = votes > 0 ? std::min(votes, 5) : 0;
                ev.moderator_closed = (ev.vote_count == 1);
            }
            continue;
        }

        bool closed = last_close && (!last_reopen || last_reopen->time <= last_close->time);
        if (!closed) {
            q.close_event.reset();
            continue;
        }
        CloseEvent ev;
        ev.time = last_close->time;
        ev.category = CloseCategory::Unknown;
        if (last_close->reason_id) {
            auto it = m.close_reasons.find(*last_close->reason_id);
            if (it != m.close_reasons.end()) ev.category = it->second;
        }
        Timestamp window_start = last_reopen ? last_reopen->time : INT64_MIN;
        int close_votes = count_close_votes(q.id, window_start, ev.time);
        if (close_votes > 0) {
            ev.vote_count = std::min(close_votes, 5);
        } else if (last_close->vote_count_attr && *last_close->vote_count_attr >= 1) {
            ev.vote_count = std::min(*last_close->vote_count_attr, 5);
        } else {
            ev.vote_count = 0;
        }
        ev.moderator_closed = (ev.vote_count == 1);
        q.close_event = ev;
    }

    for (auto& q : ds.questions) {
        if (q.close_event && q.close_event->time < q.creation_time) q.close_event.reset();
        if (!q.close_event) continue;
        ++rep.closed_questions;
        if (q.close_event->category == CloseCategory::Unknown) ++rep.unknown_category_closed;
        if (!q.close_event->has_vote_count()) ++rep.vote_count_unavailable;
    }

    ds.finalize();
    return result;
}

}  // namespace cqa
