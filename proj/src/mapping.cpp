#include "cqa/mapping.hpp"

#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "cqa/common.hpp"
#include "cqa/kvconfig.hpp"

namespace cqa {

namespace {

struct Binding {
    std::string key;
    std::function<std::string()> get;
    std::function<bool(const std::string&)> set;  // false = bad value
};

std::vector<Binding> bindings(DumpMappingConfig& m) {
    std::vector<Binding> out;
    auto str = [&out](std::string key, std::string& field) {
        out.push_back({std::move(key), [&field] { return field; },
                       [&field](const std::string& v) {
                           if (v.empty()) return false;
                           field = v;
                           return true;
                       }});
    };
    auto num = [&out](std::string key, int& field) {
        out.push_back({std::move(key), [&field] { return std::to_string(field); },
                       [&field](const std::string& v) {
                           auto n = kv::to_int(v);
                           if (!n) return false;
                           field = static_cast<int>(*n);
                           return true;
                       }});
    };

    str("file.posts", m.posts_file);
    str("file.users", m.users_file);
    str("file.badges", m.badges_file);
    str("file.comments", m.comments_file);
    str("file.post_history", m.post_history_file);
    str("file.votes", m.votes_file);

    str("attr.posts.id", m.posts.id);
    str("attr.posts.post_type", m.posts.post_type);
    str("attr.posts.creation", m.posts.creation);
    str("attr.posts.score", m.posts.score);
    str("attr.posts.view_count", m.posts.view_count);
    str("attr.posts.body", m.posts.body);
    str("attr.posts.owner", m.posts.owner);
    str("attr.posts.title", m.posts.title);
    str("attr.posts.tags", m.posts.tags);
    str("attr.posts.answer_count", m.posts.answer_count);
    str("attr.posts.comment_count", m.posts.comment_count);
    str("attr.posts.favorite_count", m.posts.favorite_count);
    str("attr.posts.accepted_answer", m.posts.accepted_answer);
    str("attr.posts.closed_date", m.posts.closed_date);

    str("attr.users.id", m.users.id);
    str("attr.users.creation", m.users.creation);

    str("attr.badges.user", m.badges.user);
    str("attr.badges.name", m.badges.name);
    str("attr.badges.date", m.badges.date);

    str("attr.comments.post", m.comments.post);
    str("attr.comments.user", m.comments.user);
    str("attr.comments.score", m.comments.score);
    str("attr.comments.creation", m.comments.creation);

    str("attr.post_history.post", m.history.post);
    str("attr.post_history.type", m.history.type);
    str("attr.post_history.creation", m.history.creation);
    str("attr.post_history.comment", m.history.comment);
    str("attr.post_history.vote_count", m.history.vote_count);

    str("attr.votes.post", m.votes.post);
    str("attr.votes.type", m.votes.type);
    str("attr.votes.creation", m.votes.creation);

    num("post_type.question", m.post_type_question);
    num("post_type.answer", m.post_type_answer);

    num("history_type.close", m.history_close);
    num("history_type.reopen", m.history_reopen);
    num("history_type.lock", m.history_lock);
    num("history_type.unlock", m.history_unlock);
    num("history_type.community_wiki", m.history_community_wiki);
    num("history_type.protect", m.history_protect);
    num("history_type.unprotect", m.history_unprotect);

    num("vote_type.accepted", m.vote_accepted);
    num("vote_type.up", m.vote_up);
    num("vote_type.down", m.vote_down);
    num("vote_type.favorite", m.vote_favorite);
    num("vote_type.close", m.vote_close);

    return out;
}

constexpr std::string_view kReasonPrefix = "close_reason.";

}  // namespace

DumpMappingConfig load_mapping(const std::string& path) {
    DumpMappingConfig m;
    kv::Document doc = kv::parse_file(path);

    auto version = kv::require_int(doc, "version");
    if (version != m.version)
        fail_usage("mapping " + path + ": version " + std::to_string(version) +
                   " not supported (tool supports version " + std::to_string(m.version) + ")");

    auto binds = bindings(m);
    for (const auto& e : doc.entries) {
        if (e.key == "version") continue;
        if (e.key.rfind(kReasonPrefix, 0) == 0) {
            auto id = kv::to_int(e.key.substr(kReasonPrefix.size()));
            if (!id)
                fail_usage("mapping " + path + " line " + std::to_string(e.line) +
                           ": close_reason key needs an integer id, got '" + e.key + "'");
            auto cat = category_from_name(e.value);
            if (!cat || *cat == CloseCategory::Unknown)
                fail_usage("mapping " + path + " line " + std::to_string(e.line) +
                           ": unknown close category '" + e.value + "'");
            m.close_reasons[*id] = *cat;
            continue;
        }
        bool known = false;
        for (auto& b : binds) {
            if (b.key != e.key) continue;
            known = true;
            if (!b.set(e.value))
                fail_usage("mapping " + path + " line " + std::to_string(e.line) +
                           ": bad value '" + e.value + "' for key '" + e.key + "'");
            break;
        }
        if (!known)
            fail_usage("mapping " + path + " line " + std::to_string(e.line) +
                       ": unknown key '" + e.key + "'");
    }
    return m;
}

std::string default_mapping_text() {
    DumpMappingConfig m;
    std::ostringstream out;
    out << "# Dump mapping (2012-era Stack Exchange schema defaults)\n";
    out << "version = " << m.version << "\n";
    for (const auto& b : bindings(m)) out << b.key << " = " << b.get() << "\n";
    for (const auto& [id, cat] : m.close_reasons)
        out << kReasonPrefix << id << " = " << category_name(cat) << "\n";
    return out.str();
}

}  // namespace cqa
