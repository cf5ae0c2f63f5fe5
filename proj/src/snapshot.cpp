#include "cqa/snapshot.hpp"

#include <cstring>
#include <fstream>

#include "cqa/common.hpp"

namespace cqa {

namespace {

constexpr char kMagic[8] = {'C', 'Q', 'A', 'S', 'N', 'A', 'P', '1'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 8;

struct Writer {
    std::string buf;

    void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void str(const std::string& s) {
        u64(s.size());
        buf.append(s);
    }
    void opt_i64(const std::optional<int64_t>& v) {
        u8(v ? 1 : 0);
        if (v) i64(*v);
    }
};

struct Reader {
    std::string_view buf;
    std::size_t pos = 0;
    const std::string& source;

    void need(std::size_t n) {
        if (pos + n > buf.size()) fail_runtime("truncated snapshot: " + source);
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    std::string str() {
        uint64_t n = u64();
        need(n);
        std::string s(buf.substr(pos, n));
        pos += n;
        return s;
    }
    std::optional<int64_t> opt_i64() {
        if (u8() == 0) return std::nullopt;
        return i64();
    }
};

void write_post(Writer& w, const UserPost& p) {
    w.i64(p.post_id);
    w.u8(p.kind == PostKind::question ? 0 : 1);
    w.i64(p.time);
    w.i64(p.score);
    w.i64(p.favorite_count);
    w.u8(p.was_accepted ? 1 : 0);
}

UserPost read_post(Reader& r) {
    UserPost p;
    p.post_id = r.i64();
    p.kind = r.u8() == 0 ? PostKind::question : PostKind::answer;
    p.time = r.i64();
    p.score = static_cast<int>(r.i64());
    p.favorite_count = static_cast<int>(r.i64());
    p.was_accepted = r.u8() != 0;
    return p;
}

std::string encode_payload(const Dataset& ds) {
    Writer w;
    w.buf.reserve(1 << 16);

    w.u64(ds.users.size());
    for (const auto& u : ds.users) {
        w.i64(u.id);
        w.i64(u.creation_time);
        auto posts = [&](const std::vector<UserPost>& v) {
            w.u64(v.size());
            for (const auto& p : v) write_post(w, p);
        };
        auto comments = [&](const std::vector<UserComment>& v) {
            w.u64(v.size());
            for (const auto& c : v) {
                w.i64(c.time);
                w.i64(c.score);
            }
        };
        auto badges = [&](const std::vector<UserBadge>& v) {
            w.u64(v.size());
            for (const auto& b : v) {
                w.str(b.name);
                w.i64(b.time);
            }
        };
        posts(u.posts);
        comments(u.comments);
        badges(u.badges);
        posts(u.quarantined_posts);
        comments(u.quarantined_comments);
        badges(u.quarantined_badges);
    }

    w.u64(ds.questions.size());
    for (const auto& q : ds.questions) {
        w.i64(q.id);
        w.i64(q.creation_time);
        w.opt_i64(q.owner);
        w.str(q.title);
        w.str(q.body);
        w.u64(q.tags.size());
        for (const auto& t : q.tags) w.str(t);
        w.i64(q.score);
        w.i64(q.view_count);
        w.i64(q.answer_count);
        w.opt_i64(q.accepted_answer_id);
        w.i64(q.favorite_count);
        w.i64(q.comment_count);
        w.u8(q.close_event ? 1 : 0);
        if (q.close_event) {
            w.i64(q.close_event->time);
            w.u8(static_cast<uint8_t>(q.close_event->category));
            w.u8(static_cast<uint8_t>(q.close_event->vote_count));
            w.u8(q.close_event->moderator_closed ? 1 : 0);
        }
        w.u8(q.status_flags);
    }

    w.u64(ds.post_votes.size());
    for (const auto& v : ds.post_votes) {
        w.i64(v.post_id);
        w.u8(static_cast<uint8_t>(v.kind));
        w.i64(v.time);
    }
    return std::move(w.buf);
}

Dataset decode_payload(Reader& r) {
    Dataset ds;
    uint64_t nu = r.u64();
    ds.users.reserve(nu);
    for (uint64_t i = 0; i < nu; ++i) {
        UserRecord u;
        u.id = r.i64();
        u.creation_time = r.i64();
        auto posts = [&](std::vector<UserPost>& v) {
            uint64_t n = r.u64();
            v.reserve(n);
            for (uint64_t k = 0; k < n; ++k) v.push_back(read_post(r));
        };
        auto comments = [&](std::vector<UserComment>& v) {
            uint64_t n = r.u64();
            v.reserve(n);
            for (uint64_t k = 0; k < n; ++k) {
                UserComment c;
                c.time = r.i64();
                c.score = static_cast<int>(r.i64());
                v.push_back(c);
            }
        };
        auto badges = [&](std::vector<UserBadge>& v) {
            uint64_t n = r.u64();
            v.reserve(n);
            for (uint64_t k = 0; k < n; ++k) {
                UserBadge b;
                b.name = r.str();
                b.time = r.i64();
                v.push_back(std::move(b));
            }
        };
        posts(u.posts);
        comments(u.comments);
        badges(u.badges);
        posts(u.quarantined_posts);
        comments(u.quarantined_comments);
        badges(u.quarantined_badges);
        ds.users.push_back(std::move(u));
    }

    uint64_t nq = r.u64();
    ds.questions.reserve(nq);
    for (uint64_t i = 0; i < nq; ++i) {
        QuestionRecord q;
        q.id = r.i64();
        q.creation_time = r.i64();
        q.owner = r.opt_i64();
        q.title = r.str();
        q.body = r.str();
        uint64_t nt = r.u64();
        q.tags.reserve(nt);
        for (uint64_t k = 0; k < nt; ++k) q.tags.push_back(r.str());
        q.score = static_cast<int>(r.i64());
        q.view_count = static_cast<int>(r.i64());
        q.answer_count = static_cast<int>(r.i64());
        q.accepted_answer_id = r.opt_i64();
        q.favorite_count = static_cast<int>(r.i64());
        q.comment_count = static_cast<int>(r.i64());
        if (r.u8()) {
            CloseEvent ev;
            ev.time = r.i64();
            ev.category = static_cast<CloseCategory>(r.u8());
            ev.vote_count = r.u8();
            ev.moderator_closed = r.u8() != 0;
            q.close_event = ev;
        }
        q.status_flags = r.u8();
        ds.questions.push_back(std::move(q));
    }

    uint64_t nv = r.u64();
    ds.post_votes.reserve(nv);
    for (uint64_t i = 0; i < nv; ++i) {
        PostVote v;
        v.post_id = r.i64();
        v.kind = static_cast<VoteKind>(r.u8());
        v.time = r.i64();
        ds.post_votes.push_back(v);
    }
    return ds;
}

}  // namespace

std::string snapshot_encode(const Dataset& ds) {
    std::string payload = encode_payload(ds);
    uint64_t digest = fnv1a(payload);
    std::string out;
    out.reserve(kHeaderSize + payload.size());
    out.append(kMagic, sizeof(kMagic));
    Writer w;
    w.u32(kSnapshotVersion);
    w.u64(payload.size());
    w.u64(digest);
    out.append(w.buf);
    out.append(payload);
    return out;
}

std::pair<Dataset, SnapshotInfo> snapshot_decode(std::string_view bytes, const std::string& source) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        fail_runtime("bad snapshot magic: " + source);
    Reader hdr{bytes, sizeof(kMagic), source};
    uint32_t version = hdr.u32();
    if (version != kSnapshotVersion)
        fail_runtime("snapshot version " + std::to_string(version) + " not supported (tool supports version " +
                     std::to_string(kSnapshotVersion) + "): " + source);
    uint64_t payload_size = hdr.u64();
    uint64_t digest = hdr.u64();
    if (bytes.size() - kHeaderSize < payload_size)
        fail_runtime("truncated snapshot: " + source);
    std::string_view payload = bytes.substr(kHeaderSize, payload_size);
    if (fnv1a(payload) != digest)
        fail_runtime("snapshot digest mismatch: " + source);

    Reader r{payload, 0, source};
    Dataset ds = decode_payload(r);
    if (r.pos != payload.size())
        fail_runtime("snapshot has trailing bytes: " + source);
    ds.finalize();

    SnapshotInfo info;
    info.digest = digest;
    info.id = hex64(digest);
    return {std::move(ds), info};
}

SnapshotInfo snapshot_save(const Dataset& ds, const std::string& path) {
    std::string bytes = snapshot_encode(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_runtime("cannot write snapshot: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail_runtime("cannot write snapshot: " + path);

    SnapshotInfo info;
    info.digest = fnv1a(std::string_view(bytes).substr(kHeaderSize));
    info.id = hex64(info.digest);
    return info;
}

std::pair<Dataset, SnapshotInfo> snapshot_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_runtime("cannot open snapshot: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return snapshot_decode(bytes, path);
}

}  // namespace cqa
