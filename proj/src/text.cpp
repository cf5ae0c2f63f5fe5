#include "cqa/text.hpp"

#include <algorithm>
#include <cctype>

#include "cqa/xml_rows.hpp"

namespace cqa::text {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// True when html[i..] starts an opening <name ...> tag (case-insensitive).
bool starts_element(std::string_view html, std::size_t i, std::string_view name) {
    if (i + 1 + name.size() > html.size()) return false;
    if (html[i] != '<') return false;
    for (std::size_t k = 0; k < name.size(); ++k)
        if (lower(html[i + 1 + k]) != name[k]) return false;
    std::size_t after = i + 1 + name.size();
    if (after >= html.size()) return false;
    char c = html[after];
    return c == '>' || c == '/' || is_space(c);
}

// Index just past the matching </name>, or npos.
std::size_t find_close(std::string_view html, std::size_t from, std::string_view name) {
    for (std::size_t i = from; i + 2 + name.size() < html.size() + 1; ++i) {
        if (html[i] != '<' || i + 1 >= html.size() || html[i + 1] != '/') continue;
        std::size_t k = 0;
        while (k < name.size() && i + 2 + k < html.size() && lower(html[i + 2 + k]) == name[k]) ++k;
        if (k != name.size()) continue;
        std::size_t close = html.find('>', i + 2 + k);
        if (close == std::string_view::npos) return std::string_view::npos;
        return close + 1;
    }
    return std::string_view::npos;
}

std::string strip_tags(std::string_view html, bool& fallback) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            out.push_back(html[i++]);
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            std::size_t end = html.find("-->", i + 4);
            if (end == std::string_view::npos) {
                fallback = true;
                break;
            }
            i = end + 3;
            continue;
        }
        std::size_t end = html.find('>', i + 1);
        if (end == std::string_view::npos) {
            // Dangling '<': keep it as literal text.
            fallback = true;
            out.push_back(html[i++]);
            continue;
        }
        i = end + 1;
    }
    return out;
}

}  // namespace

std::int64_t codepoint_count(std::string_view utf8) {
    std::int64_t n = 0;
    for (unsigned char c : utf8)
        if ((c & 0xc0) != 0x80) ++n;
    return n;
}

BodyAnalysis analyze_body(std::string_view html) {
    BodyAnalysis out;
    std::string prose;
    prose.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            std::size_t next = html.find('<', i);
            if (next == std::string_view::npos) next = html.size();
            prose.append(html.substr(i, next - i));
            i = next;
            continue;
        }
        bool handled = false;
        for (std::string_view name : {std::string_view("code"), std::string_view("pre")}) {
            if (!starts_element(html, i, name)) continue;
            std::size_t open_end = html.find('>', i + 1);
            if (open_end == std::string_view::npos) {
                out.fallback_used = true;
                prose.push_back('<');
                ++i;
                handled = true;
                break;
            }
            if (open_end > i && html[open_end - 1] == '/') {
                i = open_end + 1;  // empty element
                handled = true;
                break;
            }
            std::size_t close = find_close(html, open_end + 1, name);
            std::size_t content_end;
            if (close == std::string_view::npos) {
                // Unclosed block: treat the rest of the body as code.
                out.fallback_used = true;
                content_end = html.size();
                close = html.size();
            } else {
                content_end = html.rfind("</", close);
            }
            std::string_view content = html.substr(open_end + 1, content_end - open_end - 1);
            bool inner_fallback = false;
            std::string code_text = xmlrow::decode_entities(strip_tags(content, inner_fallback));
            if (inner_fallback) out.fallback_used = true;
            out.code_snippet_length += codepoint_count(code_text);
            i = close;
            handled = true;
            break;
        }
        if (handled) continue;
        if (html.compare(i, 4, "<!--") == 0) {
            std::size_t end = html.find("-->", i + 4);
            if (end == std::string_view::npos) {
                out.fallback_used = true;
                i = html.size();
                continue;
            }
            i = end + 3;
            continue;
        }
        std::size_t end = html.find('>', i + 1);
        if (end == std::string_view::npos) {
            out.fallback_used = true;
            prose.push_back('<');
            ++i;
            continue;
        }
        i = end + 1;
    }
    out.text = xmlrow::decode_entities(prose);
    return out;
}

StyleCounts style_counts(std::string_view title, std::string_view body_html) {
    StyleCounts s;
    BodyAnalysis body = analyze_body(body_html);
    s.fallback_used = body.fallback_used;
    s.code_snippet_length = body.code_snippet_length;
    s.title_length = codepoint_count(title);
    s.body_length = codepoint_count(body.text);

    static constexpr std::string_view kPunctuation = ".,;:!?'\"()-";
    std::size_t i = 0;
    const std::string& t = body.text;
    while (i < t.size()) {
        unsigned char c = static_cast<unsigned char>(t[i]);
        if (c < 0x80) {
            if (std::islower(c)) ++s.num_lowercase;
            else if (std::isupper(c)) ++s.num_uppercase;
            else if (kPunctuation.find(static_cast<char>(c)) != std::string_view::npos) ++s.num_punctuation;
            else if (!std::isspace(c) && !std::isdigit(c)) ++s.num_special_chars;
            ++i;
        } else {
            // Non-ASCII codepoint: counted as one special character.
            ++s.num_special_chars;
            ++i;
            while (i < t.size() && (static_cast<unsigned char>(t[i]) & 0xc0) == 0x80) ++i;
        }
    }

    std::size_t pos = 0;
    while (pos < t.size()) {
        while (pos < t.size() && is_space(t[pos])) ++pos;
        std::size_t start = pos;
        while (pos < t.size() && !is_space(t[pos])) ++pos;
        if (pos == start) break;
        std::string_view token = std::string_view(t).substr(start, pos - start);
        bool alpha = !token.empty() &&
                     std::all_of(token.begin(), token.end(), [](char c) {
                         return std::isalpha(static_cast<unsigned char>(c));
                     });
        if (alpha && token.size() <= 3) ++s.num_short_words;
    }
    return s;
}

UrlCounts count_urls(std::string_view body_html, const std::vector<std::string>& site_hosts) {
    UrlCounts out;
    std::string decoded = xmlrow::decode_entities(body_html);
    std::string low(decoded);
    for (char& c : low) c = lower(c);

    static constexpr std::string_view kHostEnd = "/?#\"'<> \t\r\n";
    std::size_t i = 0;
    while (i < low.size()) {
        std::size_t hit = low.find("http", i);
        if (hit == std::string::npos) break;
        std::size_t after = hit + 4;
        if (low.compare(after, 3, "://") == 0) {
            after += 3;
        } else if (low.compare(after, 4, "s://") == 0) {
            after += 4;
        } else {
            i = hit + 1;
            continue;
        }
        ++out.num_urls;
        std::size_t host_end = low.find_first_of(kHostEnd, after);
        if (host_end == std::string::npos) host_end = low.size();
        std::string host = low.substr(after, host_end - after);
        if (host.rfind("www.", 0) == 0) host.erase(0, 4);
        std::size_t colon = host.find(':');
        if (colon != std::string::npos) host.erase(colon);
        for (const auto& site : site_hosts) {
            if (host == site) {
                ++out.num_site_urls;
                break;
            }
        }
        i = host_end;
    }
    return out;
}

}  // namespace cqa::text
