#include "cqa/xml_rows.hpp"

#include <cctype>
#include <cstdint>

namespace cqa::xmlrow {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7f) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7ff) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0xffff) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0x10ffff) {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == ':' || c == '.';
}

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (!name.empty() && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t k = 2; k < name.size() && ok; ++k) {
                    char c = name[k];
                    if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + (c - 'a' + 10);
                    else if (c >= 'A' && c <= 'F') cp = cp * 16 + (c - 'A' + 10);
                    else ok = false;
                }
            } else {
                for (std::size_t k = 1; k < name.size() && ok; ++k) {
                    char c = name[k];
                    if (c >= '0' && c <= '9') cp = cp * 10 + (c - '0');
                    else ok = false;
                }
            }
            if (ok && cp > 0 && cp <= 0x10ffff) {
                append_utf8(out, cp);
            } else {
                out.push_back(s[i]);
                ++i;
                continue;
            }
        } else {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

std::optional<Row> parse_attrs(std::string_view body) {
    Row row;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i])))
            ++i;
    };
    skip_ws();
    while (i < body.size()) {
        std::size_t name_start = i;
        while (i < body.size() && is_name_char(body[i])) ++i;
        if (i == name_start) return std::nullopt;
        std::string name(body.substr(name_start, i - name_start));
        skip_ws();
        if (i >= body.size() || body[i] != '=') return std::nullopt;
        ++i;
        skip_ws();
        if (i >= body.size() || (body[i] != '"' && body[i] != '\'')) return std::nullopt;
        char quote = body[i++];
        std::size_t val_start = i;
        while (i < body.size() && body[i] != quote) ++i;
        if (i >= body.size()) return std::nullopt;
        row.attrs.emplace_back(std::move(name),
                               decode_entities(body.substr(val_start, i - val_start)));
        ++i;
        skip_ws();
    }
    return row;
}

ScanStats scan_rows(std::istream& in, const std::function<void(const Row&)>& on_row) {
    ScanStats stats;
    std::string buf;
    constexpr std::size_t kChunk = 1 << 20;
    std::string chunk(kChunk, '\0');
    std::size_t scan_from = 0;
    bool eof = false;
    while (!eof) {
        in.read(chunk.data(), static_cast<std::streamsize>(kChunk));
        std::size_t got = static_cast<std::size_t>(in.gcount());
        if (got == 0) {
            eof = true;
        } else {
            buf.append(chunk.data(), got);
        }
        for (;;) {
            std::size_t open = buf.find("<row", scan_from);
            if (open == std::string::npos) {
                // Keep a tail so a "<row" split across chunks survives.
                if (buf.size() > 4) {
                    std::size_t keep = buf.size() - 4;
                    buf.erase(0, keep);
                }
                scan_from = 0;
                break;
            }
            // Must be followed by whitespace or the close of an empty row.
            if (open + 4 < buf.size() && is_name_char(buf[open + 4])) {
                scan_from = open + 4;
                continue;
            }
            std::size_t close = buf.find('>', open + 4);
            if (close == std::string::npos) {
                if (eof) {
                    ++stats.malformed;
                    buf.clear();
                    scan_from = 0;
                }
                if (!eof) {
                    buf.erase(0, open);
                    scan_from = 0;
                }
                break;
            }
            std::string_view body(buf.data() + open + 4, close - open - 4);
            bool self_closing = !body.empty() && body.back() == '/';
            if (self_closing) body.remove_suffix(1);
            ++stats.rows;
            auto row = self_closing ? parse_attrs(body) : std::nullopt;
            if (row) {
                on_row(*row);
            } else {
                ++stats.malformed;
            }
            buf.erase(0, close + 1);
            scan_from = 0;
        }
        if (eof) break;
    }
    return stats;
}

std::string escape_attr(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#xA;"; break;
            case '\r': out += "&#xD;"; break;
            case '\t': out += "&#x9;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace cqa::xmlrow
