#include "cqa/kvconfig.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cqa/common.hpp"

namespace cqa::kv {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

const Entry* Document::find(std::string_view key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::optional<std::string> Document::get(std::string_view key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
}

std::string Document::get_or(std::string_view key, std::string_view fallback) const {
    const Entry* e = find(key);
    return e ? e->value : std::string(fallback);
}

std::string Document::require(std::string_view key) const {
    const Entry* e = find(key);
    if (!e)
        fail_usage("config " + source + ": missing required key '" + std::string(key) + "'");
    return e->value;
}

void Document::check_known(const std::vector<std::string>& allowed) const {
    for (const auto& e : entries) {
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
            fail_usage("config " + source + " line " + std::to_string(e.line) +
                       ": unknown key '" + e.key + "'");
    }
}

Document parse(std::istream& in, std::string_view source_name) {
    Document doc;
    doc.source = std::string(source_name);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            fail_usage("config " + doc.source + " line " + std::to_string(lineno) +
                       ": expected 'key = value'");
        std::string key(trim(sv.substr(0, eq)));
        std::string value(trim(sv.substr(eq + 1)));
        if (key.empty())
            fail_usage("config " + doc.source + " line " + std::to_string(lineno) +
                       ": empty key");
        if (doc.find(key))
            fail_usage("config " + doc.source + " line " + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
        doc.entries.push_back({std::move(key), std::move(value), lineno});
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_usage("cannot open config file: " + path);
    return parse(in, path);
}

Document parse_string(std::string_view text, std::string_view source_name) {
    std::istringstream in{std::string(text)};
    return parse(in, source_name);
}

std::optional<int64_t> to_int(std::string_view v) {
    v = trim(v);
    if (v.empty()) return std::nullopt;
    int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    return out;
}

std::optional<double> to_real(std::string_view v) {
    v = trim(v);
    if (v.empty()) return std::nullopt;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    return out;
}

std::optional<bool> to_bool(std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    return std::nullopt;
}

int64_t require_int(const Document& doc, std::string_view key) {
    std::string raw = doc.require(key);
    auto n = to_int(raw);
    if (!n)
        fail_usage("config " + doc.source + ": key '" + std::string(key) +
                   "' is not an integer: '" + raw + "'");
    return *n;
}

double require_real(const Document& doc, std::string_view key) {
    std::string raw = doc.require(key);
    auto x = to_real(raw);
    if (!x)
        fail_usage("config " + doc.source + ": key '" + std::string(key) +
                   "' is not a number: '" + raw + "'");
    return *x;
}

}  // namespace cqa::kv
