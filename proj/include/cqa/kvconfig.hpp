#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqa::kv {

// One `key = value` line from a config file.
struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Document {
    std::string source;  // path or label, used in error messages
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string_view fallback) const;
    std::string require(std::string_view key) const;

    // Usage error naming the first entry whose key is not in `allowed`.
    void check_known(const std::vector<std::string>& allowed) const;
};

// Parses `key = value` lines; blank lines and `#` comments are skipped.
// Duplicate keys and malformed lines are usage errors.
Document parse(std::istream& in, std::string_view source_name);
Document parse_file(const std::string& path);
Document parse_string(std::string_view text, std::string_view source_name);

std::optional<int64_t> to_int(std::string_view v);
std::optional<double> to_real(std::string_view v);
std::optional<bool> to_bool(std::string_view v);

int64_t require_int(const Document& doc, std::string_view key);
double require_real(const Document& doc, std::string_view key);

std::string_view trim(std::string_view s);

}  // namespace cqa::kv
