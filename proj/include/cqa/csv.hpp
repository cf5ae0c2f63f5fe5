#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cqa::csv {

// Quotes a field when it contains a comma, quote, or newline (RFC 4180 style).
std::string escape_field(std::string_view field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

// Reads one record; quoted fields may contain commas, quotes, and newlines.
// Returns nullopt at end of input.
std::optional<std::vector<std::string>> read_record(std::istream& in);

std::vector<std::vector<std::string>> parse_all(std::istream& in);

// Shortest decimal form that round-trips the value.
std::string format_real(double x);

}  // namespace cqa::csv
