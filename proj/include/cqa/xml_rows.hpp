#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cqa::xmlrow {

// One self-closing <row .../> element: attribute name/value pairs in
// document order, values entity-decoded.
struct Row {
    std::vector<std::pair<std::string, std::string>> attrs;

    const std::string* find(std::string_view name) const {
        for (const auto& [k, v] : attrs) {
            if (k == name) return &v;
        }
        return nullptr;
    }
};

struct ScanStats {
    std::size_t rows = 0;
    std::size_t malformed = 0;
};

// Decodes &amp; &lt; &gt; &quot; &apos; and numeric character references
// (&#NNN; / &#xHH;, emitted as UTF-8). Unrecognized sequences pass through.
std::string decode_entities(std::string_view text);

// Streams the file, invoking on_row for every well-formed <row .../>.
// Anything between rows (prolog, container element, whitespace) is skipped;
// a row whose attribute list cannot be parsed counts as malformed.
ScanStats scan_rows(std::istream& in, const std::function<void(const Row&)>& on_row);

// Parses the attribute list of a single row element body (the text between
// "<row" and "/>"). Returns nullopt on malformed syntax.
std::optional<Row> parse_attrs(std::string_view body);

// Escapes a string for use inside a double-quoted XML attribute.
std::string escape_attr(std::string_view text);

}  // namespace cqa::xmlrow
