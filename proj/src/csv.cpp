#include "cqa/csv.hpp"

#include <charconv>
#include <cmath>

namespace cqa::csv {

std::string escape_field(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

std::optional<std::vector<std::string>> read_record(std::istream& in) {
    int first = in.peek();
    if (first == std::char_traits<char>::eof()) return std::nullopt;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (;;) {
        int ci = in.get();
        if (ci == std::char_traits<char>::eof()) {
            fields.push_back(std::move(cur));
            return fields;
        }
        char c = static_cast<char>(ci);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    cur.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
            continue;
        }
        if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(cur));
            return fields;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(std::move(cur));
            return fields;
        } else {
            cur.push_back(c);
        }
    }
}

std::vector<std::vector<std::string>> parse_all(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    while (auto rec = read_record(in)) records.push_back(std::move(*rec));
    return records;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace cqa::csv
