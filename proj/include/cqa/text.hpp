#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cqa::text {

// Body HTML split into prose and code. `text` is the body with code/pre
// blocks removed, remaining tags stripped, and entities decoded.
struct BodyAnalysis {
    std::string text;
    int64_t code_snippet_length = 0;  // codepoints inside code/pre blocks
    bool fallback_used = false;       // lenient recovery on malformed markup
};

BodyAnalysis analyze_body(std::string_view html);

struct StyleCounts {
    int64_t title_length = 0;
    int64_t body_length = 0;
    int64_t num_punctuation = 0;
    int64_t num_short_words = 0;
    int64_t code_snippet_length = 0;
    int64_t num_special_chars = 0;
    int64_t num_lowercase = 0;
    int64_t num_uppercase = 0;
    bool fallback_used = false;
};

// Title counts use the raw title; body counts use the code-free body text.
StyleCounts style_counts(std::string_view title, std::string_view body_html);

struct UrlCounts {
    int num_urls = 0;
    int num_site_urls = 0;
};

// Counts http(s) occurrences anywhere in the body (href attributes and bare
// text alike); site URLs are those whose host is in `site_hosts`.
UrlCounts count_urls(std::string_view body_html, const std::vector<std::string>& site_hosts);

std::int64_t codepoint_count(std::string_view utf8);

}  // namespace cqa::text
