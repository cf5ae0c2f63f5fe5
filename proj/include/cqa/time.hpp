#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cqa {

// All timestamps in the toolkit are UTC seconds since the Unix epoch.
// Dump date strings carry millisecond precision; those are truncated.
using Timestamp = std::int64_t;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerHour = 3600.0;

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
};

// Proleptic Gregorian <-> days since 1970-01-01.
std::int64_t days_from_civil(int year, int month, int day);
CivilDate civil_from_days(std::int64_t days);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" and the same with a
// fractional-seconds suffix. Returns nullopt on anything malformed.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SS"
std::string format_timestamp(Timestamp t);

// Calendar month index (year*12 + month-1), used for time-series bucketing.
int month_index(Timestamp t);
int year_of(Timestamp t);

// "YYYY-MM" for a month index, "YYYY" for a year.
std::string format_month(int month_idx);

}  // namespace cqa
