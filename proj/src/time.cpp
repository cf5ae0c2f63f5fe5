#include "cqa/time.hpp"

#include <cstdio>

namespace cqa {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                     static_cast<int>(d)};
}

namespace {

bool read_digits(std::string_view s, std::size_t pos, int count, int& out) {
    if (pos + count > s.size()) return false;
    int v = 0;
    for (int i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

int days_in_month(int year, int month) {
    static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return lens[month - 1];
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    int year, month, day;
    if (!read_digits(s, 0, 4, year) || s.size() < 10 || s[4] != '-' ||
        !read_digits(s, 5, 2, month) || s[7] != '-' || !read_digits(s, 8, 2, day)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        return std::nullopt;
    }
    int hour = 0, minute = 0, second = 0;
    if (s.size() > 10) {
        if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
        if (!read_digits(s, 11, 2, hour) || s.size() < 19 || s[13] != ':' ||
            !read_digits(s, 14, 2, minute) || s[16] != ':' ||
            !read_digits(s, 17, 2, second)) {
            return std::nullopt;
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
        if (s.size() > 19) {
            // Fractional seconds: validated, then truncated.
            if (s[19] != '.') return std::nullopt;
            if (s.size() == 20) return std::nullopt;
            for (std::size_t i = 20; i < s.size(); ++i) {
                if (s[i] < '0' || s[i] > '9') return std::nullopt;
            }
        }
    }
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 +
           second;
}

std::string format_timestamp(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t sod = t % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    CivilDate d = civil_from_days(days);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld", d.year,
                  d.month, d.day, static_cast<long long>(sod / 3600),
                  static_cast<long long>((sod % 3600) / 60),
                  static_cast<long long>(sod % 60));
    return std::string(buf);
}

int month_index(Timestamp t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) days -= 1;
    CivilDate d = civil_from_days(days);
    return d.year * 12 + (d.month - 1);
}

int year_of(Timestamp t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) days -= 1;
    return civil_from_days(days).year;
}

std::string format_month(int month_idx) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", month_idx / 12, month_idx % 12 + 1);
    return std::string(buf);
}

}  // namespace cqa
