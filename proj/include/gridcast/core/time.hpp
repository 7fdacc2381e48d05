#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "gridcast/core/error.hpp"

namespace gridcast {

/// Hour-aligned instant in a single fixed UTC offset, counted as whole hours
/// since 1970-01-01T00:00. There are no DST transitions, so consecutive hours
/// always differ by exactly one.
struct Timestamp {
    std::int64_t hours = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp operator+(std::int64_t h) const { return {hours + h}; }
    constexpr Timestamp operator-(std::int64_t h) const { return {hours - h}; }
    constexpr std::int64_t operator-(Timestamp other) const { return hours - other.hours; }
};

struct CivilHour {
    int year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
    int hour;        // 0..23
    unsigned weekday;  // 0 = Sunday
};

inline std::chrono::sys_days to_sys_days(Timestamp t) {
    std::int64_t days = t.hours >= 0 ? t.hours / 24 : -((-t.hours + 23) / 24);
    return std::chrono::sys_days{std::chrono::days{days}};
}

inline int hour_of_day(Timestamp t) {
    std::int64_t r = t.hours % 24;
    return static_cast<int>(r < 0 ? r + 24 : r);
}

inline CivilHour civil(Timestamp t) {
    using namespace std::chrono;
    auto d = to_sys_days(t);
    year_month_day ymd{d};
    weekday wd{d};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day()), hour_of_day(t), wd.c_encoding()};
}

inline Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok() || hour < 0 || hour > 23) {
        throw DataError("invalid calendar date");
    }
    return {static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * 24 + hour};
}

/// Parses `YYYY-MM-DDTHH:00:00`. Minutes and seconds must be zero.
inline Timestamp parse_timestamp(std::string_view s) {
    auto digits = [&](std::size_t pos, std::size_t n, int& out) {
        if (pos + n > s.size()) return false;
        int v = 0;
        for (std::size_t i = pos; i < pos + n; ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
            v = v * 10 + (s[i] - '0');
        }
        out = v;
        return true;
    };
    int y, mo, d, h, mi, se;
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || !digits(0, 4, y) || !digits(5, 2, mo) || !digits(8, 2, d) ||
        !digits(11, 2, h) || !digits(14, 2, mi) || !digits(17, 2, se)) {
        throw DataError("malformed timestamp '" + std::string(s) + "'");
    }
    if (mi != 0 || se != 0) {
        throw DataError("timestamp not hour aligned '" + std::string(s) + "'");
    }
    try {
        return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h);
    } catch (const DataError&) {
        throw DataError("malformed timestamp '" + std::string(s) + "'");
    }
}

inline std::string format_timestamp(Timestamp t) {
    CivilHour c = civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", c.year, c.month, c.day, c.hour);
    return buf;
}

}  // namespace gridcast
