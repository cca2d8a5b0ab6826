#include "camxref/time.hpp"

#include "camxref/error.hpp"

#include <charconv>
#include <cstdio>

namespace camxref {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out)
{
    if (pos + len > s.size()) {
        return false;
    }
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{};
}

} // namespace

Timestamp make_utc(int year, unsigned month, unsigned day, int hour, int minute, int second)
{
    using namespace std::chrono;
    const sys_days d = year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                      std::chrono::day{day}};
    return d + hours{hour} + minutes{minute} + seconds{second};
}

std::optional<Timestamp> parse_rfc3339(std::string_view s)
{
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (s.size() < 20 || !read_int(s, 0, 4, y) || s[4] != '-' || !read_int(s, 5, 2, mo) ||
        s[7] != '-' || !read_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        !read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi) || s[16] != ':' ||
        !read_int(s, 17, 2, sec)) {
        return std::nullopt;
    }
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const std::size_t digits_start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            ++pos;
        }
        if (pos == digits_start) {
            return std::nullopt;
        }
    }
    if (pos >= s.size()) {
        return std::nullopt;
    }
    int offset_minutes = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (!read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_int(s, pos + 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || h > 23 || mi > 59 || sec > 60) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return make_utc(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec) -
           std::chrono::minutes{offset_minutes};
}

Timestamp parse_rfc3339_or_throw(std::string_view text, std::string_view what)
{
    auto ts = parse_rfc3339(text);
    if (!ts) {
        throw ValidationError(std::string(what) + ": invalid RFC 3339 timestamp '" +
                              std::string(text) + "'");
    }
    return *ts;
}

namespace {

struct Civil {
    int year;
    unsigned month, day;
    long hour, minute, second;
};

Civil split(Timestamp ts)
{
    using namespace std::chrono;
    const auto day_start = floor<days>(ts);
    const year_month_day ymd{day_start};
    const auto secs = (ts - day_start).count();
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day()), secs / 3600, (secs / 60) % 60, secs % 60};
}

} // namespace

std::string format_rfc3339(Timestamp ts)
{
    const Civil c = split(ts);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

std::string format_short(Timestamp ts)
{
    const Civil c = split(ts);
    char buf[40];
    if (c.second == 0) {
        std::snprintf(buf, sizeof buf, "%u/%u/%02d %ld:%02ld", c.month, c.day,
                      ((c.year % 100) + 100) % 100, c.hour, c.minute);
    } else {
        std::snprintf(buf, sizeof buf, "%u/%u/%02d %ld:%02ld:%02ld", c.month, c.day,
                      ((c.year % 100) + 100) % 100, c.hour, c.minute, c.second);
    }
    return buf;
}

} // namespace camxref
