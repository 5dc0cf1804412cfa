#include "otmt/datetime.hpp"

#include <array>
#include <cstdio>
#include <ctime>

namespace otmt {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

constexpr std::array<std::string_view, 7> kWeekdays = {
    "Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

int month_index(std::string_view name) {
    for (int i = 0; i < 12; ++i) {
        if (kMonths[static_cast<std::size_t>(i)] == name) return i;
    }
    return -1;
}

std::optional<std::int64_t> to_epoch(int year, int mon, int day, int hour, int min, int sec) {
    if (year < 1000 || mon < 0 || mon > 11 || day < 1 || day > 31) return std::nullopt;
    if (hour < 0 || hour > 23 || min < 0 || min > 59 || sec < 0 || sec > 60) return std::nullopt;
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = mon;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = min;
    tm.tm_sec = sec;
    time_t t = timegm(&tm);
    if (t == static_cast<time_t>(-1)) return std::nullopt;
    return static_cast<std::int64_t>(t);
}

std::tm to_utc_tm(std::int64_t epoch_seconds) {
    time_t t = static_cast<time_t>(epoch_seconds);
    std::tm out{};
    gmtime_r(&t, &out);
    return out;
}

}  // namespace

std::optional<std::int64_t> parse_rfc1123(std::string_view text) {
    char weekday[16] = {0};
    char month[16] = {0};
    char zone[16] = {0};
    int day = 0, year = 0, hour = 0, min = 0, sec = 0;
    std::string buf(text);
    int matched = std::sscanf(buf.c_str(), " %15[A-Za-z] , %d %15[A-Za-z] %d %d : %d : %d %15s",
                              weekday, &day, month, &year, &hour, &min, &sec, zone);
    if (matched != 8) return std::nullopt;
    std::string_view z{zone};
    if (z != "GMT" && z != "UTC") return std::nullopt;
    int mon = month_index(month);
    if (mon < 0) return std::nullopt;
    return to_epoch(year, mon, day, hour, min, sec);
}

std::string format_rfc1123(std::int64_t epoch_seconds) {
    std::tm tm = to_utc_tm(epoch_seconds);
    char out[48];
    std::snprintf(out, sizeof(out), "%s, %02d %s %04d %02d:%02d:%02d GMT",
                  std::string(kWeekdays[static_cast<std::size_t>(tm.tm_wday)]).c_str(), tm.tm_mday,
                  std::string(kMonths[static_cast<std::size_t>(tm.tm_mon)]).c_str(),
                  tm.tm_year + 1900, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return out;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    int year = 0, mon = 0, day = 0, hour = 0, min = 0, sec = 0;
    std::string buf(text);
    int matched = std::sscanf(buf.c_str(), " %d-%d-%dT%d:%d:%d", &year, &mon, &day, &hour, &min, &sec);
    if (matched != 6) return std::nullopt;
    return to_epoch(year, mon - 1, day, hour, min, sec);
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    std::tm tm = to_utc_tm(epoch_seconds);
    char out[32];
    std::snprintf(out, sizeof(out), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return out;
}

std::string format_wayback14(std::int64_t epoch_seconds) {
    std::tm tm = to_utc_tm(epoch_seconds);
    char out[20];
    std::snprintf(out, sizeof(out), "%04d%02d%02d%02d%02d%02d", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return out;
}

}  // namespace otmt
