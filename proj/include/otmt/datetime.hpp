#ifndef OTMT_DATETIME_HPP
#define OTMT_DATETIME_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace otmt {

// RFC 1123 as used in link-format TimeMaps: "Tue, 03 Jan 2012 01:43:26 GMT".
std::optional<std::int64_t> parse_rfc1123(std::string_view text);
std::string format_rfc1123(std::int64_t epoch_seconds);

// WARC-Date: "2012-01-03T01:43:26Z" (fractional seconds tolerated).
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t epoch_seconds);

// Wayback path segment: "20120103014326".
std::string format_wayback14(std::int64_t epoch_seconds);

}  // namespace otmt

#endif  // OTMT_DATETIME_HPP
