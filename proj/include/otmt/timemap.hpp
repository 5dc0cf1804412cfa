#ifndef OTMT_TIMEMAP_HPP
#define OTMT_TIMEMAP_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otmt/core.hpp"

namespace otmt {

// One <target>; attr=value; ... entry of an application/link-format document.
// Attribute order is preserved; unknown attributes pass through untouched.
struct LinkEntry {
    std::string target_uri;
    std::vector<std::pair<std::string, std::string>> params;

    const std::string* param(std::string_view name) const;
};

// Minimal RFC 3986 shape check: scheme ":" plus a non-empty remainder.
bool is_absolute_uri(std::string_view uri);

// Lexes a link-format document into entries. Commas inside quoted strings
// and inside <> do not split entries; newlines count as whitespace, so both
// single-line and line-per-entry TimeMaps parse.
std::vector<LinkEntry> parse_link_entries(std::string_view text);

// Builds a TimeMap from a link-format document. uri_t comes from the
// rel="self" entry, falling back to `fallback_uri_t` (normally the fetch
// URI). Entries whose rel tokens include "memento" become MementoRefs,
// sorted ascending by datetime. Entries with an unparseable datetime are
// skipped with a warning.
TimeMap parse_link_timemap(std::string_view text, std::string_view fallback_uri_t = {},
                           std::vector<std::string>* warnings = nullptr);

// Inverse of parse_link_timemap, close enough for round-tripping: original,
// self, then one memento entry per ref with rel tokens joined in set order.
std::string serialize_link_timemap(const TimeMap& tm);

// The comparison baseline: the entry hinted "first memento" when present,
// otherwise minimal datetime with ties broken by lexicographically
// smallest uri_m.
const MementoRef& first_memento(const TimeMap& tm);

}  // namespace otmt

#endif  // OTMT_TIMEMAP_HPP
