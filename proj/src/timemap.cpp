#include "otmt/timemap.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "otmt/datetime.hpp"

namespace otmt {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

void skip_ws(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && is_ws(text[pos])) ++pos;
}

std::string parse_quoted(std::string_view text, std::size_t& pos) {
    // pos sits on the opening quote
    std::string out;
    ++pos;
    while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
        out.push_back(text[pos]);
        ++pos;
    }
    if (pos < text.size()) ++pos;  // closing quote
    return out;
}

std::string parse_token(std::string_view text, std::size_t& pos) {
    std::string out;
    while (pos < text.size() && !is_ws(text[pos]) && text[pos] != ';' && text[pos] != ',' &&
           text[pos] != '=') {
        out.push_back(text[pos]);
        ++pos;
    }
    return out;
}

std::set<std::string> rel_tokens(const std::string& rel) {
    std::set<std::string> out;
    std::istringstream in(rel);
    std::string token;
    while (in >> token) out.insert(token);
    return out;
}

}  // namespace

const std::string* LinkEntry::param(std::string_view name) const {
    for (const auto& [key, value] : params) {
        if (key == name) return &value;
    }
    return nullptr;
}

bool is_absolute_uri(std::string_view uri) {
    if (uri.empty() || !std::isalpha(static_cast<unsigned char>(uri[0]))) return false;
    std::size_t colon = uri.find(':');
    if (colon == std::string_view::npos || colon + 1 >= uri.size()) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = uri[i];
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

std::vector<LinkEntry> parse_link_entries(std::string_view text) {
    std::vector<LinkEntry> entries;
    std::size_t pos = 0;
    while (true) {
        skip_ws(text, pos);
        if (pos >= text.size()) break;
        if (text[pos] != '<') {
            throw ParseError("link-format: expected '<' at offset " + std::to_string(pos));
        }
        ++pos;
        std::size_t close = text.find('>', pos);
        if (close == std::string_view::npos) {
            throw ParseError("link-format: unterminated <uri>");
        }
        LinkEntry entry;
        entry.target_uri = std::string(text.substr(pos, close - pos));
        pos = close + 1;

        // attribute list up to the next top-level comma
        while (true) {
            skip_ws(text, pos);
            if (pos >= text.size() || text[pos] == ',') {
                if (pos < text.size()) ++pos;
                break;
            }
            if (text[pos] != ';') {
                throw ParseError("link-format: expected ';' or ',' at offset " + std::to_string(pos));
            }
            ++pos;
            skip_ws(text, pos);
            std::string name = parse_token(text, pos);
            if (name.empty()) continue;  // tolerate trailing ';'
            std::string value;
            skip_ws(text, pos);
            if (pos < text.size() && text[pos] == '=') {
                ++pos;
                skip_ws(text, pos);
                if (pos < text.size() && text[pos] == '"') {
                    value = parse_quoted(text, pos);
                } else {
                    value = parse_token(text, pos);
                }
            }
            entry.params.emplace_back(std::move(name), std::move(value));
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

TimeMap parse_link_timemap(std::string_view text, std::string_view fallback_uri_t,
                           std::vector<std::string>* warnings) {
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };

    std::vector<LinkEntry> entries = parse_link_entries(text);

    TimeMap tm;
    tm.uri_t = std::string(fallback_uri_t);
    for (const auto& entry : entries) {
        const std::string* rel = entry.param("rel");
        if (!rel) {
            warn("entry without rel skipped: <" + entry.target_uri + ">");
            continue;
        }
        std::set<std::string> tokens = rel_tokens(*rel);
        if (tokens.contains("original")) tm.original_uri = entry.target_uri;
        if (tokens.contains("self")) tm.uri_t = entry.target_uri;
        if (!tokens.contains("memento")) continue;

        if (!is_absolute_uri(entry.target_uri)) {
            warn("memento with invalid URI skipped: <" + entry.target_uri + ">");
            continue;
        }
        const std::string* datetime = entry.param("datetime");
        if (!datetime) {
            warn("memento without datetime skipped: <" + entry.target_uri + ">");
            continue;
        }
        auto epoch = parse_rfc1123(*datetime);
        if (!epoch) {
            warn("memento with unparseable datetime skipped: <" + entry.target_uri + "> \"" +
                 *datetime + "\"");
            continue;
        }
        MementoRef ref;
        ref.uri_m = entry.target_uri;
        ref.memento_datetime = *epoch;
        ref.rel_hints = std::move(tokens);
        tm.mementos.push_back(std::move(ref));
    }

    if (tm.original_uri.empty()) {
        throw ParseError("link-format TimeMap lacks a rel=\"original\" entry");
    }
    if (tm.mementos.empty()) {
        throw EmptyInputError("TimeMap contains no memento entries: " + tm.uri_t);
    }
    std::stable_sort(tm.mementos.begin(), tm.mementos.end(),
                     [](const MementoRef& a, const MementoRef& b) {
                         return a.memento_datetime < b.memento_datetime;
                     });
    return tm;
}

std::string serialize_link_timemap(const TimeMap& tm) {
    std::ostringstream out;
    out << "<" << tm.original_uri << ">; rel=\"original\",\n";
    if (!tm.uri_t.empty()) {
        out << "<" << tm.uri_t << ">; rel=\"self\"; type=\"application/link-format\",\n";
    }
    for (std::size_t i = 0; i < tm.mementos.size(); ++i) {
        const MementoRef& ref = tm.mementos[i];
        std::string rel;
        if (ref.rel_hints.empty()) {
            rel = "memento";
        } else {
            for (const auto& token : ref.rel_hints) {
                if (!rel.empty()) rel += ' ';
                rel += token;
            }
        }
        out << "<" << ref.uri_m << ">; rel=\"" << rel << "\"; datetime=\""
            << format_rfc1123(ref.memento_datetime) << "\"";
        out << (i + 1 < tm.mementos.size() ? ",\n" : "\n");
    }
    return out.str();
}

const MementoRef& first_memento(const TimeMap& tm) {
    if (tm.mementos.empty()) {
        throw UsageError("first_memento: empty TimeMap " + tm.uri_t);
    }
    for (const auto& ref : tm.mementos) {
        if (ref.has_hint("first memento")) return ref;
    }
    const MementoRef* best = &tm.mementos.front();
    for (const auto& ref : tm.mementos) {
        if (ref.memento_datetime < best->memento_datetime ||
            (ref.memento_datetime == best->memento_datetime && ref.uri_m < best->uri_m)) {
            best = &ref;
        }
    }
    return *best;
}

}  // namespace otmt
