#include "otmt/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace otmt {

namespace {

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.append("\xEF\xBF\xBD");  // U+FFFD
    }
}

// Windows-1252 0x80..0x9F block; 0 marks undefined positions.
constexpr std::array<std::uint16_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::string decode_single_byte(std::string_view bytes, bool cp1252) {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (cp1252 && c < 0xA0) {
            std::uint16_t cp = kCp1252High[c - 0x80];
            append_utf8(out, cp ? cp : 0xFFFD);
        } else {
            append_utf8(out, c);
        }
    }
    return out;
}

std::string validate_utf8(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            out.append("\xEF\xBF\xBD");
            ++i;
            continue;
        }
        bool ok = i + len <= bytes.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) {
                ok = false;
            } else {
                cp = (cp << 6) | (cc & 0x3F);
            }
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
            (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
            out.append("\xEF\xBF\xBD");
            ++i;
            continue;
        }
        out.append(bytes.substr(i, len));
        i += len;
    }
    return out;
}

std::string normalize_charset(std::string_view name) {
    std::string cs = to_lower_ascii(name);
    std::erase_if(cs, [](char c) { return c == ' ' || c == '"' || c == '\''; });
    return cs;
}

// Pulls charset= out of either a bare name or a full Content-Type value.
std::string charset_from_hint(std::string_view hint) {
    std::string lower = to_lower_ascii(hint);
    std::size_t pos = lower.find("charset=");
    if (pos != std::string::npos) {
        std::string rest = lower.substr(pos + 8);
        std::size_t end = rest.find(';');
        return normalize_charset(rest.substr(0, end));
    }
    if (lower.find('/') != std::string::npos) return "";  // a media type without charset
    return normalize_charset(lower);
}

// Looks for <meta charset=...> or charset= inside a meta http-equiv tag in
// the leading bytes of an HTML document.
std::string charset_from_meta(std::string_view bytes) {
    std::string head = to_lower_ascii(bytes.substr(0, std::min<std::size_t>(bytes.size(), 4096)));
    std::size_t pos = 0;
    while ((pos = head.find("<meta", pos)) != std::string::npos) {
        std::size_t end = head.find('>', pos);
        if (end == std::string::npos) break;
        std::string_view tag(head.data() + pos, end - pos);
        std::size_t cs = tag.find("charset=");
        if (cs != std::string_view::npos) {
            std::string_view rest = tag.substr(cs + 8);
            std::size_t stop = rest.find_first_of("\";> ");
            if (!rest.empty() && (rest[0] == '"' || rest[0] == '\'')) {
                stop = rest.find(rest[0], 1);
                if (stop != std::string_view::npos) return normalize_charset(rest.substr(1, stop - 1));
            }
            return normalize_charset(rest.substr(0, stop));
        }
        pos = end;
    }
    return "";
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ascii_space(text[i])) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

// Stop-list membership for whole words: lowercase and trim punctuation from
// the edges so "The," still counts as a stop word.
bool is_stopword_word(std::string_view word) {
    std::string w = to_lower_ascii(word);
    std::size_t begin = 0, end = w.size();
    auto keep = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    };
    while (begin < end && !keep(w[begin])) ++begin;
    while (end > begin && !keep(w[end - 1])) --end;
    if (begin >= end) return false;
    return english_stopwords().contains(w.substr(begin, end - begin));
}

struct TextBlock {
    std::string text;
    std::string link_text;
};

const std::set<std::string, std::less<>>& block_tags() {
    static const std::set<std::string, std::less<>> tags = {
        "address", "article", "aside",    "blockquote", "body",   "br",     "button",
        "caption", "center",  "dd",       "div",        "dl",     "dt",     "fieldset",
        "figcaption", "figure", "footer", "form",       "frame",  "frameset", "h1",
        "h2",      "h3",      "h4",       "h5",         "h6",     "head",   "header",
        "hr",      "html",    "iframe",   "li",         "main",   "meta",   "nav",
        "ol",      "option",  "p",        "pre",        "section", "select", "table",
        "tbody",   "td",      "textarea", "tfoot",      "th",     "thead",  "title",
        "tr",      "ul"};
    return tags;
}

void append_entity(std::string_view text, std::size_t& i, std::string& out) {
    // text[i] == '&'; on failure the ampersand is kept literally.
    std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
        out.push_back('&');
        ++i;
        return;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = name.size() > 1;
        if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
            for (std::size_t k = 2; k < name.size() && ok; ++k) {
                char c = static_cast<char>(std::tolower(static_cast<unsigned char>(name[k])));
                if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<std::uint32_t>(c - '0');
                else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<std::uint32_t>(c - 'a' + 10);
                else ok = false;
            }
        } else {
            for (std::size_t k = 1; k < name.size() && ok; ++k) {
                if (name[k] >= '0' && name[k] <= '9') cp = cp * 10 + static_cast<std::uint32_t>(name[k] - '0');
                else ok = false;
            }
        }
        if (ok && cp > 0) {
            append_utf8(out, cp);
            i = semi + 1;
            return;
        }
        out.push_back('&');
        ++i;
        return;
    }
    static const std::map<std::string_view, std::string_view> kNamed = {
        {"amp", "&"}, {"lt", "<"},  {"gt", ">"},    {"quot", "\""},
        {"apos", "'"}, {"nbsp", " "}, {"mdash", "\xE2\x80\x94"}, {"ndash", "\xE2\x80\x93"},
        {"hellip", "\xE2\x80\xA6"}, {"copy", "\xC2\xA9"}, {"reg", "\xC2\xAE"}};
    auto it = kNamed.find(name);
    if (it != kNamed.end()) {
        out.append(it->second);
        i = semi + 1;
        return;
    }
    out.push_back('&');
    ++i;
}

}  // namespace

std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint) {
    std::string charset = charset_from_hint(charset_hint);
    if (charset.empty()) charset = charset_from_meta(bytes);

    if (charset == "iso-8859-1" || charset == "latin-1" || charset == "latin1" ||
        charset == "iso8859-1") {
        return decode_single_byte(bytes, /*cp1252=*/false);
    }
    if (charset == "windows-1252" || charset == "cp1252") {
        return decode_single_byte(bytes, /*cp1252=*/true);
    }
    // utf-8, us-ascii and anything unrecognized: UTF-8 with replacement.
    return validate_utf8(bytes);
}

std::string remove_boilerplate(std::string_view bytes,
                               std::optional<std::string_view> charset_hint) {
    const std::string text = decode_to_utf8(bytes, charset_hint.value_or(""));

    std::vector<TextBlock> blocks(1);
    int tag_count = 0;
    int link_depth = 0;
    std::size_t i = 0;

    auto flush_block = [&blocks]() {
        if (!blocks.back().text.empty()) blocks.emplace_back();
    };
    auto append_text = [&](std::string_view run) {
        blocks.back().text.append(run);
        if (link_depth > 0) {
            // runs are separated so adjacent anchors don't merge into one word
            blocks.back().link_text.append(run);
            blocks.back().link_text.push_back(' ');
        }
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == '&') {
            std::string decoded;
            append_entity(text, i, decoded);
            append_text(decoded);
            continue;
        }
        if (c != '<') {
            std::size_t stop = text.find_first_of("<&", i);
            if (stop == std::string::npos) stop = text.size();
            append_text(std::string_view(text).substr(i, stop - i));
            i = stop;
            continue;
        }
        // possible markup
        if (text.compare(i, 4, "<!--") == 0) {
            std::size_t end = text.find("-->", i + 4);
            i = end == std::string::npos ? text.size() : end + 3;
            ++tag_count;
            continue;
        }
        if (i + 1 >= text.size() ||
            (!std::isalpha(static_cast<unsigned char>(text[i + 1])) && text[i + 1] != '/' &&
             text[i + 1] != '!' && text[i + 1] != '?')) {
            append_text("<");  // literal less-than
            ++i;
            continue;
        }
        std::size_t close = text.find('>', i);
        if (close == std::string::npos) {
            append_text(std::string_view(text).substr(i));
            break;
        }
        std::string_view tag(text.data() + i, close - i + 1);
        ++tag_count;
        bool closing = tag.size() > 1 && tag[1] == '/';
        std::size_t name_start = closing ? 2 : 1;
        std::size_t name_end = name_start;
        while (name_end < tag.size() &&
               std::isalnum(static_cast<unsigned char>(tag[name_end]))) {
            ++name_end;
        }
        std::string name = to_lower_ascii(tag.substr(name_start, name_end - name_start));
        i = close + 1;

        if (!closing && (name == "script" || name == "style")) {
            std::string end_tag = "</" + name;
            std::size_t pos = i;
            while (pos < text.size()) {
                pos = text.find('<', pos);
                if (pos == std::string::npos) {
                    pos = text.size();
                    break;
                }
                if (text.size() - pos > end_tag.size() &&
                    iequals(std::string_view(text).substr(pos, end_tag.size()), end_tag)) {
                    break;
                }
                ++pos;
            }
            std::size_t end = pos < text.size() ? text.find('>', pos) : std::string::npos;
            i = end == std::string::npos ? text.size() : end + 1;
            flush_block();
            continue;
        }
        if (name == "a") {
            link_depth += closing ? -1 : 1;
            if (link_depth < 0) link_depth = 0;
            continue;
        }
        if (block_tags().contains(name)) {
            flush_block();
        }
    }

    if (tag_count == 0) return text;

    struct Classified {
        const TextBlock* block;
        bool short_low_stop;
    };
    std::vector<Classified> kept;
    for (const TextBlock& block : blocks) {
        auto words = split_words(block.text);
        if (words.empty()) continue;
        double link_density =
            static_cast<double>(split_words(block.link_text).size()) / static_cast<double>(words.size());
        if (link_density > 0.5) continue;  // hard boilerplate
        int stop_count = 0;
        for (std::string_view w : words) {
            if (is_stopword_word(w)) ++stop_count;
        }
        double stop_density = static_cast<double>(stop_count) / static_cast<double>(words.size());
        kept.push_back({&block, stop_density < 0.2 && words.size() < 10});
    }

    bool any_content = std::any_of(kept.begin(), kept.end(),
                                   [](const Classified& c) { return !c.short_low_stop; });
    std::string out;
    for (const Classified& c : kept) {
        if (any_content && c.short_low_stop) continue;
        if (!out.empty()) out.push_back('\n');
        // trim outer whitespace of the block
        std::string_view t = c.block->text;
        std::size_t b = 0, e = t.size();
        while (b < e && is_ascii_space(t[b])) ++b;
        while (e > b && is_ascii_space(t[e - 1])) --e;
        out.append(t.substr(b, e - b));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& cfg) {
    std::vector<std::string> tokens;
    const auto& stops = english_stopwords();
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        std::string token = std::move(current);
        current.clear();
        if (static_cast<int>(token.size()) < cfg.min_token_length) return;
        if (stops.contains(token)) return;
        if (cfg.stemmer == PreprocessConfig::Stemmer::kPorter) token = porter_stem(token);
        tokens.push_back(std::move(token));
    };
    for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            current.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::map<std::string, int> term_frequencies(const std::vector<std::string>& tokens) {
    std::map<std::string, int> tf;
    for (const auto& token : tokens) ++tf[token];
    return tf;
}

}  // namespace otmt
