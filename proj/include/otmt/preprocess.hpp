#ifndef OTMT_PREPROCESS_HPP
#define OTMT_PREPROCESS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace otmt {

struct PreprocessConfig {
    enum class Stemmer { kPorter, kNone };
    enum class Boilerplate { kHeuristicBlocks, kNone };

    std::string stopword_list_id = "english-snowball-v1";
    Stemmer stemmer = Stemmer::kPorter;
    Boilerplate boilerplate = Boilerplate::kHeuristicBlocks;
    int min_token_length = 1;
};

// The embedded English stop list (Snowball's, 174 entries). Fixed and
// versioned with the artifact; see stopwords.cpp for the verbatim list.
const std::set<std::string>& english_stopwords();
std::string_view english_stopword_list_id();

// Original Porter algorithm (1980). Words shorter than 3 letters or
// containing non-ASCII-alpha characters are returned unchanged.
std::string porter_stem(std::string_view word);

// Best-effort conversion of raw bytes to UTF-8. `charset_hint` may be a bare
// charset name or a full Content-Type value; an HTML <meta> charset inside
// the bytes wins over nothing, the hint wins over the meta. Unknown charsets
// and invalid UTF-8 sequences degrade to U+FFFD, never to failure.
std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint = {});

// Strips markup and boilerplate blocks from an HTML document. Blocks are
// text runs between block-level tags, with script/style/comment content
// dropped outright. A block is boilerplate when its link density exceeds
// 0.5, or when it has fewer than 10 words at stop-word density below 0.2;
// the short-block rule is waived when it would discard every remaining
// block, so pages that are nothing but a short message keep their text.
// Input without any markup is returned decoded but otherwise unchanged.
std::string remove_boilerplate(std::string_view bytes,
                               std::optional<std::string_view> charset_hint = {});

// Lowercases, splits on maximal runs of non-token characters (token
// characters: ASCII alphanumerics and all bytes >= 0x80), drops stop words,
// then stems. Order and multiplicity of surviving tokens are preserved.
std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& cfg = {});

// Exact multiset counts; sum of counts equals the token list length.
std::map<std::string, int> term_frequencies(const std::vector<std::string>& tokens);

}  // namespace otmt

#endif  // OTMT_PREPROCESS_HPP
