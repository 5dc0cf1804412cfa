#include "otmt/preprocess.hpp"

#include <array>
#include <cctype>

namespace otmt {

namespace {

// Working state for one stemming pass. The word is mutated in place; all
// conditions are evaluated against a prefix length so "the stem before the
// suffix" never needs a copy.
class Stem {
public:
    explicit Stem(std::string word) : w_(std::move(word)) {}

    const std::string& str() const { return w_; }
    std::size_t size() const { return w_.size(); }

    bool ends(std::string_view suffix) const {
        return w_.size() >= suffix.size() &&
               std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
    }

    std::size_t stem_before(std::string_view suffix) const { return w_.size() - suffix.size(); }

    void replace(std::string_view suffix, std::string_view with) {
        w_.resize(w_.size() - suffix.size());
        w_.append(with);
    }

    void truncate(std::size_t len) { w_.resize(len); }
    void append(char c) { w_.push_back(c); }
    char last() const { return w_.back(); }

    bool is_consonant(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_consonant(i - 1);
            default:
                return true;
        }
    }

    // m in the [C](VC)^m[V] decomposition of w[0..len).
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && is_consonant(i)) ++i;
        while (i < len) {
            while (i < len && !is_consonant(i)) ++i;
            if (i >= len) break;
            ++m;
            while (i < len && is_consonant(i)) ++i;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!is_consonant(i)) return true;
        }
        return false;
    }

    bool double_consonant(std::size_t len) const {
        return len >= 2 && w_[len - 1] == w_[len - 2] && is_consonant(len - 1);
    }

    // *o: ends consonant-vowel-consonant where the final consonant is not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3)) return false;
        char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

private:
    std::string w_;
};

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Applies the first rule whose suffix matches, provided the remaining stem
// has measure > min_measure. Matching a suffix ends the step either way.
void apply_rule_list(Stem& s, std::initializer_list<Rule> rules, int min_measure) {
    for (const Rule& rule : rules) {
        if (!s.ends(rule.suffix)) continue;
        if (s.measure(s.stem_before(rule.suffix)) > min_measure) {
            s.replace(rule.suffix, rule.replacement);
        }
        return;
    }
}

void step_1a(Stem& s) {
    if (s.ends("sses")) {
        s.replace("sses", "ss");
    } else if (s.ends("ies")) {
        s.replace("ies", "i");
    } else if (s.ends("ss")) {
        // keep
    } else if (s.ends("s")) {
        s.replace("s", "");
    }
}

void step_1b(Stem& s) {
    if (s.ends("eed")) {
        if (s.measure(s.stem_before("eed")) > 0) s.replace("eed", "ee");
        return;
    }
    bool stripped = false;
    if (s.ends("ed") && s.has_vowel(s.stem_before("ed"))) {
        s.replace("ed", "");
        stripped = true;
    } else if (s.ends("ing") && s.has_vowel(s.stem_before("ing"))) {
        s.replace("ing", "");
        stripped = true;
    }
    if (!stripped) return;

    if (s.ends("at")) {
        s.replace("at", "ate");
    } else if (s.ends("bl")) {
        s.replace("bl", "ble");
    } else if (s.ends("iz")) {
        s.replace("iz", "ize");
    } else if (s.double_consonant(s.size()) && s.last() != 'l' && s.last() != 's' &&
               s.last() != 'z') {
        s.truncate(s.size() - 1);
    } else if (s.measure(s.size()) == 1 && s.cvc(s.size())) {
        s.append('e');
    }
}

void step_1c(Stem& s) {
    if (s.ends("y") && s.has_vowel(s.stem_before("y"))) s.replace("y", "i");
}

void step_2(Stem& s) {
    apply_rule_list(s,
                    {{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
                     {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
                     {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                     {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
                     {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}},
                    0);
}

void step_3(Stem& s) {
    apply_rule_list(s,
                    {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                     {"ical", "ic"},  {"ful", ""},   {"ness", ""}},
                    0);
}

void step_4(Stem& s) {
    // "ement" must be tried before "ment" and "ent"; scan longest-first.
    static constexpr std::array<std::string_view, 19> kOrdered = {
        "ement", "ance", "ence", "able", "ible", "ment", "ion", "ism", "ate",
        "iti",   "ous",  "ive",  "ize",  "ant",  "ent",  "al",  "er",  "ic", "ou"};
    for (std::string_view suffix : kOrdered) {
        if (!s.ends(suffix)) continue;
        std::size_t stem = s.stem_before(suffix);
        if (suffix == "ion") {
            if (s.measure(stem) > 1 && stem >= 1 &&
                (s.str()[stem - 1] == 's' || s.str()[stem - 1] == 't')) {
                s.truncate(stem);
            }
        } else if (s.measure(stem) > 1) {
            s.truncate(stem);
        }
        return;
    }
}

void step_5a(Stem& s) {
    if (!s.ends("e")) return;
    std::size_t stem = s.stem_before("e");
    int m = s.measure(stem);
    if (m > 1 || (m == 1 && !s.cvc(stem))) s.truncate(stem);
}

void step_5b(Stem& s) {
    if (s.measure(s.size()) > 1 && s.double_consonant(s.size()) && s.last() == 'l') {
        s.truncate(s.size() - 1);
    }
}

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() < 3) return std::string(word);
    for (char c : word) {
        if (c < 'a' || c > 'z') return std::string(word);
    }
    Stem s{std::string(word)};
    step_1a(s);
    step_1b(s);
    step_1c(s);
    step_2(s);
    step_3(s);
    step_4(s);
    step_5a(s);
    step_5b(s);
    return s.str();
}

}  // namespace otmt
