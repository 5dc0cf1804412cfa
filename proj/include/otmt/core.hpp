#ifndef OTMT_CORE_HPP
#define OTMT_CORE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace otmt {

// Error taxonomy shared across the toolkit. Structural problems throw;
// per-memento measurement failures are captured in MeasureResult::error
// instead so a single bad capture never aborts a collection run.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad invocation or a call that violates an operation's contract.
class UsageError : public Error {
public:
    using Error::Error;
};

// Malformed input document (TimeMap, WARC header, gold-standard file, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

// A source resolved to nothing measurable.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// HTTP or content-store retrieval failure.
class FetchError : public Error {
public:
    explicit FetchError(const std::string& msg, int status_code = 0)
        : Error(msg), status_code_(status_code) {}
    int status_code() const { return status_code_; }

private:
    int status_code_;
};

// Undefined or degenerate similarity score (empty sets, zero-norm vector, ...).
class MeasureError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class TopicStatus { kOnTopic, kOffTopic };

std::string_view to_string(TopicStatus status);
std::optional<TopicStatus> topic_status_from_string(std::string_view text);

// Which derivations were actually performed on a memento before scoring.
// Emitted verbatim in reports, so these must track reality, not intent.
struct PreprocessingFlags {
    bool removed_boilerplate = false;
    bool tokenized = false;
    bool stemmed = false;

    friend bool operator==(const PreprocessingFlags&, const PreprocessingFlags&) = default;
};

// One memento entry of a TimeMap. rel_hints holds the whitespace-split
// relation tokens of the entry ("first", "memento", ...).
struct MementoRef {
    std::string uri_m;
    std::int64_t memento_datetime = 0;  // UTC epoch seconds
    std::set<std::string> rel_hints;

    // True when every token of `label` ("first memento", "memento", ...)
    // is present in rel_hints.
    bool has_hint(std::string_view label) const;

    friend bool operator==(const MementoRef&, const MementoRef&) = default;
};

struct TimeMap {
    std::string uri_t;
    std::string original_uri;
    std::vector<MementoRef> mementos;  // ascending by memento_datetime

    friend bool operator==(const TimeMap&, const TimeMap&) = default;
};

// A memento's raw bytes plus whatever derivations a measure required.
// tokens implies extracted_text, term_frequencies implies tokens.
struct MementoDocument {
    MementoRef ref;
    std::string raw_bytes;
    std::string content_type;
    std::optional<std::string> extracted_text;
    std::optional<std::vector<std::string>> tokens;
    std::optional<std::map<std::string, int>> term_frequencies;
    PreprocessingFlags flags;
};

// Verdict of one measure for one memento. When `error` is set the memento
// could not be scored; it defaults to on-topic and the report carries an
// error annotation rather than dropping the row.
struct MeasureResult {
    std::string measure_id;
    double comparison_score = 0.0;
    double threshold = 0.0;
    TopicStatus topic_status = TopicStatus::kOnTopic;
    PreprocessingFlags flags;
    std::optional<std::string> error;
};

struct MementoReportEntry {
    std::map<std::string, MeasureResult> timemap_measures;  // keyed by measure id
    TopicStatus overall_topic_status = TopicStatus::kOnTopic;
};

// Nested report: URI-T -> URI-M -> per-measure results + overall status.
// `errors` collects fetch/preprocess failures; the per-TimeMap key "*"
// marks failures that voided the whole TimeMap.
struct CollectionReport {
    std::map<std::string, std::map<std::string, MementoReportEntry>> timemaps;
    std::map<std::string, std::map<std::string, std::string>> errors;
};

// Logical-or over measure verdicts: off-topic as soon as any measure says so.
TopicStatus overall_topic_status(const std::vector<MeasureResult>& results);

}  // namespace otmt

#endif  // OTMT_CORE_HPP
