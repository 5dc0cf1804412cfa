#ifndef OTMT_ENGINE_HPP
#define OTMT_ENGINE_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "otmt/acquisition.hpp"
#include "otmt/core.hpp"
#include "otmt/measures.hpp"
#include "otmt/preprocess.hpp"

namespace otmt {

// A collection run could resolve sources but score nothing at all.
class TotalFailureError : public Error {
public:
    using Error::Error;
};

struct MeasureSelection {
    MeasureId id = MeasureId::kBytecount;
    std::optional<double> threshold;  // empty -> calibrated default

    double effective_threshold() const {
        return threshold.value_or(measure_spec(id).default_threshold);
    }
};

enum class OutputFormat { kJson, kCsv };

struct RunConfig {
    CollectionSource source;
    std::vector<MeasureSelection> measures;
    std::filesystem::path output_path;
    OutputFormat output_format = OutputFormat::kJson;
    std::filesystem::path cache_dir = ".otmt_cache";
    int concurrency_limit = 4;
    int lsi_topics = kDefaultLsiTopics;
    PreprocessConfig preprocess;
    FetcherOptions fetcher;
    ArchiveItOptions archiveit;
    bool quiet = false;
};

// Scores every memento of one TimeMap against its first memento with each
// configured measure. The first memento itself is included and by
// construction always scores fully equivalent. Corpus measures (cosine,
// gensim_lsi) build their model from every successfully fetched memento of
// this TimeMap. A memento that cannot be fetched yields error-bearing
// results; an unfetchable first memento aborts the whole TimeMap.
std::map<std::string, std::vector<MeasureResult>> evaluate_timemap(const TimeMap& tm,
                                                                   const RunConfig& cfg,
                                                                   ContentProvider& content);

struct ResolvedCollection {
    std::vector<TimeMap> timemaps;
    std::shared_ptr<ContentProvider> provider;
    // TimeMaps that could not be resolved at all: uri_t (or input path) -> reason
    std::vector<std::pair<std::string, std::string>> failures;
};

// Turns the configured source (TimeMap URIs, WARC files or an Archive-It
// collection id) into TimeMaps plus the provider that serves their content.
ResolvedCollection resolve_collection(const RunConfig& cfg);

// Evaluates all resolved TimeMaps, up to cfg.concurrency_limit in parallel,
// and aggregates results plus error annotations into a report.
CollectionReport evaluate_collection(const ResolvedCollection& resolved, const RunConfig& cfg);

// resolve + evaluate + persist. Throws EmptyInputError when the source
// resolves to nothing and TotalFailureError when nothing could be scored.
CollectionReport run_collection(const RunConfig& cfg);

std::string report_to_json(const CollectionReport& report);
std::string report_to_csv(const CollectionReport& report);
void write_report(const CollectionReport& report, OutputFormat format,
                  const std::filesystem::path& path);

// One raw comparison score, decoupled from any threshold.
struct ScoreRow {
    std::string uri_t;
    std::string uri_m;
    std::string measure;
    double score = 0.0;
};

std::vector<ScoreRow> collect_scores(const CollectionReport& report);
void write_score_file(const std::vector<ScoreRow>& rows, const std::filesystem::path& path);
std::vector<ScoreRow> load_score_file(const std::filesystem::path& path);

}  // namespace otmt

#endif  // OTMT_ENGINE_HPP
