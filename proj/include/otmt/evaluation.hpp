#ifndef OTMT_EVALUATION_HPP
#define OTMT_EVALUATION_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otmt/core.hpp"
#include "otmt/measures.hpp"

namespace otmt {

struct GoldLabel {
    std::string uri_m;
    TopicStatus label = TopicStatus::kOnTopic;
    std::string collection_id;
};

// Comma-separated file with a header and columns collection_id, uri_m, label
// (label is "on-topic" or "off-topic"). Unknown labels fail with the line
// number; duplicate URI-Ms keep the first occurrence with a warning.
std::vector<GoldLabel> load_gold_standard(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings = nullptr);

// Off-topic is the positive class: TP = gold off / verdict off,
// FN = gold off / verdict on, FP = gold on / verdict off, TN = both on.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ConfusionResult {
    ConfusionCounts counts;
    std::vector<std::string> missing;  // labeled URI-Ms absent from the verdicts
};

ConfusionResult confusion(const std::map<std::string, TopicStatus>& verdicts,
                          const std::vector<GoldLabel>& labels);

// F1 = 2TP / (2TP + FP + FN); empty when the denominator is zero.
std::optional<double> f1(const ConfusionCounts& c);

// (TP + TN) / (TP + FP + FN + TN); empty when there are no observations.
std::optional<double> accuracy(const ConfusionCounts& c);

// Threshold grid for one measure. Defaults: counts [-1, 0] in 0.01 steps,
// distances and cosines [0, 1] in 0.01 steps, Simhash [0, 64] in integer
// steps.
struct SweepSpec {
    MeasureId measure = MeasureId::kBytecount;
    double lower = 0.0;
    double upper = 1.0;
    double step = 0.01;
};

SweepSpec default_sweep_spec(MeasureId measure);

// Topic counts worth trying when calibrating the LSI measure.
std::span<const int> lsi_topic_grid();

struct SweepPoint {
    double threshold = 0.0;
    std::optional<double> f1;
    std::optional<double> accuracy;
    std::int64_t off_count = 0;  // mementos the threshold marks off-topic
};

struct SweepResult {
    std::vector<SweepPoint> curve;
    double best_threshold = 0.0;
    std::optional<double> best_f1;
    std::optional<double> best_accuracy;
};

// Classifies every scored memento at each threshold of the grid and records
// F1/accuracy. The reported best threshold maximizes F1; ties go to the
// threshold that marks the fewest mementos off-topic (for equal off counts
// the classification sets are identical, and the threshold nearest the
// dissimilar end of the range is reported).
SweepResult sweep(const std::map<std::string, double>& scores,
                  const std::vector<GoldLabel>& labels, const SweepSpec& spec,
                  OfftopicDirection direction,
                  std::vector<std::string>* coverage_gaps = nullptr);

// Logical-or combination: off-topic when any constituent verdict map says
// off-topic. All maps must cover the same URI-M universe.
std::map<std::string, TopicStatus> or_combine(
    const std::vector<std::map<std::string, TopicStatus>>& verdict_sets);

struct CombineResult {
    ConfusionCounts counts;
    std::optional<double> f1;
    std::optional<double> accuracy;
};

CombineResult combine_measures(const std::vector<std::map<std::string, TopicStatus>>& verdict_sets,
                               const std::vector<GoldLabel>& labels);

// Exhaustive grid search over threshold pairs for the or-combination of two
// score maps, with the same tie rule as sweep.
struct PairGridResult {
    double threshold_a = 0.0;
    double threshold_b = 0.0;
    std::optional<double> f1;
    std::optional<double> accuracy;
};

PairGridResult grid_search_pair(const std::map<std::string, double>& scores_a,
                                const SweepSpec& spec_a, OfftopicDirection direction_a,
                                const std::map<std::string, double>& scores_b,
                                const SweepSpec& spec_b, OfftopicDirection direction_b,
                                const std::vector<GoldLabel>& labels);

// One curve row per threshold: measure, threshold, f1, accuracy ("nan" when
// undefined), suitable for plotting.
std::string sweep_curve_csv(std::string_view measure_keyword, const SweepResult& result);

}  // namespace otmt

#endif  // OTMT_EVALUATION_HPP
