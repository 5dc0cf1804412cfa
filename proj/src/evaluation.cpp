#include "otmt/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace otmt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

bool off_at(double score, double threshold, OfftopicDirection direction) {
    return direction == OfftopicDirection::kScoreBelowThreshold ? score < threshold
                                                                : score > threshold;
}

// Distance of a threshold from the dissimilar end of the sweep range, used
// as the final tie component so the reported threshold is deterministic.
double dissimilar_gap(double threshold, const SweepSpec& spec, OfftopicDirection direction) {
    double dissimilar_end =
        direction == OfftopicDirection::kScoreBelowThreshold ? spec.lower : spec.upper;
    return std::abs(threshold - dissimilar_end);
}

}  // namespace

std::vector<GoldLabel> load_gold_standard(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read gold standard file " + path.string());

    std::vector<GoldLabel> labels;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 3 fields (collection_id, uri_m, label)");
        }
        auto status = topic_status_from_string(fields[2]);
        if (!status) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": unknown label \"" + fields[2] +
                             "\" (expected on-topic or off-topic)");
        }
        if (!seen.insert(fields[1]).second) {
            if (warnings) {
                warnings->push_back(path.string() + ":" + std::to_string(line_no) +
                                    ": duplicate uri_m ignored: " + fields[1]);
            }
            continue;
        }
        labels.push_back({fields[1], *status, fields[0]});
    }
    if (labels.empty()) {
        throw EmptyInputError("gold standard file has no labels: " + path.string());
    }
    return labels;
}

ConfusionResult confusion(const std::map<std::string, TopicStatus>& verdicts,
                          const std::vector<GoldLabel>& labels) {
    ConfusionResult result;
    for (const GoldLabel& gold : labels) {
        auto it = verdicts.find(gold.uri_m);
        if (it == verdicts.end()) {
            result.missing.push_back(gold.uri_m);
            continue;
        }
        bool gold_off = gold.label == TopicStatus::kOffTopic;
        bool verdict_off = it->second == TopicStatus::kOffTopic;
        if (gold_off && verdict_off) ++result.counts.tp;
        else if (gold_off && !verdict_off) ++result.counts.fn;
        else if (!gold_off && verdict_off) ++result.counts.fp;
        else ++result.counts.tn;
    }
    return result;
}

std::optional<double> f1(const ConfusionCounts& c) {
    std::int64_t denominator = 2 * c.tp + c.fp + c.fn;
    if (denominator <= 0) return std::nullopt;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denominator);
}

std::optional<double> accuracy(const ConfusionCounts& c) {
    if (c.total() <= 0) return std::nullopt;
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

SweepSpec default_sweep_spec(MeasureId measure) {
    switch (measure) {
        case MeasureId::kBytecount:
        case MeasureId::kWordcount:
            return {measure, -1.0, 0.0, 0.01};
        case MeasureId::kSimhashTf:
        case MeasureId::kSimhashRaw:
            return {measure, 0.0, 64.0, 1.0};
        default:
            return {measure, 0.0, 1.0, 0.01};
    }
}

std::span<const int> lsi_topic_grid() {
    static constexpr std::array<int, 8> kGrid = {2, 3, 5, 7, 10, 25, 50, 100};
    return kGrid;
}

SweepResult sweep(const std::map<std::string, double>& scores,
                  const std::vector<GoldLabel>& labels, const SweepSpec& spec,
                  OfftopicDirection direction, std::vector<std::string>* coverage_gaps) {
    if (scores.empty()) throw UsageError("sweep: empty score set");
    if (spec.step <= 0 || spec.upper < spec.lower) throw UsageError("sweep: bad threshold grid");

    std::vector<GoldLabel> covered;
    for (const GoldLabel& gold : labels) {
        if (scores.contains(gold.uri_m)) {
            covered.push_back(gold);
        } else if (coverage_gaps) {
            coverage_gaps->push_back(gold.uri_m);
        }
    }

    SweepResult result;
    const int steps = static_cast<int>(std::llround((spec.upper - spec.lower) / spec.step));
    bool have_best = false;
    double best_gap = 0.0;
    std::int64_t best_off = 0;

    for (int i = 0; i <= steps; ++i) {
        double threshold = spec.lower + spec.step * i;
        if (i == steps) threshold = spec.upper;  // exact endpoint

        ConfusionCounts counts;
        std::int64_t off_count = 0;
        for (const auto& [uri_m, score] : scores) {
            if (off_at(score, threshold, direction)) ++off_count;
        }
        for (const GoldLabel& gold : covered) {
            bool verdict_off = off_at(scores.at(gold.uri_m), threshold, direction);
            bool gold_off = gold.label == TopicStatus::kOffTopic;
            if (gold_off && verdict_off) ++counts.tp;
            else if (gold_off) ++counts.fn;
            else if (verdict_off) ++counts.fp;
            else ++counts.tn;
        }
        SweepPoint point{threshold, f1(counts), accuracy(counts), off_count};
        result.curve.push_back(point);

        double point_f1 = point.f1.value_or(-1.0);
        double current_best = result.best_f1.value_or(-1.0);
        double gap = dissimilar_gap(threshold, spec, direction);
        bool better = !have_best || point_f1 > current_best ||
                      (point_f1 == current_best &&
                       (off_count < best_off || (off_count == best_off && gap < best_gap)));
        if (better) {
            have_best = true;
            result.best_threshold = threshold;
            result.best_f1 = point.f1;
            result.best_accuracy = point.accuracy;
            best_off = off_count;
            best_gap = gap;
        }
    }
    return result;
}

std::map<std::string, TopicStatus> or_combine(
    const std::vector<std::map<std::string, TopicStatus>>& verdict_sets) {
    if (verdict_sets.empty()) throw UsageError("or_combine: no verdict maps");
    const auto& universe = verdict_sets.front();
    for (const auto& verdicts : verdict_sets) {
        if (verdicts.size() != universe.size()) {
            throw UsageError("or_combine: verdict maps cover different URI-M universes");
        }
        for (const auto& [uri_m, status] : verdicts) {
            if (!universe.contains(uri_m)) {
                throw UsageError("or_combine: URI-M universe mismatch at " + uri_m);
            }
        }
    }
    std::map<std::string, TopicStatus> combined = universe;
    for (const auto& verdicts : verdict_sets) {
        for (const auto& [uri_m, status] : verdicts) {
            if (status == TopicStatus::kOffTopic) combined[uri_m] = TopicStatus::kOffTopic;
        }
    }
    return combined;
}

CombineResult combine_measures(const std::vector<std::map<std::string, TopicStatus>>& verdict_sets,
                               const std::vector<GoldLabel>& labels) {
    if (verdict_sets.size() < 2) {
        throw UsageError("combine_measures: need at least two verdict maps");
    }
    auto combined = or_combine(verdict_sets);
    ConfusionResult conf = confusion(combined, labels);
    return {conf.counts, f1(conf.counts), accuracy(conf.counts)};
}

PairGridResult grid_search_pair(const std::map<std::string, double>& scores_a,
                                const SweepSpec& spec_a, OfftopicDirection direction_a,
                                const std::map<std::string, double>& scores_b,
                                const SweepSpec& spec_b, OfftopicDirection direction_b,
                                const std::vector<GoldLabel>& labels) {
    if (scores_a.empty() || scores_b.empty()) throw UsageError("grid_search_pair: empty scores");

    std::vector<GoldLabel> covered;
    for (const GoldLabel& gold : labels) {
        if (scores_a.contains(gold.uri_m) && scores_b.contains(gold.uri_m)) {
            covered.push_back(gold);
        }
    }
    if (covered.empty()) throw UsageError("grid_search_pair: no labeled memento has both scores");

    PairGridResult best;
    bool have_best = false;
    std::int64_t best_off = 0;

    const int steps_a = static_cast<int>(std::llround((spec_a.upper - spec_a.lower) / spec_a.step));
    const int steps_b = static_cast<int>(std::llround((spec_b.upper - spec_b.lower) / spec_b.step));
    for (int i = 0; i <= steps_a; ++i) {
        double ta = i == steps_a ? spec_a.upper : spec_a.lower + spec_a.step * i;
        for (int j = 0; j <= steps_b; ++j) {
            double tb = j == steps_b ? spec_b.upper : spec_b.lower + spec_b.step * j;
            ConfusionCounts counts;
            std::int64_t off_count = 0;
            for (const GoldLabel& gold : covered) {
                bool off = off_at(scores_a.at(gold.uri_m), ta, direction_a) ||
                           off_at(scores_b.at(gold.uri_m), tb, direction_b);
                if (off) ++off_count;
                bool gold_off = gold.label == TopicStatus::kOffTopic;
                if (gold_off && off) ++counts.tp;
                else if (gold_off) ++counts.fn;
                else if (off) ++counts.fp;
                else ++counts.tn;
            }
            double candidate = f1(counts).value_or(-1.0);
            double current = best.f1.value_or(-1.0);
            if (!have_best || candidate > current ||
                (candidate == current && off_count < best_off)) {
                have_best = true;
                best = {ta, tb, f1(counts), accuracy(counts)};
                best_off = off_count;
            }
        }
    }
    return best;
}

std::string sweep_curve_csv(std::string_view measure_keyword, const SweepResult& result) {
    std::ostringstream out;
    out << "measure,threshold,f1,accuracy,off_count\n";
    for (const SweepPoint& point : result.curve) {
        out << measure_keyword << ',' << nlohmann::json(point.threshold).dump() << ','
            << (point.f1 ? nlohmann::json(*point.f1).dump() : "nan") << ','
            << (point.accuracy ? nlohmann::json(*point.accuracy).dump() : "nan") << ','
            << point.off_count << '\n';
    }
    return out.str();
}

}  // namespace otmt
