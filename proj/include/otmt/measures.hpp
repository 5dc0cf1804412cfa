#ifndef OTMT_MEASURES_HPP
#define OTMT_MEASURES_HPP

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otmt/core.hpp"

namespace otmt {

enum class MeasureId {
    kBytecount,
    kWordcount,
    kJaccard,
    kSorensen,
    kSimhashTf,
    kSimhashRaw,
    kCosine,
    kGensimLsi,
};

enum class OfftopicDirection { kScoreBelowThreshold, kScoreAboveThreshold };

// Static description of one similarity measure: CLI keyword, calibrated
// default threshold, which side of the threshold means off-topic, whether
// the memento is preprocessed first, and the score endpoints (fully
// equivalent -> fully dissimilar).
struct MeasureSpec {
    MeasureId id;
    std::string_view keyword;
    double default_threshold;
    OfftopicDirection direction;
    bool requires_preprocessing;
    double equivalent_score;
    double dissimilar_score;

    double range_min() const;
    double range_max() const;
    bool integral_score() const {
        return id == MeasureId::kSimhashTf || id == MeasureId::kSimhashRaw;
    }
};

std::span<const MeasureSpec> measure_table();
const MeasureSpec& measure_spec(MeasureId id);
const MeasureSpec* find_measure(std::string_view keyword);

inline constexpr int kDefaultLsiTopics = 10;

// Structural size comparison for byte and word counts: percentage shrink of
// the considered memento, clamped to 0 when it grew or stayed equal.
// Range [-1, 0]; -1 means the considered memento shrank to nothing.
double count_distance(std::int64_t count_f, std::int64_t count_m);

// Set distances over distinct-token sets. Both throw MeasureError when both
// sets are empty.
double jaccard_distance(const std::set<std::string>& tokens_f,
                        const std::set<std::string>& tokens_m);
double sorensen_distance(const std::set<std::string>& tokens_f,
                         const std::set<std::string>& tokens_m);

// Stable 64-bit token digest used by both Simhash variants (FNV-1a with the
// standard offset basis / prime, so fingerprints are reproducible across
// platforms and builds).
std::uint64_t fnv1a64(std::string_view data);

// Charikar fingerprint over weighted features: bit i of the result is set
// iff the count-weighted sum of feature-hash bits i is positive.
std::uint64_t simhash_tf(const std::map<std::string, int>& term_frequencies);

// Same construction with every overlapping 4-byte window of the decoded
// text as a weight-1 feature, so repeated and shifted runs influence the
// fingerprint through multiplicity.
std::uint64_t simhash_raw(std::string_view text);

int hamming(std::uint64_t h1, std::uint64_t h2);

enum class VectorBasis { kTfidf, kLsi };

// Sparse document vector over term indices (TF-IDF) or dense topic indices
// (LSI). Vectors are only comparable within the corpus that produced them.
struct DocumentVector {
    VectorBasis basis = VectorBasis::kTfidf;
    int k_topics = 0;  // LSI only: effective topic count after clamping
    std::vector<std::pair<std::int32_t, double>> entries;  // sorted by index

    friend bool operator==(const DocumentVector&, const DocumentVector&) = default;
};

// TF-IDF vectors for all documents of one TimeMap:
// weight = tf * (ln((1+N)/(1+df)) + 1), then L2-normalized.
std::vector<DocumentVector> tfidf_vectors(const std::vector<std::vector<std::string>>& docs);

// Rank-k LSI projection of the TF-IDF term-document matrix, computed with a
// deterministic eigendecomposition of the document Gram matrix. k is
// clamped to the matrix rank (and to min(#terms, #docs)); `clamped` reports
// whether that happened. Identical documents share a bitwise-identical
// projection.
std::vector<DocumentVector> lsi_vectors(const std::vector<std::vector<std::string>>& docs,
                                        int k_topics, bool* clamped = nullptr);

// Cosine similarity in [0, 1]. Identical vectors score exactly 1.0;
// negative values (possible in the LSI basis) clamp to 0.
double cosine(const DocumentVector& v_f, const DocumentVector& v_m);

// Classification rule: strictly below the threshold is off-topic for
// "below" measures, strictly above for "above" measures; scores on the
// boundary stay on-topic. The two-argument form uses the calibrated
// default threshold.
TopicStatus apply_threshold(const MeasureSpec& spec, double score, double threshold);
TopicStatus apply_threshold(const MeasureSpec& spec, double score);

}  // namespace otmt

#endif  // OTMT_MEASURES_HPP
