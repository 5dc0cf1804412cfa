#include "otmt/measures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace otmt {

namespace {

constexpr std::array<MeasureSpec, 8> kMeasureTable = {{
    {MeasureId::kBytecount, "bytecount", -0.39, OfftopicDirection::kScoreBelowThreshold, false,
     0.0, -1.0},
    {MeasureId::kWordcount, "wordcount", -0.70, OfftopicDirection::kScoreBelowThreshold, true,
     0.0, -1.0},
    {MeasureId::kJaccard, "jaccard", 0.94, OfftopicDirection::kScoreAboveThreshold, true,
     0.0, 1.0},
    {MeasureId::kSorensen, "sorensen", 0.88, OfftopicDirection::kScoreAboveThreshold, true,
     0.0, 1.0},
    {MeasureId::kSimhashTf, "simhash-tf", 28.0, OfftopicDirection::kScoreAboveThreshold, true,
     0.0, 64.0},
    {MeasureId::kSimhashRaw, "simhash-raw", 25.0, OfftopicDirection::kScoreAboveThreshold, false,
     0.0, 64.0},
    {MeasureId::kCosine, "cosine", 0.12, OfftopicDirection::kScoreBelowThreshold, true,
     1.0, 0.0},
    {MeasureId::kGensimLsi, "gensim_lsi", 0.10, OfftopicDirection::kScoreBelowThreshold, true,
     1.0, 0.0},
}};

double dot(const DocumentVector& a, const DocumentVector& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].first < b.entries[j].first) {
            ++i;
        } else if (a.entries[i].first > b.entries[j].first) {
            ++j;
        } else {
            sum += a.entries[i].second * b.entries[j].second;
            ++i;
            ++j;
        }
    }
    return sum;
}

double norm(const DocumentVector& v) {
    double sum = 0.0;
    for (const auto& [idx, w] : v.entries) sum += w * w;
    return std::sqrt(sum);
}

}  // namespace

double MeasureSpec::range_min() const { return std::min(equivalent_score, dissimilar_score); }
double MeasureSpec::range_max() const { return std::max(equivalent_score, dissimilar_score); }

std::span<const MeasureSpec> measure_table() { return kMeasureTable; }

const MeasureSpec& measure_spec(MeasureId id) {
    for (const auto& spec : kMeasureTable) {
        if (spec.id == id) return spec;
    }
    throw UsageError("unknown measure id");
}

const MeasureSpec* find_measure(std::string_view keyword) {
    for (const auto& spec : kMeasureTable) {
        if (spec.keyword == keyword) return &spec;
    }
    return nullptr;
}

double count_distance(std::int64_t count_f, std::int64_t count_m) {
    if (count_f <= 0) {
        throw MeasureError("count distance undefined: first memento has count 0");
    }
    if (count_m >= count_f) return 0.0;
    return static_cast<double>(count_m - count_f) / static_cast<double>(count_f);
}

double jaccard_distance(const std::set<std::string>& tokens_f,
                        const std::set<std::string>& tokens_m) {
    if (tokens_f.empty() && tokens_m.empty()) {
        throw MeasureError("jaccard distance undefined: both token sets empty");
    }
    std::size_t intersection = 0;
    for (const auto& t : tokens_f) {
        if (tokens_m.contains(t)) ++intersection;
    }
    std::size_t unioned = tokens_f.size() + tokens_m.size() - intersection;
    return static_cast<double>(unioned - intersection) / static_cast<double>(unioned);
}

double sorensen_distance(const std::set<std::string>& tokens_f,
                         const std::set<std::string>& tokens_m) {
    if (tokens_f.empty() && tokens_m.empty()) {
        throw MeasureError("sorensen distance undefined: both token sets empty");
    }
    std::size_t intersection = 0;
    for (const auto& t : tokens_f) {
        if (tokens_m.contains(t)) ++intersection;
    }
    return 1.0 - 2.0 * static_cast<double>(intersection) /
                     static_cast<double>(tokens_f.size() + tokens_m.size());
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

namespace {

std::uint64_t charikar_finish(const std::array<std::int64_t, 64>& acc) {
    std::uint64_t fingerprint = 0;
    for (int bit = 0; bit < 64; ++bit) {
        if (acc[static_cast<std::size_t>(bit)] > 0) fingerprint |= 1ULL << bit;
    }
    return fingerprint;
}

}  // namespace

std::uint64_t simhash_tf(const std::map<std::string, int>& term_frequencies) {
    if (term_frequencies.empty()) {
        throw MeasureError("simhash undefined: empty term-frequency map");
    }
    std::array<std::int64_t, 64> acc{};
    for (const auto& [term, count] : term_frequencies) {
        std::uint64_t h = fnv1a64(term);
        for (int bit = 0; bit < 64; ++bit) {
            acc[static_cast<std::size_t>(bit)] += (h >> bit & 1) ? count : -count;
        }
    }
    return charikar_finish(acc);
}

std::uint64_t simhash_raw(std::string_view text) {
    if (text.size() < 4) {
        throw MeasureError("simhash undefined: content shorter than one 4-gram");
    }
    std::array<std::int64_t, 64> acc{};
    for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
        std::uint64_t h = fnv1a64(text.substr(i, 4));
        for (int bit = 0; bit < 64; ++bit) {
            acc[static_cast<std::size_t>(bit)] += (h >> bit & 1) ? 1 : -1;
        }
    }
    return charikar_finish(acc);
}

int hamming(std::uint64_t h1, std::uint64_t h2) {
    return std::popcount(h1 ^ h2);
}

std::vector<DocumentVector> tfidf_vectors(const std::vector<std::vector<std::string>>& docs) {
    if (docs.empty()) throw MeasureError("tf-idf undefined: no documents");
    bool any_token = false;
    for (const auto& d : docs) {
        if (!d.empty()) any_token = true;
    }
    if (!any_token) throw MeasureError("tf-idf undefined: all documents empty");

    // vocabulary in first-seen order; index identity only matters within the corpus
    std::unordered_map<std::string, std::int32_t> vocab;
    std::vector<std::map<std::int32_t, int>> counts(docs.size());
    std::vector<std::int32_t> df;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& token : docs[d]) {
            auto [it, inserted] = vocab.try_emplace(token, static_cast<std::int32_t>(vocab.size()));
            if (inserted) df.push_back(0);
            auto [cit, first_in_doc] = counts[d].try_emplace(it->second, 0);
            if (first_in_doc) ++df[static_cast<std::size_t>(it->second)];
            ++cit->second;
        }
    }

    const double n_docs = static_cast<double>(docs.size());
    std::vector<double> idf(df.size());
    for (std::size_t t = 0; t < df.size(); ++t) {
        idf[t] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[t]))) + 1.0;
    }

    std::vector<DocumentVector> out(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        DocumentVector& v = out[d];
        v.basis = VectorBasis::kTfidf;
        v.entries.reserve(counts[d].size());
        double sq = 0.0;
        for (const auto& [term, count] : counts[d]) {
            double w = static_cast<double>(count) * idf[static_cast<std::size_t>(term)];
            v.entries.emplace_back(term, w);
            sq += w * w;
        }
        if (sq > 0.0) {
            double inv = 1.0 / std::sqrt(sq);
            for (auto& [term, w] : v.entries) w *= inv;
        }
    }
    return out;
}

std::vector<DocumentVector> lsi_vectors(const std::vector<std::vector<std::string>>& docs,
                                        int k_topics, bool* clamped) {
    if (docs.empty()) throw MeasureError("lsi undefined: no documents");
    if (k_topics < 1) throw UsageError("lsi: k_topics must be >= 1");
    if (clamped) *clamped = false;

    std::vector<DocumentVector> tfidf = tfidf_vectors(docs);

    // Deduplicate identical columns so equal documents end up with the same
    // projected vector, bit for bit.
    std::vector<std::size_t> canonical(docs.size());
    std::vector<std::size_t> distinct;
    {
        std::map<std::vector<std::pair<std::int32_t, double>>, std::size_t> seen;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            auto [it, inserted] = seen.try_emplace(tfidf[d].entries, distinct.size());
            if (inserted) distinct.push_back(d);
            canonical[d] = it->second;
        }
    }

    const std::size_t n = distinct.size();
    std::int32_t max_term = -1;
    for (const auto& v : tfidf) {
        if (!v.entries.empty()) max_term = std::max(max_term, v.entries.back().first);
    }
    const std::int64_t n_terms = max_term + 1;
    if (n_terms == 0) throw MeasureError("lsi undefined: degenerate all-zero matrix");

    // Gram matrix of the distinct TF-IDF columns; its eigenpairs give the
    // right singular vectors and squared singular values of the matrix.
    Eigen::MatrixXd gram(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            double g = dot(tfidf[distinct[a]], tfidf[distinct[b]]);
            gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
            gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = g;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw MeasureError("lsi: eigendecomposition failed");
    }
    // ascending eigenvalues; walk from the back for the dominant topics
    const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
    const Eigen::MatrixXd& eigenvectors = solver.eigenvectors();

    const double lambda_max = eigenvalues(static_cast<Eigen::Index>(n - 1));
    if (!(lambda_max > 0.0)) throw MeasureError("lsi undefined: degenerate all-zero matrix");
    const double lambda_tol = lambda_max * 1e-10;

    int rank = 0;
    for (Eigen::Index e = 0; e < eigenvalues.size(); ++e) {
        if (eigenvalues(e) > lambda_tol) ++rank;
    }
    int k = std::min<std::int64_t>({static_cast<std::int64_t>(k_topics), n_terms,
                                    static_cast<std::int64_t>(n), rank});
    if (k < k_topics && clamped) *clamped = true;

    std::vector<DocumentVector> projected(n);
    for (std::size_t a = 0; a < n; ++a) {
        DocumentVector& v = projected[a];
        v.basis = VectorBasis::kLsi;
        v.k_topics = k;
        if (tfidf[distinct[a]].entries.empty()) continue;  // zero column stays zero
        v.entries.reserve(static_cast<std::size_t>(k));
        for (int topic = 0; topic < k; ++topic) {
            Eigen::Index e = static_cast<Eigen::Index>(n) - 1 - topic;
            double sigma = std::sqrt(eigenvalues(e));
            v.entries.emplace_back(topic, sigma * eigenvectors(static_cast<Eigen::Index>(a), e));
        }
    }

    std::vector<DocumentVector> out(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) out[d] = projected[canonical[d]];
    return out;
}

double cosine(const DocumentVector& v_f, const DocumentVector& v_m) {
    if (v_f.basis != v_m.basis || v_f.k_topics != v_m.k_topics) {
        throw MeasureError("cosine undefined: vectors from different bases");
    }
    double norm_f = norm(v_f);
    double norm_m = norm(v_m);
    if (norm_f == 0.0 || norm_m == 0.0) {
        throw MeasureError("cosine undefined: zero-norm vector");
    }
    // Equal vectors are exactly the same direction; report that exactly
    // instead of leaking sqrt rounding into the identity case.
    if (v_f.entries == v_m.entries) return 1.0;
    double value = dot(v_f, v_m) / (norm_f * norm_m);
    return std::clamp(value, 0.0, 1.0);
}

TopicStatus apply_threshold(const MeasureSpec& spec, double score, double threshold) {
    constexpr double kTolerance = 1e-9;
    if (score < spec.range_min() - kTolerance || score > spec.range_max() + kTolerance) {
        throw UsageError(std::string("score out of range for measure ") +
                         std::string(spec.keyword) + ": " + std::to_string(score));
    }
    bool off = spec.direction == OfftopicDirection::kScoreBelowThreshold ? score < threshold
                                                                         : score > threshold;
    return off ? TopicStatus::kOffTopic : TopicStatus::kOnTopic;
}

TopicStatus apply_threshold(const MeasureSpec& spec, double score) {
    return apply_threshold(spec, score, spec.default_threshold);
}

}  // namespace otmt
