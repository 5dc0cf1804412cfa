#include "otmt/engine.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "otmt/timemap.hpp"
#include "otmt/warc.hpp"

namespace otmt {

namespace {

constexpr double kNanScore = std::numeric_limits<double>::quiet_NaN();

struct FetchedMemento {
    MementoDocument doc;
    bool ok = false;
    std::string error;
    std::string decoded_text;         // raw decoded, no boilerplate removal
    std::set<std::string> token_set;  // distinct tokens, for the set measures
};

PreprocessingFlags flags_for(const MeasureSpec& spec, const PreprocessConfig& cfg) {
    if (!spec.requires_preprocessing) return {};
    PreprocessingFlags flags;
    flags.removed_boilerplate = cfg.boilerplate == PreprocessConfig::Boilerplate::kHeuristicBlocks;
    flags.tokenized = true;
    flags.stemmed = cfg.stemmer == PreprocessConfig::Stemmer::kPorter;
    return flags;
}

MeasureResult error_result(const MeasureSpec& spec, double threshold,
                           const PreprocessConfig& cfg, std::string message) {
    MeasureResult result;
    result.measure_id = std::string(spec.keyword);
    result.comparison_score = kNanScore;
    result.threshold = threshold;
    result.topic_status = TopicStatus::kOnTopic;  // conservative default for unmeasurable pairs
    result.flags = flags_for(spec, cfg);
    result.error = std::move(message);
    return result;
}

FetchedMemento acquire(const MementoRef& ref, const RunConfig& cfg, ContentProvider& content,
                       bool need_text, bool need_tokens) {
    FetchedMemento fetched;
    fetched.doc.ref = ref;
    try {
        RawMementoUri raw = raw_memento_uri(ref.uri_m);
        FetchRecord record = content.fetch(raw.uri);
        fetched.doc.raw_bytes = std::move(record.body);
        fetched.doc.content_type = std::move(record.content_type);
        fetched.ok = true;
    } catch (const Error& e) {
        fetched.error = e.what();
        return fetched;
    }
    MementoDocument& doc = fetched.doc;
    if (need_text) {
        fetched.decoded_text = decode_to_utf8(doc.raw_bytes, doc.content_type);
    }
    if (need_tokens) {
        bool strip = cfg.preprocess.boilerplate == PreprocessConfig::Boilerplate::kHeuristicBlocks;
        doc.extracted_text = strip ? remove_boilerplate(doc.raw_bytes, doc.content_type)
                                   : decode_to_utf8(doc.raw_bytes, doc.content_type);
        doc.tokens = tokenize(*doc.extracted_text, cfg.preprocess);
        doc.term_frequencies = term_frequencies(*doc.tokens);
        doc.flags.removed_boilerplate = strip;
        doc.flags.tokenized = true;
        doc.flags.stemmed = cfg.preprocess.stemmer == PreprocessConfig::Stemmer::kPorter;
        fetched.token_set.insert(doc.tokens->begin(), doc.tokens->end());
    }
    return fetched;
}

}  // namespace

std::map<std::string, std::vector<MeasureResult>> evaluate_timemap(const TimeMap& tm,
                                                                   const RunConfig& cfg,
                                                                   ContentProvider& content) {
    if (tm.mementos.empty()) throw UsageError("evaluate_timemap: empty TimeMap " + tm.uri_t);
    if (cfg.measures.empty()) throw UsageError("evaluate_timemap: no measures configured");

    bool need_text = false;
    bool need_tokens = false;
    bool need_tfidf = false;
    bool need_lsi = false;
    for (const MeasureSelection& sel : cfg.measures) {
        switch (sel.id) {
            case MeasureId::kSimhashRaw: need_text = true; break;
            case MeasureId::kBytecount: break;
            case MeasureId::kCosine: need_tokens = true; need_tfidf = true; break;
            case MeasureId::kGensimLsi: need_tokens = true; need_lsi = true; break;
            default: need_tokens = true; break;
        }
    }

    const MementoRef& first_ref = first_memento(tm);
    FetchedMemento first = acquire(first_ref, cfg, content, need_text, need_tokens);
    if (!first.ok) {
        throw FetchError("first memento unfetchable (" + first_ref.uri_m + "): " + first.error);
    }

    // Considered mementos, first included, duplicates by URI-M dropped.
    std::vector<FetchedMemento> docs;
    std::set<std::string> seen;
    for (const MementoRef& ref : tm.mementos) {
        if (!seen.insert(ref.uri_m).second) continue;
        if (ref.uri_m == first_ref.uri_m) {
            docs.push_back(first);
        } else {
            docs.push_back(acquire(ref, cfg, content, need_text, need_tokens));
        }
    }

    // Corpus models over every successfully fetched memento of this TimeMap.
    std::vector<std::size_t> corpus_docs;
    std::vector<std::vector<std::string>> corpus_tokens;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].ok) {
            corpus_docs.push_back(i);
            corpus_tokens.push_back(docs[i].doc.tokens.value_or(std::vector<std::string>{}));
        }
    }
    std::vector<DocumentVector> tfidf, lsi;
    std::string tfidf_error, lsi_error;
    std::size_t first_corpus_index = 0;
    for (std::size_t c = 0; c < corpus_docs.size(); ++c) {
        if (docs[corpus_docs[c]].doc.ref.uri_m == first.doc.ref.uri_m) first_corpus_index = c;
    }
    if (need_tfidf) {
        try {
            tfidf = tfidf_vectors(corpus_tokens);
        } catch (const Error& e) {
            tfidf_error = e.what();
        }
    }
    if (need_lsi) {
        try {
            lsi = lsi_vectors(corpus_tokens, cfg.lsi_topics);
        } catch (const Error& e) {
            lsi_error = e.what();
        }
    }

    std::map<std::string, std::vector<MeasureResult>> out;
    std::map<std::string, std::size_t> corpus_index;
    for (std::size_t c = 0; c < corpus_docs.size(); ++c) {
        corpus_index[docs[corpus_docs[c]].doc.ref.uri_m] = c;
    }

    const std::vector<std::string> no_tokens;
    const std::map<std::string, int> no_tf;
    for (const FetchedMemento& m : docs) {
        std::vector<MeasureResult>& results = out[m.doc.ref.uri_m];
        for (const MeasureSpec& spec : measure_table()) {
            const MeasureSelection* sel = nullptr;
            for (const MeasureSelection& s : cfg.measures) {
                if (s.id == spec.id) sel = &s;
            }
            if (!sel) continue;
            double threshold = sel->effective_threshold();

            if (!m.ok) {
                results.push_back(
                    error_result(spec, threshold, cfg.preprocess, "fetch failed: " + m.error));
                continue;
            }
            try {
                double score = 0.0;
                switch (spec.id) {
                    case MeasureId::kBytecount:
                        score = count_distance(
                            static_cast<std::int64_t>(first.doc.raw_bytes.size()),
                            static_cast<std::int64_t>(m.doc.raw_bytes.size()));
                        break;
                    case MeasureId::kWordcount:
                        score = count_distance(
                            static_cast<std::int64_t>(first.doc.tokens.value_or(no_tokens).size()),
                            static_cast<std::int64_t>(m.doc.tokens.value_or(no_tokens).size()));
                        break;
                    case MeasureId::kJaccard:
                        score = jaccard_distance(first.token_set, m.token_set);
                        break;
                    case MeasureId::kSorensen:
                        score = sorensen_distance(first.token_set, m.token_set);
                        break;
                    case MeasureId::kSimhashTf:
                        score = hamming(simhash_tf(first.doc.term_frequencies.value_or(no_tf)),
                                        simhash_tf(m.doc.term_frequencies.value_or(no_tf)));
                        break;
                    case MeasureId::kSimhashRaw:
                        score = hamming(simhash_raw(first.decoded_text),
                                        simhash_raw(m.decoded_text));
                        break;
                    case MeasureId::kCosine: {
                        if (!tfidf_error.empty()) throw MeasureError(tfidf_error);
                        score = cosine(tfidf[first_corpus_index],
                                       tfidf[corpus_index.at(m.doc.ref.uri_m)]);
                        break;
                    }
                    case MeasureId::kGensimLsi: {
                        if (!lsi_error.empty()) throw MeasureError(lsi_error);
                        score = cosine(lsi[first_corpus_index],
                                       lsi[corpus_index.at(m.doc.ref.uri_m)]);
                        break;
                    }
                }
                MeasureResult result;
                result.measure_id = std::string(spec.keyword);
                result.comparison_score = score;
                result.threshold = threshold;
                result.topic_status = apply_threshold(spec, score, threshold);
                result.flags = flags_for(spec, cfg.preprocess);
                results.push_back(std::move(result));
            } catch (const Error& e) {
                results.push_back(error_result(spec, threshold, cfg.preprocess, e.what()));
            }
        }
    }
    return out;
}

ResolvedCollection resolve_collection(const RunConfig& cfg) {
    ResolvedCollection resolved;
    switch (cfg.source.kind) {
        case SourceKind::kTimemap:
        case SourceKind::kArchiveIt: {
            auto cache = std::make_shared<FetchCache>(cfg.cache_dir);
            struct CachingFetcher : HttpFetcher {
                using HttpFetcher::HttpFetcher;
                std::shared_ptr<FetchCache> keepalive;
            };
            auto fetcher = std::make_shared<CachingFetcher>(cache.get(), cfg.fetcher);
            fetcher->keepalive = cache;
            resolved.provider = fetcher;

            std::vector<std::string> uri_ts;
            if (cfg.source.kind == SourceKind::kArchiveIt) {
                if (cfg.source.arguments.size() != 1) {
                    throw UsageError("archiveit input takes exactly one collection id");
                }
                std::vector<std::string> seeds =
                    discover_archiveit_seeds(cfg.source.arguments[0], *fetcher, cfg.archiveit);
                for (const std::string& seed : seeds) {
                    uri_ts.push_back(
                        archiveit_timemap_uri(cfg.source.arguments[0], seed, cfg.archiveit));
                }
            } else {
                uri_ts = cfg.source.arguments;
            }
            if (uri_ts.empty()) throw EmptyInputError("no TimeMap URIs to process");
            for (const std::string& uri_t : uri_ts) {
                try {
                    FetchRecord record = resolved.provider->fetch(uri_t);
                    resolved.timemaps.push_back(parse_link_timemap(record.body, uri_t));
                } catch (const Error& e) {
                    resolved.failures.emplace_back(uri_t, e.what());
                }
            }
            break;
        }
        case SourceKind::kWarc: {
            if (cfg.source.arguments.empty()) throw UsageError("warc input needs at least one file");
            std::vector<std::filesystem::path> files(cfg.source.arguments.begin(),
                                                     cfg.source.arguments.end());
            WarcIngest ingest = ingest_warc(files);
            resolved.timemaps = std::move(ingest.timemaps);
            resolved.provider = ingest.store;
            break;
        }
    }
    if (resolved.timemaps.empty() && resolved.failures.empty()) {
        throw EmptyInputError("source resolved to zero TimeMaps");
    }
    return resolved;
}

CollectionReport evaluate_collection(const ResolvedCollection& resolved, const RunConfig& cfg) {
    CollectionReport report;
    for (const auto& [uri_t, reason] : resolved.failures) {
        report.errors[uri_t]["*"] = reason;
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    const std::size_t total = resolved.timemaps.size();

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            const TimeMap& tm = resolved.timemaps[i];
            try {
                auto results = evaluate_timemap(tm, cfg, *resolved.provider);
                std::lock_guard lock(mu);
                auto& entries = report.timemaps[tm.uri_t];
                for (auto& [uri_m, measure_results] : results) {
                    MementoReportEntry entry;
                    entry.overall_topic_status = overall_topic_status(measure_results);
                    for (MeasureResult& r : measure_results) {
                        if (r.error) report.errors[tm.uri_t][uri_m] = *r.error;
                        entry.timemap_measures.emplace(r.measure_id, std::move(r));
                    }
                    entries.emplace(uri_m, std::move(entry));
                }
            } catch (const Error& e) {
                std::lock_guard lock(mu);
                report.errors[tm.uri_t]["*"] = e.what();
            }
            std::size_t finished = done.fetch_add(1) + 1;
            if (!cfg.quiet) {
                std::lock_guard lock(mu);
                std::cerr << "[" << finished << "/" << total << "] " << tm.uri_t << " ("
                          << tm.mementos.size() << " mementos)\n";
            }
        }
    };

    std::size_t threads = std::min<std::size_t>(
        total, static_cast<std::size_t>(std::max(1, cfg.concurrency_limit)));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return report;
}

CollectionReport run_collection(const RunConfig& cfg) {
    if (cfg.measures.empty()) throw UsageError("no measures configured");
    ResolvedCollection resolved = resolve_collection(cfg);
    CollectionReport report = evaluate_collection(resolved, cfg);
    if (report.timemaps.empty()) {
        std::string detail;
        for (const auto& [uri_t, entries] : report.errors) {
            for (const auto& [key, msg] : entries) {
                detail += "\n  " + uri_t + ": " + msg;
            }
        }
        throw TotalFailureError("no TimeMap could be scored" + detail);
    }
    if (!cfg.output_path.empty()) write_report(report, cfg.output_format, cfg.output_path);
    return report;
}

namespace {

nlohmann::ordered_json score_to_json(const MeasureResult& result) {
    if (result.error || std::isnan(result.comparison_score)) return nullptr;
    const MeasureSpec* spec = find_measure(result.measure_id);
    if (spec && spec->integral_score()) {
        return static_cast<std::int64_t>(result.comparison_score);
    }
    return result.comparison_score;
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += "\"";
    return quoted;
}

std::string score_to_csv(const MeasureResult& result) {
    if (result.error || std::isnan(result.comparison_score)) return "";
    return score_to_json(result).dump();
}

}  // namespace

std::string report_to_json(const CollectionReport& report) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& [uri_t, entries] : report.timemaps) {
        nlohmann::ordered_json tm_node = nlohmann::ordered_json::object();
        for (const auto& [uri_m, entry] : entries) {
            nlohmann::ordered_json measures = nlohmann::ordered_json::object();
            for (const auto& [measure, result] : entry.timemap_measures) {
                nlohmann::ordered_json m;
                m["stemmed"] = result.flags.stemmed;
                m["tokenized"] = result.flags.tokenized;
                m["removed boilerplate"] = result.flags.removed_boilerplate;
                m["comparison score"] = score_to_json(result);
                m["topic status"] = std::string(to_string(result.topic_status));
                if (result.error) m["error"] = *result.error;
                measures[measure] = std::move(m);
            }
            nlohmann::ordered_json memento_node;
            memento_node["timemap measures"] = std::move(measures);
            memento_node["overall topic status"] = std::string(to_string(entry.overall_topic_status));
            tm_node[uri_m] = std::move(memento_node);
        }
        root[uri_t] = std::move(tm_node);
    }
    if (!report.errors.empty()) {
        nlohmann::ordered_json errors = nlohmann::ordered_json::object();
        for (const auto& [uri_t, entries] : report.errors) {
            for (const auto& [uri_m, message] : entries) {
                errors[uri_t][uri_m] = message;
            }
        }
        root["errors"] = std::move(errors);
    }
    return root.dump(4) + "\n";
}

std::string report_to_csv(const CollectionReport& report) {
    std::ostringstream out;
    out << "uri_t,uri_m,measure,stemmed,tokenized,removed_boilerplate,comparison_score,"
           "topic_status,overall_topic_status\n";
    for (const auto& [uri_t, entries] : report.timemaps) {
        for (const auto& [uri_m, entry] : entries) {
            for (const auto& [measure, result] : entry.timemap_measures) {
                out << csv_field(uri_t) << ',' << csv_field(uri_m) << ',' << csv_field(measure)
                    << ',' << (result.flags.stemmed ? "true" : "false") << ','
                    << (result.flags.tokenized ? "true" : "false") << ','
                    << (result.flags.removed_boilerplate ? "true" : "false") << ','
                    << score_to_csv(result) << ',' << to_string(result.topic_status) << ','
                    << to_string(entry.overall_topic_status) << '\n';
            }
        }
    }
    return out.str();
}

void write_report(const CollectionReport& report, OutputFormat format,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report to " + path.string());
    out << (format == OutputFormat::kJson ? report_to_json(report) : report_to_csv(report));
    if (!out) throw IoError("short write to " + path.string());
}

std::vector<ScoreRow> collect_scores(const CollectionReport& report) {
    std::vector<ScoreRow> rows;
    for (const auto& [uri_t, entries] : report.timemaps) {
        for (const auto& [uri_m, entry] : entries) {
            for (const auto& [measure, result] : entry.timemap_measures) {
                if (result.error || std::isnan(result.comparison_score)) continue;
                rows.push_back({uri_t, uri_m, measure, result.comparison_score});
            }
        }
    }
    return rows;
}

void write_score_file(const std::vector<ScoreRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write score file to " + path.string());
    out << "uri_t,uri_m,measure,score\n";
    for (const ScoreRow& row : rows) {
        out << csv_field(row.uri_t) << ',' << csv_field(row.uri_m) << ',' << csv_field(row.measure)
            << ',' << nlohmann::json(row.score).dump() << '\n';
    }
}

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

}  // namespace

std::vector<ScoreRow> load_score_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read score file " + path.string());
    std::vector<ScoreRow> rows;
    std::string line;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 4 fields (uri_t, uri_m, measure, score)");
        }
        try {
            rows.push_back({fields[0], fields[1], fields[2], std::stod(fields[3])});
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": unparseable score \"" + fields[3] + "\"");
        }
    }
    return rows;
}

}  // namespace otmt
