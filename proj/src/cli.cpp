#include "otmt/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "otmt/evaluation.hpp"

namespace otmt {

namespace {

const char kUsage[] =
    "usage: detect_off_topic [detect] -i <type>=<args> -o <file> [options]\n"
    "       detect_off_topic score-dump -i <type>=<args> -o <scores.csv> [options]\n"
    "       detect_off_topic sweep --scores <scores.csv> --gold <gold.csv> -o <curves.csv>\n"
    "                               [-tm <measures>] [--combine <m1>,<m2>]\n"
    "\n"
    "input types:\n"
    "  timemap=<uri-t>[,<uri-t>...]   one or more TimeMap URIs\n"
    "  warc=<file>[,<file>...]        one or more WARC files\n"
    "  archiveit=<collection-id>      a public Archive-It collection\n"
    "\n"
    "options:\n"
    "  -tm, --timemap-measures <m>[=<threshold>][,...]\n"
    "        measures: bytecount wordcount jaccard sorensen simhash-tf\n"
    "                  simhash-raw cosine gensim_lsi  (default: all, at\n"
    "                  calibrated default thresholds)\n"
    "  --format json|csv       report format (default json)\n"
    "  --cache-dir <dir>       fetch cache ($OTMT_CACHE_DIR, default .otmt_cache)\n"
    "  --concurrency <n>       TimeMaps evaluated in parallel (default 4)\n"
    "  --quiet                 suppress per-TimeMap progress\n";

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

CollectionSource parse_input_spec(const std::string& spec) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
        throw UsageError("input spec must look like <type>=<args>: " + spec);
    }
    std::string type = spec.substr(0, eq);
    std::string args = spec.substr(eq + 1);
    CollectionSource source;
    if (type == "timemap") source.kind = SourceKind::kTimemap;
    else if (type == "warc") source.kind = SourceKind::kWarc;
    else if (type == "archiveit") source.kind = SourceKind::kArchiveIt;
    else throw UsageError("unknown input type \"" + type + "\" (timemap, warc or archiveit)");

    for (std::string& arg : split(args, ',')) {
        if (!arg.empty()) source.arguments.push_back(std::move(arg));
    }
    if (source.arguments.empty()) throw UsageError("input spec has no arguments: " + spec);
    if (source.kind == SourceKind::kArchiveIt) {
        if (source.arguments.size() != 1) {
            throw UsageError("archiveit input takes exactly one collection id");
        }
        for (char c : source.arguments[0]) {
            if (c < '0' || c > '9') {
                throw UsageError("archiveit collection id must be a decimal integer: " +
                                 source.arguments[0]);
            }
        }
    }
    return source;
}

double parse_threshold(const MeasureSpec& spec, const std::string& text) {
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw UsageError("unparseable threshold for " + std::string(spec.keyword) + ": " + text);
    }
    if (value < spec.range_min() || value > spec.range_max()) {
        throw UsageError("threshold " + text + " outside the score range of " +
                         std::string(spec.keyword));
    }
    return value;
}

std::vector<MeasureSelection> parse_measure_list(const std::string& list) {
    std::vector<MeasureSelection> measures;
    std::set<MeasureId> seen;
    for (const std::string& item : split(list, ',')) {
        if (item.empty()) continue;
        std::size_t eq = item.find('=');
        std::string keyword = item.substr(0, eq);
        const MeasureSpec* spec = find_measure(keyword);
        if (!spec) throw UsageError("unknown measure keyword \"" + keyword + "\"");
        if (!seen.insert(spec->id).second) {
            throw UsageError("measure listed twice: " + keyword);
        }
        MeasureSelection sel;
        sel.id = spec->id;
        if (eq != std::string::npos) {
            sel.threshold = parse_threshold(*spec, item.substr(eq + 1));
        }
        measures.push_back(sel);
    }
    if (measures.empty()) throw UsageError("empty measure list");
    return measures;
}

MeasureId parse_measure_keyword(const std::string& keyword) {
    const MeasureSpec* spec = find_measure(keyword);
    if (!spec) throw UsageError("unknown measure keyword \"" + keyword + "\"");
    return spec->id;
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& args) {
    CliInvocation inv;
    std::size_t i = 0;
    if (i < args.size() && !args[i].starts_with("-")) {
        if (args[i] == "detect") inv.subcommand = Subcommand::kDetect;
        else if (args[i] == "sweep") inv.subcommand = Subcommand::kSweep;
        else if (args[i] == "score-dump") inv.subcommand = Subcommand::kScoreDump;
        else throw UsageError("unknown subcommand \"" + args[i] + "\"");
        ++i;
    }

    auto take_value = [&](const std::string& flag, const std::string& arg,
                          std::optional<std::string> inline_value) -> std::string {
        if (inline_value) return *inline_value;
        if (i + 1 >= args.size()) throw UsageError("missing value for " + flag + " (" + arg + ")");
        return args[++i];
    };

    for (; i < args.size(); ++i) {
        std::string arg = args[i];
        std::optional<std::string> inline_value;
        std::string flag = arg;
        if (arg.starts_with("--")) {
            std::size_t eq = arg.find('=');
            if (eq != std::string::npos) {
                flag = arg.substr(0, eq);
                inline_value = arg.substr(eq + 1);
            }
        }

        if (flag == "-i" || flag == "--input") {
            inv.source = parse_input_spec(take_value(flag, arg, inline_value));
        } else if (flag == "-o" || flag == "--output") {
            inv.output = take_value(flag, arg, inline_value);
        } else if (flag == "-tm" || flag == "--timemap-measures") {
            inv.measures = parse_measure_list(take_value(flag, arg, inline_value));
        } else if (flag == "--format") {
            std::string value = take_value(flag, arg, inline_value);
            if (value == "json") inv.format = OutputFormat::kJson;
            else if (value == "csv") inv.format = OutputFormat::kCsv;
            else throw UsageError("unknown format \"" + value + "\" (json or csv)");
        } else if (flag == "--cache-dir") {
            inv.cache_dir = take_value(flag, arg, inline_value);
        } else if (flag == "--concurrency") {
            std::string value = take_value(flag, arg, inline_value);
            try {
                int n = std::stoi(value);
                if (n < 1) throw std::invalid_argument(value);
                inv.concurrency = n;
            } catch (const std::exception&) {
                throw UsageError("bad --concurrency value \"" + value + "\"");
            }
        } else if (flag == "--scores") {
            inv.scores_path = take_value(flag, arg, inline_value);
        } else if (flag == "--gold") {
            inv.gold_path = take_value(flag, arg, inline_value);
        } else if (flag == "--combine") {
            std::string value = take_value(flag, arg, inline_value);
            auto parts = split(value, ',');
            if (parts.size() != 2) throw UsageError("--combine takes exactly two measures");
            inv.combine = {parse_measure_keyword(parts[0]), parse_measure_keyword(parts[1])};
        } else if (flag == "--quiet") {
            // handled by run_cli; accepted here so parse_args stays total
        } else if (flag == "-h" || flag == "--help") {
            throw UsageError(kUsage);
        } else {
            throw UsageError("unknown argument \"" + arg + "\"");
        }
    }

    switch (inv.subcommand) {
        case Subcommand::kDetect:
        case Subcommand::kScoreDump:
            if (!inv.source) throw UsageError("missing required -i <type>=<args>");
            if (!inv.output) throw UsageError("missing required -o <output-file>");
            break;
        case Subcommand::kSweep:
            if (!inv.scores_path) throw UsageError("sweep: missing required --scores <file>");
            if (!inv.gold_path) throw UsageError("sweep: missing required --gold <file>");
            if (!inv.output) throw UsageError("sweep: missing required -o <curves-file>");
            break;
    }
    return inv;
}

namespace {

std::vector<MeasureSelection> all_measures() {
    std::vector<MeasureSelection> out;
    for (const MeasureSpec& spec : measure_table()) out.push_back({spec.id, std::nullopt});
    return out;
}

RunConfig build_run_config(const CliInvocation& inv, bool quiet) {
    RunConfig cfg;
    cfg.source = *inv.source;
    cfg.measures = inv.measures.empty() ? all_measures() : inv.measures;
    cfg.output_path = *inv.output;
    cfg.output_format = inv.format;
    cfg.quiet = quiet;
    if (inv.concurrency) cfg.concurrency_limit = *inv.concurrency;

    if (inv.cache_dir) {
        cfg.cache_dir = *inv.cache_dir;
    } else if (const char* env = std::getenv("OTMT_CACHE_DIR"); env && *env) {
        cfg.cache_dir = env;
    }
    if (const char* env = std::getenv("OTMT_USER_AGENT"); env && *env) {
        cfg.fetcher.user_agent = env;
    }
    return cfg;
}

int run_detect(const CliInvocation& inv, bool quiet) {
    RunConfig cfg = build_run_config(inv, quiet);
    CollectionReport report = run_collection(cfg);

    std::size_t mementos = 0, off_topic = 0;
    for (const auto& [uri_t, entries] : report.timemaps) {
        mementos += entries.size();
        for (const auto& [uri_m, entry] : entries) {
            if (entry.overall_topic_status == TopicStatus::kOffTopic) ++off_topic;
        }
    }
    if (!quiet) {
        std::cerr << report.timemaps.size() << " TimeMap(s), " << mementos << " memento(s), "
                  << off_topic << " off-topic; report written to " << inv.output->string() << "\n";
    }
    return kExitOk;
}

int run_score_dump(const CliInvocation& inv, bool quiet) {
    RunConfig cfg = build_run_config(inv, quiet);
    cfg.output_path.clear();  // scores only, no report file
    ResolvedCollection resolved = resolve_collection(cfg);
    CollectionReport report = evaluate_collection(resolved, cfg);
    if (report.timemaps.empty()) throw TotalFailureError("no TimeMap could be scored");
    std::vector<ScoreRow> rows = collect_scores(report);
    write_score_file(rows, *inv.output);
    if (!quiet) {
        std::cerr << rows.size() << " score(s) written to " << inv.output->string() << "\n";
    }
    return kExitOk;
}

int run_sweep(const CliInvocation& inv) {
    std::vector<ScoreRow> rows = load_score_file(*inv.scores_path);
    if (rows.empty()) throw EmptyInputError("score file has no rows: " + inv.scores_path->string());
    std::vector<GoldLabel> labels = load_gold_standard(*inv.gold_path);

    // score map per measure; first row wins for a duplicated URI-M
    std::map<std::string, std::map<std::string, double>> by_measure;
    for (const ScoreRow& row : rows) {
        by_measure[row.measure].try_emplace(row.uri_m, row.score);
    }

    std::vector<std::string> keywords;
    if (inv.measures.empty()) {
        for (const auto& [measure, scores] : by_measure) keywords.push_back(measure);
    } else {
        for (const MeasureSelection& sel : inv.measures) {
            keywords.push_back(std::string(measure_spec(sel.id).keyword));
        }
    }

    std::ofstream curves(*inv.output, std::ios::binary);
    if (!curves) throw IoError("cannot write " + inv.output->string());
    bool first_curve = true;
    for (const std::string& keyword : keywords) {
        const MeasureSpec* spec = find_measure(keyword);
        if (!spec) throw UsageError("score file contains unknown measure \"" + keyword + "\"");
        auto it = by_measure.find(keyword);
        if (it == by_measure.end()) {
            throw EmptyInputError("score file has no rows for measure " + keyword);
        }
        std::vector<std::string> gaps;
        SweepResult result =
            sweep(it->second, labels, default_sweep_spec(spec->id), spec->direction, &gaps);
        std::string csv = sweep_curve_csv(keyword, result);
        if (!first_curve) {
            // drop the repeated header
            csv.erase(0, csv.find('\n') + 1);
        }
        curves << csv;
        first_curve = false;

        std::cout << keyword << " best_threshold=" << result.best_threshold
                  << " f1=" << (result.best_f1 ? std::to_string(*result.best_f1) : "undefined")
                  << " accuracy="
                  << (result.best_accuracy ? std::to_string(*result.best_accuracy) : "undefined");
        if (!gaps.empty()) std::cout << " (labels without scores: " << gaps.size() << ")";
        std::cout << "\n";
    }

    if (inv.combine) {
        const MeasureSpec& spec_a = measure_spec(inv.combine->first);
        const MeasureSpec& spec_b = measure_spec(inv.combine->second);
        auto it_a = by_measure.find(std::string(spec_a.keyword));
        auto it_b = by_measure.find(std::string(spec_b.keyword));
        if (it_a == by_measure.end() || it_b == by_measure.end()) {
            throw EmptyInputError("score file lacks rows for a --combine measure");
        }
        PairGridResult best = grid_search_pair(it_a->second, default_sweep_spec(spec_a.id),
                                               spec_a.direction, it_b->second,
                                               default_sweep_spec(spec_b.id), spec_b.direction,
                                               labels);
        std::cout << "combine " << spec_a.keyword << "+" << spec_b.keyword << " best_thresholds=("
                  << best.threshold_a << ", " << best.threshold_b << ")"
                  << " f1=" << (best.f1 ? std::to_string(*best.f1) : "undefined") << " accuracy="
                  << (best.accuracy ? std::to_string(*best.accuracy) : "undefined") << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    bool quiet = false;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--quiet") quiet = true;
        args.push_back(std::move(arg));
    }
    for (const std::string& arg : args) {
        if (arg == "-h" || arg == "--help") {
            std::cout << kUsage;
            return kExitOk;
        }
    }
    try {
        CliInvocation inv = parse_args(args);
        switch (inv.subcommand) {
            case Subcommand::kDetect: return run_detect(inv, quiet);
            case Subcommand::kScoreDump: return run_score_dump(inv, quiet);
            case Subcommand::kSweep: return run_sweep(inv);
        }
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        if (std::string_view(e.what()) != kUsage) std::cerr << "\n" << kUsage;
        return kExitUsage;
    } catch (const EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTotalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTotalFailure;
    }
}

}  // namespace otmt
