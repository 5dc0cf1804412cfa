#ifndef OTMT_CLI_HPP
#define OTMT_CLI_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "otmt/engine.hpp"

namespace otmt {

enum class Subcommand { kDetect, kSweep, kScoreDump };

// Parsed command line. The detect subcommand keeps the historical flag
// grammar (-i <type>=<args> -o <file> -tm <measure>[=<threshold>],...);
// sweep and score-dump expose the calibration workflow on top of it.
struct CliInvocation {
    Subcommand subcommand = Subcommand::kDetect;
    std::optional<CollectionSource> source;
    std::optional<std::filesystem::path> output;
    std::vector<MeasureSelection> measures;  // empty -> all measures at defaults
    OutputFormat format = OutputFormat::kJson;
    std::optional<std::filesystem::path> cache_dir;
    std::optional<int> concurrency;
    // sweep inputs
    std::optional<std::filesystem::path> scores_path;
    std::optional<std::filesystem::path> gold_path;
    std::optional<std::pair<MeasureId, MeasureId>> combine;
};

// Exit codes shared by the CLI and its tests.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitEmptyInput = 3;
inline constexpr int kExitTotalFailure = 4;

// Parses everything after the program name. Throws UsageError on any
// malformed input; never crashes on arbitrary argv contents.
CliInvocation parse_args(const std::vector<std::string>& args);

// Full dispatch: parse, wire config (flags > environment > defaults), run
// the requested subcommand, map errors to exit codes.
int run_cli(int argc, char** argv);

}  // namespace otmt

#endif  // OTMT_CLI_HPP
