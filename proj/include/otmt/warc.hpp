#ifndef OTMT_WARC_HPP
#define OTMT_WARC_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "otmt/acquisition.hpp"
#include "otmt/core.hpp"

namespace otmt {

struct WarcRecord {
    std::string type;        // WARC-Type
    std::string target_uri;  // WARC-Target-URI, angle brackets stripped
    std::int64_t date = 0;   // WARC-Date
    std::map<std::string, std::string> headers;
    std::string block;       // raw record block (an HTTP message for responses)
};

// Reads all records of one WARC file, plain or gzip (one member per record
// or whole-file). Records with malformed headers are skipped with a warning
// after resyncing on the next version line.
std::vector<WarcRecord> read_warc(const std::filesystem::path& file,
                                  std::vector<std::string>* warnings = nullptr);

struct HttpMessage {
    int status_code = 0;
    std::string content_type;
    std::string body;
};

// Parses the HTTP response stored in a WARC response block, undoing chunked
// transfer encoding when present.
std::optional<HttpMessage> parse_http_response(std::string_view block);

struct WarcIngest {
    std::vector<TimeMap> timemaps;
    std::shared_ptr<MemoryContentStore> store;
};

// Groups 200-status response records by target URI into one TimeMap per
// original resource; payload bodies land in the content store under
// synthetic warc:// URI-Ms so later fetches never touch the network.
WarcIngest ingest_warc(const std::vector<std::filesystem::path>& files,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace otmt

#endif  // OTMT_WARC_HPP
