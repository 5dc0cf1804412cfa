#ifndef OTMT_ACQUISITION_HPP
#define OTMT_ACQUISITION_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "otmt/core.hpp"

namespace otmt {

struct FetchRecord {
    std::string uri;         // as requested
    std::string final_uri;   // after redirects
    int status_code = 0;
    std::string content_type;
    std::string body;
    std::int64_t fetched_at = 0;  // UTC epoch seconds
    bool from_cache = false;
};

enum class SourceKind { kTimemap, kWarc, kArchiveIt };

struct CollectionSource {
    SourceKind kind = SourceKind::kTimemap;
    std::vector<std::string> arguments;  // URI-Ts, WARC paths, or one collection id
};

// Result of rewriting a URI-M to its raw (unaugmented) form. is_archival is
// false when the URI did not match the wayback pattern and was passed
// through untouched.
struct RawMementoUri {
    std::string uri;
    bool is_archival = false;
};

// Appends the id_ marker to the 14-digit datetime segment of a wayback-style
// URI-M so the archive serves the capture without banner or rewriting.
// Idempotent; non-matching URIs come back unchanged.
RawMementoUri raw_memento_uri(std::string_view uri_m);

struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string target;  // path + query, "/" at minimum
};

std::optional<UrlParts> split_url(std::string_view url);
std::string sha256_hex(std::string_view data);

// On-disk fetch cache: bodies live in objects/<content-digest>, lookups go
// through manifest.jsonl (uri -> digest, status, content type, timestamp).
// Append-only manifest; the latest line for a URI wins. Safe for concurrent
// use from one process.
class FetchCache {
public:
    explicit FetchCache(std::filesystem::path dir);

    std::optional<FetchRecord> lookup(const std::string& uri) const;
    void store(const FetchRecord& record);
    const std::filesystem::path& dir() const { return dir_; }

private:
    struct ManifestEntry {
        std::string digest;
        int status_code = 0;
        std::string content_type;
        std::int64_t fetched_at = 0;
        std::string final_uri;
    };

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, ManifestEntry> manifest_;
};

struct FetcherOptions {
    std::string user_agent = "otmt/1.0";
    int max_redirects = 10;
    int max_retries = 3;  // retries after the first attempt, transient failures only
    std::chrono::milliseconds retry_backoff{500};
    std::chrono::milliseconds per_host_spacing{250};
    int per_host_concurrency = 4;
    std::chrono::seconds read_timeout{30};
    bool throttle_loopback = false;  // politeness is for remote archives
};

// Anything that can turn a URI into bytes: the HTTP fetcher, the WARC
// content store, or a chain of both.
class ContentProvider {
public:
    virtual ~ContentProvider() = default;
    // Throws FetchError on failure; success implies a body.
    virtual FetchRecord fetch(const std::string& uri) = 0;
};

// HTTP/1.1 client with redirect following (bounded), retry with exponential
// backoff on transient failures, per-host politeness (concurrency cap plus
// minimum spacing between request starts) and an optional persistent cache.
class HttpFetcher : public ContentProvider {
public:
    explicit HttpFetcher(FetchCache* cache = nullptr, FetcherOptions options = {});

    FetchRecord fetch(const std::string& uri) override;

private:
    struct HostState {
        std::mutex mu;
        std::condition_variable cv;
        int active = 0;
        std::chrono::steady_clock::time_point next_allowed{};
    };

    HostState& host_state(const std::string& host);
    FetchRecord fetch_once(const std::string& uri);

    FetchCache* cache_;
    FetcherOptions options_;
    std::mutex hosts_mu_;
    std::unordered_map<std::string, std::unique_ptr<HostState>> hosts_;
};

// In-memory URI -> body map, filled by WARC ingestion and by tests.
class MemoryContentStore : public ContentProvider {
public:
    void put(const std::string& uri, std::string body, std::string content_type,
             std::int64_t fetched_at);
    bool contains(const std::string& uri) const;
    FetchRecord fetch(const std::string& uri) override;

private:
    struct Entry {
        std::string body;
        std::string content_type;
        std::int64_t fetched_at = 0;
    };
    mutable std::mutex mu_;
    std::unordered_map<std::string, Entry> entries_;
};

// Store first, network second.
class ChainProvider : public ContentProvider {
public:
    ChainProvider(std::shared_ptr<ContentProvider> first, std::shared_ptr<ContentProvider> second)
        : first_(std::move(first)), second_(std::move(second)) {}
    FetchRecord fetch(const std::string& uri) override;

private:
    std::shared_ptr<ContentProvider> first_;
    std::shared_ptr<ContentProvider> second_;
};

struct ArchiveItOptions {
    std::string portal_base = "https://archive-it.org";
    std::string wayback_base = "http://wayback.archive-it.org";
};

// Scrapes the public seed listing of an Archive-It collection, following
// ?page=N pagination until a page adds nothing new. Seeds are the href of
// anchors inside elements whose class list contains a "url" token, the
// layout the portal has used for its seed listings.
std::vector<std::string> discover_archiveit_seeds(const std::string& collection_id,
                                                  ContentProvider& http,
                                                  const ArchiveItOptions& options = {});

std::string archiveit_timemap_uri(const std::string& collection_id, const std::string& seed,
                                  const ArchiveItOptions& options = {});

}  // namespace otmt

#endif  // OTMT_ACQUISITION_HPP
