#include "otmt/acquisition.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace otmt {

namespace {

std::int64_t now_epoch() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

bool is_loopback_host(const std::string& host) {
    return host == "localhost" || host == "::1" || host.starts_with("127.");
}

// Resolves a Location header against the URL it came from. Handles absolute,
// scheme-relative, absolute-path and bare relative forms.
std::string resolve_location(const std::string& location, const UrlParts& base) {
    if (location.find("://") != std::string::npos) return location;
    std::string origin = base.scheme + "://" + base.host;
    bool default_port = (base.scheme == "http" && base.port == 80) ||
                        (base.scheme == "https" && base.port == 443);
    if (!default_port) origin += ":" + std::to_string(base.port);
    if (location.starts_with("//")) return base.scheme + ":" + location;
    if (location.starts_with("/")) return origin + location;
    std::string path = base.target;
    std::size_t q = path.find('?');
    if (q != std::string::npos) path.resize(q);
    std::size_t slash = path.rfind('/');
    path.resize(slash == std::string::npos ? 0 : slash + 1);
    return origin + path + location;
}

}  // namespace

RawMementoUri raw_memento_uri(std::string_view uri_m) {
    static const std::regex kWayback(R"(^(https?://[^/]+/\d+/)(\d{14})(id_)?(/.+)$)");
    std::string uri(uri_m);
    std::smatch match;
    if (!std::regex_match(uri, match, kWayback)) {
        return {uri, false};
    }
    if (match[3].matched) return {uri, true};  // already raw
    return {match[1].str() + match[2].str() + "id_" + match[4].str(), true};
}

std::optional<UrlParts> split_url(std::string_view url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) return std::nullopt;
    UrlParts parts;
    parts.scheme = std::string(url.substr(0, scheme_end));
    std::transform(parts.scheme.begin(), parts.scheme.end(), parts.scheme.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (parts.scheme != "http" && parts.scheme != "https") return std::nullopt;
    std::string_view rest = url.substr(scheme_end + 3);
    std::size_t path_start = rest.find('/');
    std::string_view authority = path_start == std::string_view::npos ? rest : rest.substr(0, path_start);
    parts.target = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
    std::size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        parts.host = std::string(authority.substr(0, colon));
        int port = 0;
        for (char c : authority.substr(colon + 1)) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            port = port * 10 + (c - '0');
        }
        parts.port = port;
    } else {
        parts.host = std::string(authority);
        parts.port = parts.scheme == "https" ? 443 : 80;
    }
    if (parts.host.empty()) return std::nullopt;
    return parts;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

FetchCache::FetchCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_ / "objects");
    std::ifstream manifest(dir_ / "manifest.jsonl");
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded() || !parsed.is_object()) continue;
        ManifestEntry entry;
        entry.digest = parsed.value("digest", "");
        entry.status_code = parsed.value("status", 0);
        entry.content_type = parsed.value("content_type", "");
        entry.fetched_at = parsed.value("fetched_at", std::int64_t{0});
        entry.final_uri = parsed.value("final_uri", "");
        std::string uri = parsed.value("uri", "");
        if (!uri.empty() && !entry.digest.empty()) manifest_[uri] = std::move(entry);
    }
}

std::optional<FetchRecord> FetchCache::lookup(const std::string& uri) const {
    std::lock_guard lock(mu_);
    auto it = manifest_.find(uri);
    if (it == manifest_.end()) return std::nullopt;
    std::ifstream object(dir_ / "objects" / it->second.digest, std::ios::binary);
    if (!object) return std::nullopt;
    FetchRecord record;
    record.uri = uri;
    record.final_uri = it->second.final_uri.empty() ? uri : it->second.final_uri;
    record.status_code = it->second.status_code;
    record.content_type = it->second.content_type;
    record.fetched_at = it->second.fetched_at;
    record.from_cache = true;
    record.body.assign(std::istreambuf_iterator<char>(object), std::istreambuf_iterator<char>());
    return record;
}

void FetchCache::store(const FetchRecord& record) {
    std::string digest = sha256_hex(record.body);
    std::lock_guard lock(mu_);
    std::filesystem::path object_path = dir_ / "objects" / digest;
    if (!std::filesystem::exists(object_path)) {
        std::ofstream object(object_path, std::ios::binary);
        if (!object) throw IoError("cache: cannot write " + object_path.string());
        object.write(record.body.data(), static_cast<std::streamsize>(record.body.size()));
    }
    auto add = [&](const std::string& uri) {
        ManifestEntry entry{digest, record.status_code, record.content_type, record.fetched_at,
                            record.final_uri};
        nlohmann::json row = {{"uri", uri},
                              {"digest", digest},
                              {"status", record.status_code},
                              {"content_type", record.content_type},
                              {"fetched_at", record.fetched_at},
                              {"final_uri", record.final_uri}};
        std::ofstream manifest(dir_ / "manifest.jsonl", std::ios::app);
        manifest << row.dump() << "\n";
        manifest_[uri] = std::move(entry);
    };
    add(record.uri);
    if (!record.final_uri.empty() && record.final_uri != record.uri) add(record.final_uri);
}

HttpFetcher::HttpFetcher(FetchCache* cache, FetcherOptions options)
    : cache_(cache), options_(std::move(options)) {}

HttpFetcher::HostState& HttpFetcher::host_state(const std::string& host) {
    std::lock_guard lock(hosts_mu_);
    auto& slot = hosts_[host];
    if (!slot) slot = std::make_unique<HostState>();
    return *slot;
}

FetchRecord HttpFetcher::fetch(const std::string& uri) {
    if (cache_) {
        if (auto cached = cache_->lookup(uri)) return *cached;
    }
    FetchRecord record = fetch_once(uri);
    if (cache_) cache_->store(record);
    return record;
}

FetchRecord HttpFetcher::fetch_once(const std::string& uri) {
    std::string current = uri;
    std::set<std::string> visited;

    for (int hop = 0; hop <= options_.max_redirects; ++hop) {
        if (!visited.insert(current).second) {
            throw FetchError("redirect loop at " + current);
        }
        auto parts = split_url(current);
        if (!parts) throw FetchError("unsupported or relative URI: " + current);

        bool throttle = options_.throttle_loopback || !is_loopback_host(parts->host);
        HostState* gate = nullptr;
        if (throttle) {
            gate = &host_state(parts->host);
            std::unique_lock lock(gate->mu);
            while (true) {
                if (gate->active >= options_.per_host_concurrency) {
                    gate->cv.wait(lock);
                    continue;
                }
                auto now = std::chrono::steady_clock::now();
                if (now >= gate->next_allowed) break;
                gate->cv.wait_until(lock, gate->next_allowed);
            }
            ++gate->active;
            gate->next_allowed = std::chrono::steady_clock::now() + options_.per_host_spacing;
        }

        httplib::Result result;
        {
            std::string origin = parts->scheme + "://" + parts->host + ":" +
                                 std::to_string(parts->port);
            httplib::Client client(origin);
            client.set_follow_location(false);
            client.set_connection_timeout(10, 0);
            client.set_read_timeout(static_cast<time_t>(options_.read_timeout.count()), 0);
            client.set_default_headers({{"User-Agent", options_.user_agent}});

            for (int attempt = 0;; ++attempt) {
                result = client.Get(parts->target);
                bool transient = !result || result->status >= 500;
                if (!transient || attempt >= options_.max_retries) break;
                auto delay = options_.retry_backoff * (1 << attempt);
                std::this_thread::sleep_for(delay);
            }
        }
        if (gate) {
            std::lock_guard lock(gate->mu);
            --gate->active;
            gate->cv.notify_all();
        }

        if (!result) {
            throw FetchError("connection failed for " + current + " (" +
                             httplib::to_string(result.error()) + ")");
        }
        int status = result->status;
        if (status >= 300 && status < 400) {
            std::string location = result->get_header_value("Location");
            if (location.empty()) throw FetchError("redirect without Location at " + current, status);
            current = resolve_location(location, *parts);
            continue;
        }
        if (status < 200 || status >= 300) {
            throw FetchError("HTTP " + std::to_string(status) + " for " + current, status);
        }
        FetchRecord record;
        record.uri = uri;
        record.final_uri = current;
        record.status_code = status;
        record.content_type = result->get_header_value("Content-Type");
        record.body = result->body;
        record.fetched_at = now_epoch();
        return record;
    }
    throw FetchError("too many redirects starting from " + uri);
}

void MemoryContentStore::put(const std::string& uri, std::string body, std::string content_type,
                             std::int64_t fetched_at) {
    std::lock_guard lock(mu_);
    entries_[uri] = Entry{std::move(body), std::move(content_type), fetched_at};
}

bool MemoryContentStore::contains(const std::string& uri) const {
    std::lock_guard lock(mu_);
    return entries_.contains(uri);
}

FetchRecord MemoryContentStore::fetch(const std::string& uri) {
    std::lock_guard lock(mu_);
    auto it = entries_.find(uri);
    if (it == entries_.end()) throw FetchError("not in content store: " + uri, 404);
    FetchRecord record;
    record.uri = uri;
    record.final_uri = uri;
    record.status_code = 200;
    record.content_type = it->second.content_type;
    record.body = it->second.body;
    record.fetched_at = it->second.fetched_at;
    record.from_cache = true;
    return record;
}

FetchRecord ChainProvider::fetch(const std::string& uri) {
    try {
        return first_->fetch(uri);
    } catch (const FetchError&) {
        return second_->fetch(uri);
    }
}

std::vector<std::string> discover_archiveit_seeds(const std::string& collection_id,
                                                  ContentProvider& http,
                                                  const ArchiveItOptions& options) {
    if (collection_id.empty() ||
        !std::all_of(collection_id.begin(), collection_id.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
        throw UsageError("archive-it collection id must be a decimal integer: " + collection_id);
    }

    static const std::regex kUrlClass(R"(class="[^"]*\burl\b[^"]*")");
    static const std::regex kHref(R"!(href="(https?://[^"]+)")!");

    std::vector<std::string> seeds;
    std::set<std::string> seen;
    constexpr int kMaxPages = 1000;
    for (int page = 1; page <= kMaxPages; ++page) {
        std::string page_uri =
            options.portal_base + "/collections/" + collection_id + "?page=" + std::to_string(page);
        FetchRecord record = http.fetch(page_uri);

        bool added = false;
        auto begin = std::sregex_iterator(record.body.begin(), record.body.end(), kUrlClass);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            std::size_t from = static_cast<std::size_t>(it->position()) + it->length();
            std::string window = record.body.substr(from, 1024);
            std::smatch href;
            if (!std::regex_search(window, href, kHref)) continue;
            std::string seed = href[1].str();
            if (seen.insert(seed).second) {
                seeds.push_back(std::move(seed));
                added = true;
            }
        }
        if (!added) break;  // exhausted (or the page listed nothing new)
    }
    if (seeds.empty()) {
        throw EmptyInputError("no seeds found for Archive-It collection " + collection_id +
                              " (unknown collection or page layout changed): " +
                              options.portal_base + "/collections/" + collection_id);
    }
    return seeds;
}

std::string archiveit_timemap_uri(const std::string& collection_id, const std::string& seed,
                                  const ArchiveItOptions& options) {
    return options.wayback_base + "/" + collection_id + "/timemap/link/" + seed;
}

}  // namespace otmt
