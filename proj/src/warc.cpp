#include "otmt/warc.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <fstream>

#include "otmt/datetime.hpp"

namespace otmt {

namespace {

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open WARC file: " + file.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Inflates a concatenation of gzip members (the per-record layout of .warc.gz).
std::string gunzip_all(const std::string& data) {
    std::string out;
    z_stream stream{};
    if (inflateInit2(&stream, 15 + 16) != Z_OK) throw IoError("zlib init failed");
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    stream.avail_in = static_cast<uInt>(data.size());
    std::vector<char> buffer(1 << 16);
    while (stream.avail_in > 0) {
        stream.next_out = reinterpret_cast<Bytef*>(buffer.data());
        stream.avail_out = static_cast<uInt>(buffer.size());
        int rc = inflate(&stream, Z_NO_FLUSH);
        out.append(buffer.data(), buffer.size() - stream.avail_out);
        if (rc == Z_STREAM_END) {
            if (inflateReset(&stream) != Z_OK) break;  // next member
        } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
            inflateEnd(&stream);
            throw IoError("gzip inflate failed in WARC stream");
        } else if (rc == Z_BUF_ERROR && stream.avail_out != 0) {
            break;  // truncated input
        }
    }
    inflateEnd(&stream);
    return out;
}

std::string_view take_line(std::string_view data, std::size_t& pos) {
    std::size_t eol = data.find('\n', pos);
    std::size_t start = pos;
    std::size_t end = eol == std::string_view::npos ? data.size() : eol;
    pos = eol == std::string_view::npos ? data.size() : eol + 1;
    if (end > start && data[end - 1] == '\r') --end;
    return data.substr(start, end - start);
}

std::string trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string decode_chunked(std::string_view data) {
    std::string out;
    std::size_t pos = 0;
    while (pos < data.size()) {
        std::size_t eol = data.find("\r\n", pos);
        if (eol == std::string_view::npos) break;
        std::size_t len = 0;
        bool any = false;
        for (std::size_t i = pos; i < eol; ++i) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(data[i])));
            if (c >= '0' && c <= '9') len = len * 16 + static_cast<std::size_t>(c - '0');
            else if (c >= 'a' && c <= 'f') len = len * 16 + static_cast<std::size_t>(c - 'a' + 10);
            else break;  // chunk extension
            any = true;
        }
        if (!any || len == 0) break;
        pos = eol + 2;
        if (pos + len > data.size()) len = data.size() - pos;
        out.append(data.substr(pos, len));
        pos += len + 2;  // trailing CRLF
    }
    return out;
}

}  // namespace

std::vector<WarcRecord> read_warc(const std::filesystem::path& file,
                                  std::vector<std::string>* warnings) {
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };

    std::string data = read_file(file);
    if (data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
        static_cast<unsigned char>(data[1]) == 0x8b) {
        data = gunzip_all(data);
    }

    std::vector<WarcRecord> records;
    std::string_view view = data;
    std::size_t pos = 0;
    while (pos < view.size()) {
        // skip inter-record padding
        while (pos < view.size() && (view[pos] == '\r' || view[pos] == '\n')) ++pos;
        if (pos >= view.size()) break;

        std::size_t record_start = pos;
        std::string_view version = take_line(view, pos);
        auto resync = [&](const std::string& why) {
            warn(file.string() + ": " + why + " at offset " + std::to_string(record_start) +
                 ", record skipped");
            std::size_t next = view.find("WARC/", pos);
            pos = next == std::string_view::npos ? view.size() : next;
        };
        if (!version.starts_with("WARC/")) {
            resync("expected WARC version line");
            continue;
        }

        WarcRecord record;
        std::int64_t content_length = -1;
        bool bad_header = false;
        while (pos < view.size()) {
            std::string_view line = take_line(view, pos);
            if (line.empty()) break;
            std::size_t colon = line.find(':');
            if (colon == std::string_view::npos) {
                bad_header = true;
                break;
            }
            std::string name = lower(trim(line.substr(0, colon)));
            std::string value = trim(line.substr(colon + 1));
            if (name == "warc-type") {
                record.type = value;
            } else if (name == "warc-target-uri") {
                if (value.size() >= 2 && value.front() == '<' && value.back() == '>') {
                    value = value.substr(1, value.size() - 2);
                }
                record.target_uri = value;
            } else if (name == "warc-date") {
                record.date = parse_iso8601(value).value_or(0);
            } else if (name == "content-length") {
                content_length = std::strtoll(value.c_str(), nullptr, 10);
            }
            record.headers[name] = value;
        }
        if (bad_header || content_length < 0 ||
            pos + static_cast<std::size_t>(content_length) > view.size()) {
            resync(bad_header ? "malformed record header" : "bad or missing Content-Length");
            continue;
        }
        record.block = std::string(view.substr(pos, static_cast<std::size_t>(content_length)));
        pos += static_cast<std::size_t>(content_length);
        records.push_back(std::move(record));
    }
    return records;
}

std::optional<HttpMessage> parse_http_response(std::string_view block) {
    std::size_t pos = 0;
    std::string_view status_line = take_line(block, pos);
    if (!status_line.starts_with("HTTP/")) return std::nullopt;
    std::size_t sp = status_line.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    HttpMessage msg;
    msg.status_code = std::atoi(std::string(status_line.substr(sp + 1, 3)).c_str());

    bool chunked = false;
    while (pos < block.size()) {
        std::string_view line = take_line(block, pos);
        if (line.empty()) break;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string name = lower(trim(line.substr(0, colon)));
        std::string value = trim(line.substr(colon + 1));
        if (name == "content-type") msg.content_type = value;
        if (name == "transfer-encoding" && lower(value).find("chunked") != std::string::npos) {
            chunked = true;
        }
    }
    std::string_view payload = block.substr(pos);
    msg.body = chunked ? decode_chunked(payload) : std::string(payload);
    return msg;
}

WarcIngest ingest_warc(const std::vector<std::filesystem::path>& files,
                       std::vector<std::string>* warnings) {
    WarcIngest ingest;
    ingest.store = std::make_shared<MemoryContentStore>();

    struct Capture {
        std::int64_t date;
        std::string uri_m;
    };
    std::map<std::string, std::vector<Capture>> by_target;
    std::vector<std::string> target_order;
    std::set<std::string> used_uri_m;

    for (const auto& file : files) {
        for (WarcRecord& record : read_warc(file, warnings)) {
            if (record.type != "response" || record.target_uri.empty()) continue;
            auto http = parse_http_response(record.block);
            if (!http) {
                if (warnings) {
                    warnings->push_back(file.string() + ": response block for " +
                                        record.target_uri + " is not an HTTP message, skipped");
                }
                continue;
            }
            if (http->status_code != 200) continue;

            std::string stamp = format_wayback14(record.date);
            std::string uri_m = "warc://collection/" + stamp + "/" + record.target_uri;
            for (int n = 2; !used_uri_m.insert(uri_m).second; ++n) {
                uri_m = "warc://collection/" + stamp + "-" + std::to_string(n) + "/" +
                        record.target_uri;
            }
            if (!by_target.contains(record.target_uri)) target_order.push_back(record.target_uri);
            by_target[record.target_uri].push_back({record.date, uri_m});
            ingest.store->put(uri_m, std::move(http->body), std::move(http->content_type),
                              record.date);
        }
    }

    if (by_target.empty()) {
        throw EmptyInputError("no usable response records in the given WARC file(s)");
    }

    for (const std::string& target : target_order) {
        auto& captures = by_target[target];
        std::stable_sort(captures.begin(), captures.end(),
                         [](const Capture& a, const Capture& b) { return a.date < b.date; });
        TimeMap tm;
        tm.uri_t = "warc://collection/timemap/link/" + target;
        tm.original_uri = target;
        for (const Capture& capture : captures) {
            MementoRef ref;
            ref.uri_m = capture.uri_m;
            ref.memento_datetime = capture.date;
            ref.rel_hints = {"memento"};
            tm.mementos.push_back(std::move(ref));
        }
        ingest.timemaps.push_back(std::move(tm));
    }
    return ingest;
}

}  // namespace otmt
