#include <zlib.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "otmt/warc.hpp"

using namespace otmt;

namespace {

std::string http_response(const std::string& body, const std::string& content_type = "text/html",
                          int status = 200) {
    std::string msg = "HTTP/1.1 " + std::to_string(status) + (status == 200 ? " OK" : " Err") +
                      "\r\nContent-Type: " + content_type +
                      "\r\nContent-Length: " + std::to_string(body.size()) + "\r\n\r\n" + body;
    return msg;
}

std::string warc_record(const std::string& type, const std::string& target_uri,
                        const std::string& date, const std::string& block) {
    std::string rec = "WARC/1.0\r\n";
    rec += "WARC-Type: " + type + "\r\n";
    rec += "WARC-Record-ID: <urn:uuid:0000>\r\n";
    if (!target_uri.empty()) rec += "WARC-Target-URI: " + target_uri + "\r\n";
    rec += "WARC-Date: " + date + "\r\n";
    rec += "Content-Type: application/http; msgtype=response\r\n";
    rec += "Content-Length: " + std::to_string(block.size()) + "\r\n";
    rec += "\r\n";
    rec += block;
    rec += "\r\n\r\n";
    return rec;
}

std::filesystem::path write_fixture(const std::string& name, const std::string& bytes) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return path;
}

std::string gzip_member(const std::string& data) {
    z_stream stream{};
    REQUIRE(deflateInit2(&stream, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8,
                         Z_DEFAULT_STRATEGY) == Z_OK);
    std::string out(data.size() + 128, '\0');
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    stream.avail_in = static_cast<uInt>(data.size());
    stream.next_out = reinterpret_cast<Bytef*>(out.data());
    stream.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&stream, Z_FINISH) == Z_STREAM_END);
    out.resize(out.size() - stream.avail_out);
    deflateEnd(&stream);
    return out;
}

}  // namespace

TEST_CASE("three responses for one URI yield one TimeMap with three mementos") {
    std::string bytes =
        warc_record("response", "http://seed.example/", "2012-01-03T01:43:26Z",
                    http_response("capture one")) +
        warc_record("response", "http://seed.example/", "2012-03-01T00:00:00Z",
                    http_response("capture two")) +
        warc_record("response", "http://seed.example/", "2012-02-01T00:00:00Z",
                    http_response("capture three"));
    auto path = write_fixture("otmt-warc-single.warc", bytes);

    WarcIngest ingest = ingest_warc({path});
    REQUIRE(ingest.timemaps.size() == 1);
    const TimeMap& tm = ingest.timemaps[0];
    CHECK(tm.original_uri == "http://seed.example/");
    REQUIRE(tm.mementos.size() == 3);
    // sorted by capture date, not record order
    CHECK(tm.mementos[0].memento_datetime < tm.mementos[1].memento_datetime);
    CHECK(tm.mementos[1].memento_datetime < tm.mementos[2].memento_datetime);
    CHECK(tm.mementos[0].uri_m.find("20120103014326") != std::string::npos);

    // the content store resolves every memento offline
    for (const MementoRef& ref : tm.mementos) {
        CHECK(ingest.store->contains(ref.uri_m));
    }
    CHECK(ingest.store->fetch(tm.mementos[0].uri_m).body == "capture one");
}

TEST_CASE("two target URIs yield two TimeMaps of sizes two and one") {
    std::string bytes =
        warc_record("response", "http://a.example/", "2012-01-01T00:00:00Z",
                    http_response("a1")) +
        warc_record("response", "http://b.example/", "2012-01-02T00:00:00Z",
                    http_response("b1")) +
        warc_record("response", "http://a.example/", "2012-01-03T00:00:00Z",
                    http_response("a2"));
    auto path = write_fixture("otmt-warc-two.warc", bytes);

    WarcIngest ingest = ingest_warc({path});
    REQUIRE(ingest.timemaps.size() == 2);
    CHECK(ingest.timemaps[0].original_uri == "http://a.example/");
    CHECK(ingest.timemaps[0].mementos.size() == 2);
    CHECK(ingest.timemaps[1].original_uri == "http://b.example/");
    CHECK(ingest.timemaps[1].mementos.size() == 1);

    // memento count equals the number of usable response records
    std::size_t total = 0;
    for (const auto& tm : ingest.timemaps) total += tm.mementos.size();
    CHECK(total == 3);
}

TEST_CASE("empty or contentless WARC input is an error") {
    auto empty = write_fixture("otmt-warc-empty.warc", "");
    CHECK_THROWS_AS(ingest_warc({empty}), EmptyInputError);

    // only a warcinfo record, no responses
    std::string bytes = warc_record("warcinfo", "", "2012-01-01T00:00:00Z", "software: test");
    auto info_only = write_fixture("otmt-warc-info.warc", bytes);
    CHECK_THROWS_AS(ingest_warc({info_only}), EmptyInputError);
}

TEST_CASE("revisit and non-200 records are excluded from TimeMaps") {
    std::string bytes =
        warc_record("response", "http://a.example/", "2012-01-01T00:00:00Z",
                    http_response("good")) +
        warc_record("revisit", "http://a.example/", "2012-01-02T00:00:00Z",
                    http_response("dup")) +
        warc_record("response", "http://a.example/", "2012-01-03T00:00:00Z",
                    http_response("not found", "text/html", 404)) +
        warc_record("request", "http://a.example/", "2012-01-04T00:00:00Z",
                    "GET / HTTP/1.1\r\n\r\n");
    auto path = write_fixture("otmt-warc-filter.warc", bytes);

    WarcIngest ingest = ingest_warc({path});
    REQUIRE(ingest.timemaps.size() == 1);
    CHECK(ingest.timemaps[0].mementos.size() == 1);
}

TEST_CASE("malformed record headers are skipped with a warning, parsing resyncs") {
    std::string bytes =
        warc_record("response", "http://a.example/", "2012-01-01T00:00:00Z",
                    http_response("first")) +
        "WARC/1.0\r\nThisHeaderHasNoColon\r\n\r\n" +
        warc_record("response", "http://a.example/", "2012-01-02T00:00:00Z",
                    http_response("second"));
    auto path = write_fixture("otmt-warc-malformed.warc", bytes);

    std::vector<std::string> warnings;
    auto records = read_warc(path, &warnings);
    CHECK(records.size() == 2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("skipped") != std::string::npos);

    WarcIngest ingest = ingest_warc({path});
    CHECK(ingest.timemaps[0].mementos.size() == 2);
}

TEST_CASE("gzip-per-record WARCs read identically to their plain form") {
    std::string plain =
        warc_record("response", "http://gz.example/", "2012-01-01T00:00:00Z",
                    http_response("compressed capture one")) +
        warc_record("response", "http://gz.example/", "2012-01-02T00:00:00Z",
                    http_response("compressed capture two"));
    auto plain_path = write_fixture("otmt-warc-plain.warc", plain);

    std::string gz =
        gzip_member(warc_record("response", "http://gz.example/", "2012-01-01T00:00:00Z",
                                http_response("compressed capture one"))) +
        gzip_member(warc_record("response", "http://gz.example/", "2012-01-02T00:00:00Z",
                                http_response("compressed capture two")));
    auto gz_path = write_fixture("otmt-warc-gz.warc.gz", gz);

    auto plain_records = read_warc(plain_path);
    auto gz_records = read_warc(gz_path);
    REQUIRE(plain_records.size() == gz_records.size());
    for (std::size_t i = 0; i < plain_records.size(); ++i) {
        CHECK(plain_records[i].target_uri == gz_records[i].target_uri);
        CHECK(plain_records[i].date == gz_records[i].date);
        CHECK(plain_records[i].block == gz_records[i].block);
    }
}

TEST_CASE("chunked transfer encoding in stored responses is undone") {
    std::string chunked_body = "7\r\nchunked\r\n8\r\n content\r\n0\r\n\r\n";
    std::string msg =
        "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\nTransfer-Encoding: chunked\r\n\r\n" +
        chunked_body;
    auto parsed = parse_http_response(msg);
    REQUIRE(parsed.has_value());
    CHECK(parsed->body == "chunked content");
    CHECK(parsed->status_code == 200);
}

TEST_CASE("angle-bracketed target URIs are unwrapped") {
    std::string bytes = warc_record("response", "<http://a.example/>", "2012-01-01T00:00:00Z",
                                    http_response("x"));
    auto path = write_fixture("otmt-warc-brackets.warc", bytes);
    auto records = read_warc(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].target_uri == "http://a.example/");
}

TEST_CASE("same-second captures of one URI still get distinct URI-Ms") {
    std::string bytes =
        warc_record("response", "http://a.example/", "2012-01-01T00:00:00Z",
                    http_response("one")) +
        warc_record("response", "http://a.example/", "2012-01-01T00:00:00Z",
                    http_response("two"));
    auto path = write_fixture("otmt-warc-collision.warc", bytes);
    WarcIngest ingest = ingest_warc({path});
    REQUIRE(ingest.timemaps[0].mementos.size() == 2);
    CHECK(ingest.timemaps[0].mementos[0].uri_m != ingest.timemaps[0].mementos[1].uri_m);
}
