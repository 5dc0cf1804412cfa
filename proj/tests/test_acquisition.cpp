#include <atomic>
#include <chrono>
#include <filesystem>

#include "doctest.h"
#include "otmt/acquisition.hpp"
#include "test_http_helpers.hpp"

using namespace otmt;
using test_helpers::TestServer;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("otmt-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

FetcherOptions fast_options() {
    FetcherOptions options;
    options.retry_backoff = std::chrono::milliseconds(10);
    return options;
}

}  // namespace

TEST_CASE("raw memento URIs get the id_ marker on the datetime segment") {
    auto rewritten = raw_memento_uri(
        "http://wayback.archive-it.org/2950/20120103014326/http://bloombergvillenow.org/");
    CHECK(rewritten.is_archival);
    CHECK(rewritten.uri ==
          "http://wayback.archive-it.org/2950/20120103014326id_/http://bloombergvillenow.org/");

    // applying the rewrite twice changes nothing
    auto again = raw_memento_uri(rewritten.uri);
    CHECK(again.is_archival);
    CHECK(again.uri == rewritten.uri);

    auto passthrough = raw_memento_uri("http://example.com/page");
    CHECK_FALSE(passthrough.is_archival);
    CHECK(passthrough.uri == "http://example.com/page");

    // 14-digit rule is strict: 13 digits is not a capture timestamp
    CHECK_FALSE(raw_memento_uri("http://w.example/1/2012010301432/http://x/").is_archival);
}

TEST_CASE("url splitting") {
    auto parts = split_url("http://example.com/a/b?q=1");
    REQUIRE(parts.has_value());
    CHECK(parts->scheme == "http");
    CHECK(parts->host == "example.com");
    CHECK(parts->port == 80);
    CHECK(parts->target == "/a/b?q=1");

    parts = split_url("https://example.com:8443");
    REQUIRE(parts.has_value());
    CHECK(parts->port == 8443);
    CHECK(parts->target == "/");

    CHECK_FALSE(split_url("not-a-url").has_value());
    CHECK_FALSE(split_url("ftp://example.com/x").has_value());
    CHECK_FALSE(split_url("http:///nohost").has_value());
}

TEST_CASE("fetch: cache hit returns identical bytes without touching the network") {
    TestServer server;
    std::atomic<int> hits{0};
    server.server.Get("/page", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content("<html><body>content body</body></html>", "text/html");
    });
    server.start();

    auto cache_dir = fresh_dir("cache-hit");
    FetchCache cache(cache_dir);
    HttpFetcher fetcher(&cache, fast_options());

    FetchRecord first = fetcher.fetch(server.url("/page"));
    CHECK(first.status_code == 200);
    CHECK_FALSE(first.from_cache);
    CHECK(first.content_type.find("text/html") != std::string::npos);

    FetchRecord second = fetcher.fetch(server.url("/page"));
    CHECK(second.from_cache);
    CHECK(second.body == first.body);
    CHECK(hits == 1);

    // a brand-new cache over the same directory still hits
    FetchCache reopened(cache_dir);
    HttpFetcher fetcher2(&reopened, fast_options());
    FetchRecord third = fetcher2.fetch(server.url("/page"));
    CHECK(third.from_cache);
    CHECK(third.body == first.body);
    CHECK(hits == 1);
}

TEST_CASE("fetch: 404 fails with the status attached, no retries burned") {
    TestServer server;
    std::atomic<int> hits{0};
    server.server.Get("/gone", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 404;
    });
    server.start();

    HttpFetcher fetcher(nullptr, fast_options());
    try {
        fetcher.fetch(server.url("/gone"));
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.status_code() == 404);
    }
    CHECK(hits == 1);  // 4xx is permanent, not retried
}

TEST_CASE("fetch: redirects are followed and the final URI recorded") {
    TestServer server;
    server.server.Get("/a", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/b");
    });
    server.server.Get("/b", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("you made it", "text/plain");
    });
    server.start();

    HttpFetcher fetcher(nullptr, fast_options());
    FetchRecord record = fetcher.fetch(server.url("/a"));
    CHECK(record.body == "you made it");
    CHECK(record.uri == server.url("/a"));
    CHECK(record.final_uri == server.url("/b"));
}

TEST_CASE("fetch: a cached redirect target is shared with the requested URI") {
    TestServer server;
    std::atomic<int> hits{0};
    server.server.Get("/from", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/to");
    });
    server.server.Get("/to", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content("shared", "text/plain");
    });
    server.start();

    auto cache_dir = fresh_dir("cache-redirect");
    FetchCache cache(cache_dir);
    HttpFetcher fetcher(&cache, fast_options());
    fetcher.fetch(server.url("/from"));
    // both the requested and the final URI are now cache keys
    CHECK(fetcher.fetch(server.url("/from")).from_cache);
    CHECK(fetcher.fetch(server.url("/to")).from_cache);
    CHECK(hits == 1);
}

TEST_CASE("fetch: redirect loops are detected") {
    TestServer server;
    server.server.Get("/x", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/y");
    });
    server.server.Get("/y", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/x");
    });
    server.start();

    HttpFetcher fetcher(nullptr, fast_options());
    CHECK_THROWS_WITH_AS(fetcher.fetch(server.url("/x")),
                         doctest::Contains("redirect loop"), FetchError);
}

TEST_CASE("fetch: transient 5xx responses are retried with backoff") {
    TestServer server;
    std::atomic<int> hits{0};
    server.server.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++hits < 3) {
            res.status = 503;
        } else {
            res.set_content("finally", "text/plain");
        }
    });
    server.start();

    HttpFetcher fetcher(nullptr, fast_options());
    FetchRecord record = fetcher.fetch(server.url("/flaky"));
    CHECK(record.body == "finally");
    CHECK(hits == 3);
}

TEST_CASE("fetch: persistent 5xx exhausts retries and fails") {
    TestServer server;
    std::atomic<int> hits{0};
    server.server.Get("/down", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    server.start();

    FetcherOptions options = fast_options();
    options.max_retries = 2;
    HttpFetcher fetcher(nullptr, options);
    try {
        fetcher.fetch(server.url("/down"));
        FAIL("expected FetchError");
    } catch (const FetchError& e) {
        CHECK(e.status_code() == 500);
    }
    CHECK(hits == 3);  // first attempt + 2 retries
}

TEST_CASE("fetch: unreachable host fails cleanly") {
    HttpFetcher fetcher(nullptr, fast_options());
    CHECK_THROWS_AS(fetcher.fetch("http://127.0.0.1:1/void"), FetchError);
    CHECK_THROWS_AS(fetcher.fetch("not a uri"), FetchError);
}

TEST_CASE("politeness gate spaces out request starts per host") {
    TestServer server;
    server.server.Get("/p", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });
    server.start();

    FetcherOptions options = fast_options();
    options.throttle_loopback = true;  // loopback is normally exempt
    options.per_host_spacing = std::chrono::milliseconds(80);
    HttpFetcher fetcher(nullptr, options);

    auto t0 = std::chrono::steady_clock::now();
    fetcher.fetch(server.url("/p?n=1"));
    fetcher.fetch(server.url("/p?n=2"));
    fetcher.fetch(server.url("/p?n=3"));
    auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() >= 160);

    // loopback exemption keeps offline fixtures fast
    FetcherOptions fast = fast_options();
    HttpFetcher unthrottled(nullptr, fast);
    t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 3; ++i) unthrottled.fetch(server.url("/p?m=" + std::to_string(i)));
    elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 500);
}

TEST_CASE("memory content store serves exactly what was put") {
    MemoryContentStore store;
    store.put("warc://collection/20120101000000/http://x/", "body bytes", "text/html", 42);
    CHECK(store.contains("warc://collection/20120101000000/http://x/"));
    FetchRecord record = store.fetch("warc://collection/20120101000000/http://x/");
    CHECK(record.body == "body bytes");
    CHECK(record.from_cache);
    CHECK_THROWS_AS(store.fetch("warc://missing/"), FetchError);
}

TEST_CASE("chain provider falls back from the store to the network") {
    TestServer server;
    server.server.Get("/live", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("from network", "text/plain");
    });
    server.start();

    auto store = std::make_shared<MemoryContentStore>();
    store->put("warc://collection/1/x", "from store", "text/plain", 0);
    auto fetcher = std::make_shared<HttpFetcher>(nullptr, fast_options());
    ChainProvider chain(store, fetcher);

    CHECK(chain.fetch("warc://collection/1/x").body == "from store");
    CHECK(chain.fetch(server.url("/live")).body == "from network");
}

namespace {

std::string seed_listing(std::initializer_list<const char*> seeds) {
    std::string html = "<html><body><div class=\"results\">";
    for (const char* seed : seeds) {
        html += "<div class=\"result-url\"><a href=\"";
        html += seed;
        html += "\">";
        html += seed;
        html += "</a></div>";
    }
    html += "</div></body></html>";
    return html;
}

}  // namespace

TEST_CASE("archive-it seed discovery dedupes and paginates") {
    TestServer server;
    server.server.Get("/collections/2950",
                      [&](const httplib::Request& req, httplib::Response& res) {
                          int page = std::atoi(req.get_param_value("page").c_str());
                          if (page == 1) {
                              res.set_content(seed_listing({"http://bloombergvillenow.org/",
                                                            "http://occupyarlington.org/",
                                                            "http://bloombergvillenow.org/"}),
                                              "text/html");
                          } else if (page == 2) {
                              res.set_content(seed_listing({"http://occupyseattle.org/"}),
                                              "text/html");
                          } else {
                              res.set_content(seed_listing({}), "text/html");
                          }
                      });
    server.start();

    ArchiveItOptions options;
    options.portal_base = server.base_url();
    options.wayback_base = "http://wayback.archive-it.org";
    HttpFetcher fetcher(nullptr, fast_options());

    auto seeds = discover_archiveit_seeds("2950", fetcher, options);
    REQUIRE(seeds.size() == 3);  // 4 listed, 1 duplicate
    CHECK(seeds[0] == "http://bloombergvillenow.org/");
    CHECK(seeds[1] == "http://occupyarlington.org/");
    CHECK(seeds[2] == "http://occupyseattle.org/");

    // the generated URI-T follows the wayback timemap/link pattern
    CHECK(archiveit_timemap_uri("2950", seeds[0], options) ==
          "http://wayback.archive-it.org/2950/timemap/link/http://bloombergvillenow.org/");
}

TEST_CASE("archive-it discovery: single seed and failure modes") {
    TestServer server;
    server.server.Get("/collections/7",
                      [&](const httplib::Request& req, httplib::Response& res) {
                          int page = std::atoi(req.get_param_value("page").c_str());
                          res.set_content(page == 1 ? seed_listing({"http://one.example/"})
                                                    : seed_listing({}),
                                          "text/html");
                      });
    server.server.Get("/collections/8", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><body><p>No such collection.</p></body></html>", "text/html");
    });
    server.start();

    ArchiveItOptions options;
    options.portal_base = server.base_url();
    HttpFetcher fetcher(nullptr, fast_options());

    CHECK(discover_archiveit_seeds("7", fetcher, options).size() == 1);
    CHECK_THROWS_AS(discover_archiveit_seeds("8", fetcher, options), EmptyInputError);
    CHECK_THROWS_AS(discover_archiveit_seeds("not-a-number", fetcher, options), UsageError);
}

TEST_CASE("sha256 digest matches a known vector") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
