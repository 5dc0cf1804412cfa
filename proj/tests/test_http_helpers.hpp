#ifndef OTMT_TESTS_HTTP_HELPERS_HPP
#define OTMT_TESTS_HTTP_HELPERS_HPP

#include <string>
#include <thread>

#include "httplib.h"

namespace test_helpers {

// Loopback HTTP server bound to an ephemeral port for fetcher and engine
// tests. Register handlers on `server` before calling start().
class TestServer {
public:
    TestServer() = default;
    ~TestServer() { stop(); }

    void start() {
        port_ = server.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    void stop() {
        if (thread_.joinable()) {
            server.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::string url(const std::string& path) const { return base_url() + path; }

    httplib::Server server;

private:
    int port_ = 0;
    std::thread thread_;
};

}  // namespace test_helpers

#endif  // OTMT_TESTS_HTTP_HELPERS_HPP
