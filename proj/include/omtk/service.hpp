#pragma once

#include "omtk/model.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>

namespace httplib {
class Server;
}

namespace omtk {

struct ServiceOptions {
    std::size_t max_sessions = 1000;
    std::chrono::seconds session_ttl = std::chrono::hours(24);
    std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Transport-independent request handler for the /api/v1 surface. Sessions
/// live in memory; mutations of one session are serialized by its own lock.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response handle(std::string_view method, std::string_view path, std::string_view body);

    /// Route every /api/v1 request of `server` to handle().
    void mount(httplib::Server& server);

    [[nodiscard]] std::size_t session_count();

private:
    struct Session;

    std::shared_ptr<Session> find_session(const std::string& id);
    std::shared_ptr<Session> create_session();
    void sweep_expired();

    ServiceOptions options_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::mt19937_64 rng_;
};

/// HTTP status used for an error code.
int http_status_for(std::string_view error_code);

/// Blocking server on host:port. Returns false if the socket cannot be bound.
bool serve(const std::string& host, int port, ServiceOptions options = {});

} // namespace omtk
