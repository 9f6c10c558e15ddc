#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agora::net {

struct HttpRequest {
    std::string method = "GET";
    std::string path;
    std::vector<std::pair<std::string, std::string>> params;
    std::map<std::string, std::string> headers;
    std::string body;
    std::string content_type = "application/json";

    std::string param(const std::string& name) const;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Anything that can answer an HTTP request: a live client or a recorded replay.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

struct HttpClientOptions {
    std::string base_url;  // scheme://host[:port]
    std::chrono::milliseconds timeout{10000};
    std::chrono::milliseconds min_interval{0};  // crude per-client rate limit
};

/// Live transport over cpp-httplib. Throws TransportError on connection failure.
class HttpClient final : public HttpTransport {
public:
    explicit HttpClient(HttpClientOptions options);
    HttpResponse send(const HttpRequest& request) override;

private:
    HttpClientOptions options_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_request_{};
};

std::string url_encode(std::string_view s);

}  // namespace agora::net
