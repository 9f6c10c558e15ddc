#include "agora/common/http_client.hpp"

#include <httplib.h>

#include <thread>

namespace agora::net {

std::string HttpRequest::param(const std::string& name) const {
    for (const auto& [k, v] : params) {
        if (k == name) return v;
    }
    return {};
}

std::string url_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0x0f]);
        }
    }
    return out;
}

HttpClient::HttpClient(HttpClientOptions options) : options_(std::move(options)) {}

HttpResponse HttpClient::send(const HttpRequest& request) {
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        const auto earliest = last_request_ + options_.min_interval;
        if (now < earliest) std::this_thread::sleep_until(earliest);
        last_request_ = std::chrono::steady_clock::now();
    }

    httplib::Client client(options_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    std::string target = request.path;
    char sep = target.find('?') == std::string::npos ? '?' : '&';
    for (const auto& [k, v] : request.params) {
        target += sep;
        target += url_encode(k) + "=" + url_encode(v);
        sep = '&';
    }

    httplib::Result result = request.method == "POST"
        ? client.Post(target, headers, request.body, request.content_type)
        : client.Get(target, headers);
    if (!result) {
        throw TransportError("request to " + options_.base_url + request.path + " failed: " +
                             httplib::to_string(result.error()));
    }
    return HttpResponse{result->status, result->body};
}

}  // namespace agora::net
