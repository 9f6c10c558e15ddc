#pragma once

#include "agora/service/service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace agora::service {

/// JSON over HTTP for the service, plus a server-sent event stream of agent
/// replies (POST /api/projects/{id}/replies with Accept: text/event-stream
/// or ?stream=1). Mutating endpoints honour an Idempotency-Key header.
class HttpServer {
public:
    HttpServer(DeliberationService& service, std::string auth_token = {});
    ~HttpServer();

    /// Binds without serving; port 0 picks a free port. Returns the port or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    bool running() const;

private:
    void install_routes();

    DeliberationService& service_;
    std::string auth_token_;
    std::unique_ptr<httplib::Server> server_;
};

/// JSON representations used by the HTTP layer.
nlohmann::json thread_tree(const forum::Thread& thread);
nlohmann::json memory_views_json(const agent::MemoryViews& views);
nlohmann::json mindmap_json(const mindmap::MindMapGraph& graph, std::optional<mindmap::ZoomLevel> zoom);

}  // namespace agora::service
