#include "agora/service/http_server.hpp"

#include "agora/knowledge/citations.hpp"
#include "agora/mindmap/export.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace agora::service {

using nlohmann::json;

json thread_tree(const forum::Thread& thread) {
    const auto moves = thread.state.moves();
    std::map<std::string, std::vector<const protocol::DeliberationMove*>> children;
    for (const auto& m : moves) {
        if (m.target) children[*m.target].push_back(&m);
    }
    std::function<json(const protocol::DeliberationMove&)> node = [&](const protocol::DeliberationMove& m) {
        json j{{"move", m}, {"children", json::array()}};
        for (const auto* c : children[m.move_id]) j["children"].push_back(node(*c));
        return j;
    };
    json commitments = json::object();
    for (const auto& [owner, store] : thread.state.stores()) {
        auto list = json::array();
        for (const auto& c : store.commitments) {
            list.push_back({{"source_move", c.source_move}, {"text", c.text}, {"status", protocol::to_string(c.status)}});
        }
        commitments[owner] = list;
    }
    auto challenges = json::array();
    for (const auto& c : thread.state.challenges()) {
        challenges.push_back({{"challenge_move", c.challenge_move},
                              {"challenged_move", c.challenged_move},
                              {"burden_holder", c.burden_holder},
                              {"resolved_by", c.resolved_by ? json(*c.resolved_by) : json()}});
    }
    json j{{"thread_id", thread.thread_id},
           {"title", thread.title},
           {"description", thread.description},
           {"move_count", moves.size()},
           {"root", moves.empty() ? json() : node(moves.front())},
           {"commitments", commitments},
           {"challenges", challenges}};
    j["provenance"] = thread.provenance
        ? json{{"source_thread", thread.provenance->source_thread}, {"source_move", thread.provenance->source_move}}
        : json();
    return j;
}

json memory_views_json(const agent::MemoryViews& views) {
    std::function<json(const agent::LineageNode&)> node = [&](const agent::LineageNode& n) {
        json j{{"snippet_id", n.snippet_id}, {"cross_links", n.cross_links}, {"children", json::array()}};
        for (const auto& c : n.children) j["children"].push_back(node(c));
        return j;
    };
    json out{{"stream", json::array()}, {"lineage", json::array()}};
    for (const auto& s : views.stream) out["stream"].push_back(s);
    for (const auto& n : views.lineage) out["lineage"].push_back(node(n));
    return out;
}

json mindmap_json(const mindmap::MindMapGraph& graph, std::optional<mindmap::ZoomLevel> zoom) {
    json doc = mindmap::to_node_link(graph);
    if (zoom) {
        doc["graph"]["zoom"] = mindmap::to_string(*zoom);
        for (std::size_t i = 0; i < graph.nodes.size(); ++i) doc["nodes"][i]["label"] = mindmap::label_at(graph.nodes[i], *zoom);
    }
    return doc;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body);
    if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
    return j;
}

std::string idem_key(const httplib::Request& req) { return req.get_header_value("Idempotency-Key"); }

std::string required(const json& body, const char* key) {
    if (!body.contains(key) || !body[key].is_string()) throw std::invalid_argument(std::string("missing field '") + key + "'");
    return body[key].get<std::string>();
}

// Maps domain exceptions onto HTTP statuses.
template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const protocol::ProtocolError& e) {
            send_json(res, {{"error", protocol::to_string(e.kind())}, {"detail", e.what()}}, 422);
        } catch (const forum::StaleEdit& e) {
            send_json(res, {{"error", "StaleEdit"}, {"detail", e.what()}, {"current_digest", e.current_digest()}}, 409);
        } catch (const NotFound& e) {
            send_json(res, {{"error", "NotFound"}, {"detail", e.what()}}, 404);
        } catch (const forum::UnknownMove& e) {
            send_json(res, {{"error", "UnknownMove"}, {"detail", e.what()}}, 404);
        } catch (const forum::UnknownThread& e) {
            send_json(res, {{"error", "UnknownThread"}, {"detail", e.what()}}, 404);
        } catch (const forum::UnknownAgent& e) {
            send_json(res, {{"error", "UnknownAgent"}, {"detail", e.what()}}, 400);
        } catch (const agent::ProviderUnavailable& e) {
            send_json(res, {{"error", "ProviderUnavailable"}, {"detail", e.what()}}, 503);
        } catch (const json::exception& e) {
            send_json(res, {{"error", "BadRequest"}, {"detail", e.what()}}, 400);
        } catch (const std::invalid_argument& e) {
            send_json(res, {{"error", "BadRequest"}, {"detail", e.what()}}, 400);
        } catch (const forum::ForumError& e) {
            send_json(res, {{"error", "BadRequest"}, {"detail", e.what()}}, 400);
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            send_json(res, {{"error", "Internal"}, {"detail", e.what()}}, 500);
        }
    };
}

std::string sse(const std::string& event, const json& data) { return "event: " + event + "\ndata: " + data.dump() + "\n\n"; }

}  // namespace

HttpServer::HttpServer(DeliberationService& service, std::string auth_token)
    : service_(service), auth_token_(std::move(auth_token)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

void HttpServer::install_routes() {
    auto& s = *server_;
    auto& svc = service_;

    s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (auth_token_.empty() || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") == "Bearer " + auth_token_) return httplib::Server::HandlerResponse::Unhandled;
        send_json(res, {{"error", "Unauthorized"}}, 401);
        return httplib::Server::HandlerResponse::Handled;
    });

    s.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

    s.Get("/api/personas", guarded([&](const httplib::Request&, httplib::Response& res) {
        auto out = json::array();
        for (const auto& [_, p] : svc.catalog()) out.push_back(p);
        send_json(res, out);
    }));

    s.Get("/api/projects", guarded([&](const httplib::Request&, httplib::Response& res) {
        auto out = json::array();
        for (const auto& id : svc.project_ids()) {
            const auto snap = svc.snapshot(id);
            out.push_back({{"project_id", id}, {"title", snap->project->title}, {"threads", snap->project->threads.size()}});
        }
        send_json(res, out);
    }));

    s.Post("/api/projects", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto id = svc.create_project(required(body, "title"),
                                           forum::sections_from_json(body.value("proposal", json::object())),
                                           body.value("roster", std::vector<std::string>{}), idem_key(req));
        send_json(res, forum::to_json(*svc.snapshot(id)->project), 201);
    }));

    s.Get(R"(/api/projects/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto snap = svc.snapshot(req.matches[1]);
        const auto& p = *snap->project;
        auto threads = json::array();
        for (const auto& t : p.threads) {
            threads.push_back({{"thread_id", t.thread_id}, {"title", t.title}, {"moves", t.state.moves().size()}});
        }
        send_json(res, {{"project_id", p.project_id},
                        {"title", p.title},
                        {"roster", p.roster},
                        {"threads", threads},
                        {"seq", snap->seq},
                        {"digest", state_digest(*snap)}});
    }));

    s.Post(R"(/api/projects/([^/]+)/suggestions)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto out = json::array();
        for (const auto& sg : svc.suggest_threads(req.matches[1])) out.push_back(forum::to_json(sg));
        send_json(res, out);
    }));

    s.Post(R"(/api/projects/([^/]+)/threads)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        std::optional<std::string> opener;
        if (body.contains("opener")) opener = required(body, "opener");
        const auto tid = svc.create_thread(req.matches[1], required(body, "title"),
                                           body.value("description", std::string{}), opener, idem_key(req));
        send_json(res, thread_tree(*svc.snapshot(req.matches[1])->project->find_thread(tid)), 201);
    }));

    s.Get(R"(/api/projects/([^/]+)/threads/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto* t = svc.snapshot(req.matches[1])->project->find_thread(req.matches[2]);
        if (!t) throw forum::UnknownThread(req.matches[2]);
        send_json(res, thread_tree(*t));
    }));

    s.Post(R"(/api/projects/([^/]+)/threads/([^/]+)/commitments)",
           guarded([&](const httplib::Request& req, httplib::Response& res) {
               const auto body = body_of(req);
               const auto status = protocol::parse_commitment_status(required(body, "status"));
               if (!status) throw std::invalid_argument("unknown commitment status");
               svc.set_commitment_status(req.matches[1], req.matches[2], required(body, "owner"),
                                         required(body, "source_move"), *status);
               send_json(res, thread_tree(*svc.snapshot(req.matches[1])->project->find_thread(req.matches[2])));
           }));

    s.Post(R"(/api/projects/([^/]+)/branches)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto tid = svc.branch_thread(req.matches[1], required(body, "source_move"), required(body, "title"), idem_key(req));
        send_json(res, thread_tree(*svc.snapshot(req.matches[1])->project->find_thread(tid)), 201);
    }));

    s.Post(R"(/api/projects/([^/]+)/responders)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto p = svc.preview_responders(req.matches[1], required(body, "parent"), required(body, "text"));
        auto mentions = json::array();
        for (const auto& m : p.mentions) mentions.push_back({{"agent_id", m.agent_id}, {"begin", m.begin}, {"end", m.end}});
        send_json(res, {{"cleaned", p.cleaned},
                        {"mentions", mentions},
                        {"responders", p.routing.responders},
                        {"default", p.routing.by_default},
                        {"needs_mention", p.routing.needs_mention},
                        {"notify", p.notify_line}});
    }));

    s.Post(R"(/api/projects/([^/]+)/replies)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const std::string pid = req.matches[1];
        ReplyRequest r{required(body, "parent"), required(body, "text"), body.value("author", std::string("user")), idem_key(req)};
        const bool stream = req.get_param_value("stream") == "1" ||
                            req.get_header_value("Accept").find("text/event-stream") != std::string::npos;
        if (!stream) {
            const auto result = svc.post_reply(pid, r);
            auto items = json::array();
            for (const auto& item : result.items) items.push_back(to_json(item));
            send_json(res, {{"user_move", result.user_move},
                            {"responders", result.routing.responders},
                            {"needs_mention", result.routing.needs_mention},
                            {"replayed", result.replayed},
                            {"items", items}},
                      201);
            return;
        }
        svc.preview_responders(pid, r.parent, r.text);  // reject bad input before the stream starts
        res.set_chunked_content_provider("text/event-stream", [&svc, pid, r](std::size_t, httplib::DataSink& sink) {
            try {
                const auto result = svc.post_reply(pid, r, [&](const StreamItem& item) {
                    const auto chunk = sse(item.kind == StreamItem::Kind::Move ? "move" : "error", to_json(item));
                    sink.write(chunk.data(), chunk.size());
                });
                const auto done = sse("done", {{"user_move", result.user_move},
                                               {"responders", result.routing.responders},
                                               {"needs_mention", result.routing.needs_mention},
                                               {"replayed", result.replayed}});
                sink.write(done.data(), done.size());
            } catch (const std::exception& e) {
                const auto chunk = sse("failed", {{"detail", e.what()}});
                sink.write(chunk.data(), chunk.size());
            }
            sink.done();
            return true;
        });
    }));

    s.Post(R"(/api/projects/([^/]+)/what-if)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto stance = forum::parse_stance(required(body, "stance"));
        if (!stance) throw std::invalid_argument("stance must be agree, disagree or question");
        const auto draft = svc.what_if_preview(req.matches[1], body.value("session", std::string("default")),
                                               {required(body, "target"), required(body, "agent"), *stance});
        send_json(res, forum::to_json(draft));
    }));

    s.Get(R"(/api/projects/([^/]+)/what-if)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto session = req.has_param("session") ? req.get_param_value("session") : std::string("default");
        const auto draft = svc.current_preview(req.matches[1], session);
        if (!draft) throw NotFound("no what-if draft in session " + session);
        send_json(res, forum::to_json(*draft));
    }));

    s.Delete(R"(/api/projects/([^/]+)/what-if)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        svc.discard_preview(req.matches[1], req.has_param("session") ? req.get_param_value("session") : "default");
        send_json(res, {{"discarded", true}});
    }));

    s.Post(R"(/api/projects/([^/]+)/what-if/post)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        const auto item = svc.post_preview(req.matches[1], body.value("session", std::string("default")), idem_key(req));
        send_json(res, to_json(item), 201);
    }));

    s.Get(R"(/api/projects/([^/]+)/mindmap)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        mindmap::BuildOptions opts;
        opts.include_provenance = req.get_param_value("provenance") == "1";
        std::optional<mindmap::ZoomLevel> zoom;
        if (req.has_param("zoom")) {
            zoom = mindmap::parse_zoom(req.get_param_value("zoom"));
            if (!zoom) throw std::invalid_argument("zoom must be overview, keyword or summary");
        }
        const auto graph = svc.mindmap(req.matches[1], opts);
        if (req.get_param_value("format") == "dot") {
            res.set_content(mindmap::to_dot(graph), "text/vnd.graphviz");
            return;
        }
        send_json(res, mindmap_json(graph, zoom));
    }));

    s.Get(R"(/api/projects/([^/]+)/personas/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto snap = svc.snapshot(req.matches[1]);
        auto it = snap->personas.find(req.matches[2]);
        if (it == snap->personas.end()) throw NotFound("no persona " + std::string(req.matches[2]));
        send_json(res, it->second);
    }));

    s.Put(R"(/api/projects/([^/]+)/personas/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto persona = body_of(req).get<agent::AgentPersona>();
        if (persona.agent_id != req.matches[2]) throw std::invalid_argument("agent_id does not match the URL");
        svc.edit_persona(req.matches[1], persona, idem_key(req));
        send_json(res, svc.snapshot(req.matches[1])->personas.at(persona.agent_id));
    }));

    s.Get(R"(/api/projects/([^/]+)/memory/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        send_json(res, memory_views_json(svc.memory_views(req.matches[1], req.matches[2])));
    }));

    s.Get(R"(/api/projects/([^/]+)/papers)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto snap = svc.snapshot(req.matches[1]);
        auto papers = json::array();
        for (const auto& [key, p] : snap->graph.papers()) {
            json j = p;
            j["key"] = key;
            papers.push_back(j);
        }
        json collections = json::object();
        for (const auto& [agent_id, keys] : snap->graph.collections()) collections[agent_id] = keys;
        send_json(res, {{"papers", papers}, {"collections", collections}});
    }));

    s.Get(R"(/api/projects/([^/]+)/papers/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto snap = svc.snapshot(req.matches[1]);
        const auto* p = snap->graph.paper(req.matches[2]);
        if (!p) throw NotFound("no paper " + std::string(req.matches[2]));
        json j = *p;
        j["key"] = p->key();
        send_json(res, j);
    }));

    s.Get(R"(/api/projects/([^/]+)/moves/([^/]+)/bibliography)",
          guarded([&](const httplib::Request& req, httplib::Response& res) {
              const auto snap = svc.snapshot(req.matches[1]);
              const auto* m = snap->project->find_move(req.matches[2]);
              if (!m) throw forum::UnknownMove(req.matches[2]);
              auto out = json::array();
              for (const auto& b : knowledge::bibliography_for(m->citations, snap->graph)) {
                  const auto* p = snap->graph.paper(b.paper_key);
                  out.push_back({{"index", b.index},
                                 {"paper_key", b.paper_key},
                                 {"title", b.title},
                                 {"first_author", b.first_author},
                                 {"year", b.year ? json(*b.year) : json()},
                                 {"abstract", p ? p->abstract : std::string{}}});
              }
              send_json(res, out);
          }));

    s.Get(R"(/api/projects/([^/]+)/proposal)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto snap = svc.snapshot(req.matches[1]);
        json doc = forum::to_json(snap->project->proposal);
        json digests = json::object();
        for (auto sec : forum::all_sections) digests[std::string(forum::to_string(sec))] = snap->project->proposal.digest(sec);
        doc["digests"] = digests;
        send_json(res, doc);
    }));

    s.Put(R"(/api/projects/([^/]+)/proposal/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto body = body_of(req);
        std::optional<std::string> base;
        if (body.contains("base_digest") && body["base_digest"].is_string()) base = body["base_digest"].get<std::string>();
        const auto rev = svc.edit_proposal(req.matches[1], req.matches[2], required(body, "text"), base, idem_key(req));
        send_json(res, {{"revision", rev ? forum::to_json(*rev) : json()}});
    }));

    s.Post(R"(/api/projects/([^/]+)/proposal/notes)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto rev = svc.quick_note(req.matches[1], required(body_of(req), "text"), idem_key(req));
        send_json(res, {{"revision", rev ? forum::to_json(*rev) : json()}});
    }));

    s.Get(R"(/api/projects/([^/]+)/events)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto out = json::array();
        for (const auto& e : svc.events(req.matches[1])) out.push_back(to_json(e));
        send_json(res, out);
    }));

    s.Get(R"(/api/projects/([^/]+)/export)", guarded([&](const httplib::Request& req, httplib::Response& res) {
        send_json(res, svc.export_project(req.matches[1]));
    }));
}

}  // namespace agora::service
