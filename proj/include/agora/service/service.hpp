#pragma once

#include "agora/agent/runtime.hpp"
#include "agora/forum/mentions.hpp"
#include "agora/forum/suggestions.hpp"
#include "agora/forum/what_if.hpp"
#include "agora/mindmap/graph.hpp"
#include "agora/mindmap/labels.hpp"
#include "agora/service/config.hpp"
#include "agora/service/state.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace agora::service {

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::uint64_t now() = 0;
};

/// Milliseconds since the epoch.
class SystemClock final : public Clock {
public:
    std::uint64_t now() override;
};

/// 1, 2, 3, ... Used by scripted runs so timestamps are reproducible.
class LogicalClock final : public Clock {
public:
    std::uint64_t now() override { return ++ticks_; }

private:
    std::atomic<std::uint64_t> ticks_{0};
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One item of a reply stream, in application order.
struct StreamItem {
    enum class Kind { Move, Error };
    Kind kind = Kind::Move;
    std::string thread_id;
    std::optional<protocol::DeliberationMove> move;
    std::string agent_id;  // for errors
    std::string message;
};

nlohmann::json to_json(const StreamItem& item);

using StreamSink = std::function<void(const StreamItem&)>;

struct ReplyRequest {
    protocol::MoveId parent;
    std::string text;
    std::string author = "user";
    std::string idempotency_key;
};

struct ReplyResult {
    protocol::MoveId user_move;
    forum::Routing routing;
    std::vector<StreamItem> items;  // the user move first, then agent moves and errors
    bool replayed = false;          // answered from an earlier request with the same key
};

struct ResponderPreview {
    std::string cleaned;
    std::vector<forum::Mention> mentions;
    forum::Routing routing;
    std::string notify_line;
};

struct ServiceDeps {
    std::shared_ptr<agent::LanguageModelProvider> provider;
    std::vector<std::shared_ptr<knowledge::ScholarClient>> scholars;
    std::map<std::string, agent::AgentPersona> catalog;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<EventStore> store;  // null keeps events in memory only
};

/// Provider, scholar clients, persona catalog and store as configured.
ServiceDeps make_deps(const ServiceConfig& config);

/// Projects, threads, agent turns, previews and reads. Every change becomes an
/// event applied under the project's single writer lock; readers work on
/// immutable snapshots.
class DeliberationService {
public:
    DeliberationService(ServiceConfig config, ServiceDeps deps);
    ~DeliberationService();

    const ServiceConfig& config() const { return config_; }
    const std::map<std::string, agent::AgentPersona>& catalog() const { return deps_.catalog; }

    /// Rebuilds every project found in the event store.
    void load_from_store();

    std::string create_project(const std::string& title, const std::map<forum::Section, std::string>& proposal,
                               const std::vector<std::string>& roster, const std::string& idempotency_key = {});
    std::vector<std::string> project_ids() const;

    std::vector<forum::ThreadSuggestion> suggest_threads(const std::string& project_id);
    /// Confirms a (possibly edited) suggestion as a thread opened by `opener`,
    /// or by the first roster agent.
    std::string create_thread(const std::string& project_id, const std::string& title, const std::string& description,
                              const std::optional<std::string>& opener = std::nullopt,
                              const std::string& idempotency_key = {});
    std::string branch_thread(const std::string& project_id, const protocol::MoveId& source_move,
                              const std::string& title, const std::string& idempotency_key = {});

    ResponderPreview preview_responders(const std::string& project_id, const protocol::MoveId& parent,
                                        const std::string& text) const;
    /// Posts the human reply, then the responders' moves; each item is handed
    /// to `sink` as soon as it is applied.
    ReplyResult post_reply(const std::string& project_id, const ReplyRequest& request, const StreamSink& sink = {});

    forum::PreviewDraft what_if_preview(const std::string& project_id, const std::string& session,
                                        const forum::WhatIfRequest& request);
    std::optional<forum::PreviewDraft> current_preview(const std::string& project_id, const std::string& session) const;
    void discard_preview(const std::string& project_id, const std::string& session);
    /// Validates and posts the session's draft. Throws protocol::ProtocolError
    /// when the draft is illegal (the draft stays available).
    StreamItem post_preview(const std::string& project_id, const std::string& session,
                            const std::string& idempotency_key = {});

    std::optional<forum::Revision> edit_proposal(const std::string& project_id, const std::string& section,
                                                 const std::string& text,
                                                 const std::optional<std::string>& base_digest = std::nullopt,
                                                 const std::string& idempotency_key = {});
    std::optional<forum::Revision> quick_note(const std::string& project_id, const std::string& note,
                                              const std::string& idempotency_key = {});
    void edit_persona(const std::string& project_id, const agent::AgentPersona& persona,
                      const std::string& idempotency_key = {});
    void set_commitment_status(const std::string& project_id, const std::string& thread_id, const std::string& owner,
                               const protocol::MoveId& source_move, protocol::CommitmentStatus status);

    std::shared_ptr<const ProjectState> snapshot(const std::string& project_id) const;
    std::vector<Event> events(const std::string& project_id) const;
    std::string digest(const std::string& project_id) const;
    mindmap::MindMapGraph mindmap(const std::string& project_id, const mindmap::BuildOptions& options = {});
    agent::MemoryViews memory_views(const std::string& project_id, const std::string& agent_id) const;
    nlohmann::json export_project(const std::string& project_id) const;

private:
    struct ProjectHandle;
    class Writer;

    std::shared_ptr<ProjectHandle> handle(const std::string& project_id) const;
    agent::RuntimeSettings runtime_settings() const;
    std::vector<knowledge::ScholarClient*> scholar_ptrs() const;
    void post_agent_outcome(Writer& w, const std::string& thread_id, const std::string& agent_id,
                            const agent::TurnOutcome& outcome, const StreamSink& sink, std::vector<StreamItem>& items,
                            const std::string& idempotency_key = {});
    std::optional<forum::Revision> commit_proposal_edit(Writer& w, const std::string& section, const std::string& text,
                                                        const std::optional<std::string>& base_digest,
                                                        const std::string& idempotency_key);
    void distill(Writer& w, const std::string& thread_id, const std::string& agent_id);
    void run_responders(Writer& w, const std::string& thread_id, const protocol::MoveId& parent,
                        const std::vector<std::string>& responders, const StreamSink& sink,
                        std::vector<StreamItem>& items, std::vector<protocol::MoveId>* posted);

    ServiceConfig config_;
    ServiceDeps deps_;
    mindmap::Labeler labeler_;
    mutable std::mutex projects_mutex_;
    std::map<std::string, std::shared_ptr<ProjectHandle>> projects_;
    std::map<std::string, std::string> project_keys_;  // create_project idempotency
};

}  // namespace agora::service
