#include "agora/service/service.hpp"

#include "agora/common/http_client.hpp"
#include "agora/knowledge/replay_transport.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <filesystem>
#include <future>
#include <set>

namespace agora::service {

using nlohmann::json;
using protocol::DeliberationMove;

std::uint64_t SystemClock::now() {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

json to_json(const StreamItem& item) {
    json j{{"kind", item.kind == StreamItem::Kind::Move ? "move" : "error"}, {"thread_id", item.thread_id}};
    if (item.move) j["move"] = *item.move;
    if (!item.agent_id.empty()) j["agent_id"] = item.agent_id;
    if (!item.message.empty()) j["message"] = item.message;
    return j;
}

ServiceDeps make_deps(const ServiceConfig& config) {
    ServiceDeps deps;
    if (config.provider.kind == "live") {
        auto transport = std::make_shared<net::HttpClient>(
            net::HttpClientOptions{config.provider.base_url, std::chrono::milliseconds(config.provider.timeout_ms), {}});
        agent::ChatProviderOptions opts;
        opts.model = config.provider.model;
        opts.api_key = config.provider.api_key;
        deps.provider = std::make_shared<agent::ChatCompletionsProvider>(transport, opts);
    } else {
        deps.provider = std::make_shared<agent::MockProvider>();
    }

    const auto& sc = config.scholar;
    if (sc.mode == "live") {
        const auto client = [&](const std::string& url) {
            return std::make_shared<net::HttpClient>(net::HttpClientOptions{
                url, std::chrono::milliseconds(sc.timeout_ms), std::chrono::milliseconds(sc.min_interval_ms)});
        };
        deps.scholars.push_back(std::make_shared<knowledge::SemanticScholarClient>(client(sc.semantic_scholar_url),
                                                                                   sc.semantic_scholar_key));
        deps.scholars.push_back(std::make_shared<knowledge::OpenAlexClient>(client(sc.openalex_url), sc.openalex_mailto));
    } else {
        const std::filesystem::path dir = sc.fixtures_dir;
        if (std::filesystem::exists(dir / "semantic_scholar.json")) {
            deps.scholars.push_back(std::make_shared<knowledge::SemanticScholarClient>(
                knowledge::RecordedCorpusTransport::from_file(dir / "semantic_scholar.json")));
        }
        if (std::filesystem::exists(dir / "openalex.json")) {
            deps.scholars.push_back(std::make_shared<knowledge::OpenAlexClient>(
                knowledge::RecordedCorpusTransport::from_file(dir / "openalex.json")));
        }
        if (deps.scholars.empty()) spdlog::warn("no scholar fixtures found in {}", dir.string());
    }

    if (!config.persona_dir.empty() && std::filesystem::is_directory(config.persona_dir)) {
        deps.catalog = agent::load_persona_catalog(config.persona_dir);
    }
    deps.clock = std::make_shared<SystemClock>();
    if (config.data_dir.empty()) {
        deps.store = std::make_shared<MemoryEventStore>();
    } else {
        deps.store = std::make_shared<FileEventStore>(config.data_dir);
    }
    return deps;
}

struct DeliberationService::ProjectHandle {
    std::string project_id;
    std::mutex writer;
    mutable std::mutex snap_mutex;
    std::shared_ptr<const ProjectState> snapshot = std::make_shared<const ProjectState>();
    std::vector<Event> log;
    mutable std::mutex panels_mutex;
    std::map<std::string, forum::WhatIfPanel> panels;
};

// Holds the project's writer lock for one command and commits events through
// a private working copy of the state.
class DeliberationService::Writer {
public:
    Writer(DeliberationService& service, std::shared_ptr<ProjectHandle> handle)
        : service_(service), handle_(std::move(handle)), lock_(handle_->writer) {
        std::lock_guard snap(handle_->snap_mutex);
        state = *handle_->snapshot;
    }

    const Event& commit(EventKind kind, json payload) {
        Event event{state.seq + 1, kind, std::move(payload), service_.deps_.clock->now()};
        ProjectState next = state;
        apply_event(next, event);
        if (service_.deps_.store) service_.deps_.store->append(handle_->project_id, event);
        state = std::move(next);
        std::lock_guard snap(handle_->snap_mutex);
        handle_->log.push_back(std::move(event));
        handle_->snapshot = std::make_shared<const ProjectState>(state);
        return handle_->log.back();
    }

    const forum::Project& project() const {
        if (!state.project) throw NotFound("project " + handle_->project_id + " does not exist");
        return *state.project;
    }

    const forum::Thread& thread(const std::string& thread_id) const {
        const auto* t = project().find_thread(thread_id);
        if (!t) throw forum::UnknownThread(thread_id);
        return *t;
    }

    std::uint64_t timestamp_for(const protocol::ThreadState& thread) {
        std::uint64_t ts = service_.deps_.clock->now();
        if (!thread.empty()) ts = std::max(ts, thread.moves().back().timestamp + 1);
        return ts;
    }

    std::optional<Event> event_for_key(const std::string& key) const {
        if (key.empty()) return std::nullopt;
        auto it = state.idempotency.find(key);
        if (it == state.idempotency.end()) return std::nullopt;
        std::lock_guard snap(handle_->snap_mutex);
        return handle_->log.at(it->second - 1);
    }

    ProjectHandle& handle() { return *handle_; }

    ProjectState state;

private:
    DeliberationService& service_;
    std::shared_ptr<ProjectHandle> handle_;
    std::unique_lock<std::mutex> lock_;
};

namespace {

json with_key(json payload, const std::string& key) {
    if (!key.empty()) payload["idempotency_key"] = key;
    return payload;
}

void ensure_legal(const protocol::ThreadState& thread, const DeliberationMove& move) {
    if (auto v = protocol::validate_move(thread, move)) throw protocol::ProtocolError(*v);
}

}  // namespace

namespace {

ServiceDeps with_defaults(ServiceDeps deps) {
    if (!deps.provider) deps.provider = std::make_shared<agent::MockProvider>();
    if (!deps.clock) deps.clock = std::make_shared<SystemClock>();
    return deps;
}

}  // namespace

DeliberationService::DeliberationService(ServiceConfig config, ServiceDeps deps)
    : config_(std::move(config)), deps_(with_defaults(std::move(deps))), labeler_(deps_.provider.get()) {}

DeliberationService::~DeliberationService() = default;

void DeliberationService::load_from_store() {
    if (!deps_.store) return;
    std::lock_guard lock(projects_mutex_);
    for (const auto& id : deps_.store->projects()) {
        auto h = std::make_shared<ProjectHandle>();
        h->project_id = id;
        h->log = deps_.store->load(id);
        h->snapshot = std::make_shared<const ProjectState>(replay(h->log));
        if (!h->log.empty() && h->log.front().payload.contains("idempotency_key")) {
            project_keys_[h->log.front().payload["idempotency_key"].get<std::string>()] = id;
        }
        projects_[id] = h;
        spdlog::info("loaded project {} ({} events)", id, h->log.size());
    }
}

std::shared_ptr<DeliberationService::ProjectHandle> DeliberationService::handle(const std::string& project_id) const {
    std::lock_guard lock(projects_mutex_);
    auto it = projects_.find(project_id);
    if (it == projects_.end()) throw NotFound("project " + project_id + " does not exist");
    return it->second;
}

agent::RuntimeSettings DeliberationService::runtime_settings() const {
    return {config_.tool_round_cap, config_.memory_k, config_.max_snippets};
}

std::vector<knowledge::ScholarClient*> DeliberationService::scholar_ptrs() const {
    std::vector<knowledge::ScholarClient*> out;
    for (const auto& s : deps_.scholars) out.push_back(s.get());
    return out;
}

std::string DeliberationService::create_project(const std::string& title,
                                                const std::map<forum::Section, std::string>& proposal,
                                                const std::vector<std::string>& roster,
                                                const std::string& idempotency_key) {
    auto roster_json = json::array();
    for (const auto& id : roster) {
        auto it = deps_.catalog.find(id);
        if (it == deps_.catalog.end()) throw forum::UnknownAgent(id);
        roster_json.push_back(it->second);
    }

    std::shared_ptr<ProjectHandle> h;
    {
        std::lock_guard lock(projects_mutex_);
        if (!idempotency_key.empty()) {
            if (auto it = project_keys_.find(idempotency_key); it != project_keys_.end()) return it->second;
        }
        std::size_t n = projects_.size() + 1;
        while (projects_.count("p" + std::to_string(n))) ++n;
        h = std::make_shared<ProjectHandle>();
        h->project_id = "p" + std::to_string(n);
        projects_[h->project_id] = h;
        if (!idempotency_key.empty()) project_keys_[idempotency_key] = h->project_id;
    }
    try {
        Writer w(*this, h);
        w.commit(EventKind::ProjectCreated, with_key({{"project_id", h->project_id},
                                                      {"title", title},
                                                      {"proposal", forum::sections_to_json(proposal)},
                                                      {"roster", roster_json}},
                                                     idempotency_key));
    } catch (...) {
        std::lock_guard lock(projects_mutex_);
        projects_.erase(h->project_id);
        if (!idempotency_key.empty()) project_keys_.erase(idempotency_key);
        throw;
    }
    return h->project_id;
}

std::vector<std::string> DeliberationService::project_ids() const {
    std::lock_guard lock(projects_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : projects_) out.push_back(id);
    return out;
}

std::vector<forum::ThreadSuggestion> DeliberationService::suggest_threads(const std::string& project_id) {
    const auto snap = snapshot(project_id);
    return forum::suggest_threads(snap->project->proposal, *deps_.provider);
}

std::string DeliberationService::create_thread(const std::string& project_id, const std::string& title,
                                               const std::string& description,
                                               const std::optional<std::string>& opener,
                                               const std::string& idempotency_key) {
    Writer w(*this, handle(project_id));
    if (auto e = w.event_for_key(idempotency_key)) return e->payload.at("thread_id").get<std::string>();
    const auto& project = w.project();
    if (project.roster.empty()) throw forum::ForumError("project " + project_id + " has an empty roster");
    const std::string who = opener.value_or(project.roster.front());
    if (!project.in_roster(who)) throw forum::UnknownAgent(who);
    if (title.empty()) throw forum::ForumError("thread title is empty");

    const auto thread_id = forum::next_thread_id(project);
    const auto root = forum::make_thread_root(thread_id, who, title, description, deps_.clock->now());
    w.commit(EventKind::ThreadCreated,
             with_key({{"thread_id", thread_id}, {"title", title}, {"description", description}, {"root", root}},
                      idempotency_key));
    return thread_id;
}

std::string DeliberationService::branch_thread(const std::string& project_id, const protocol::MoveId& source_move,
                                               const std::string& title, const std::string& idempotency_key) {
    Writer w(*this, handle(project_id));
    if (auto e = w.event_for_key(idempotency_key)) return e->payload.at("thread_id").get<std::string>();
    const auto& project = w.project();
    const forum::Thread* source = project.thread_of(source_move);
    if (!source) throw forum::UnknownMove(source_move);

    const auto thread_id = forum::next_thread_id(project);
    const auto root = forum::make_branch_root(project, thread_id, source_move, title, deps_.clock->now());
    w.commit(EventKind::ThreadCreated,
             with_key({{"thread_id", thread_id},
                       {"title", title},
                       {"description", ""},
                       {"root", root},
                       {"provenance", {{"source_thread", source->thread_id}, {"source_move", source_move}}}},
                      idempotency_key));
    return thread_id;
}

ResponderPreview DeliberationService::preview_responders(const std::string& project_id, const protocol::MoveId& parent,
                                                         const std::string& text) const {
    const auto snap = snapshot(project_id);
    const auto& project = *snap->project;
    const DeliberationMove* p = project.find_move(parent);
    if (!p) throw forum::UnknownMove(parent);
    auto parsed = forum::parse_mentions(text, project.roster);
    auto routing = forum::resolve_responders(*p, parsed.mentions, project.roster, config_.responder_cap);
    return {parsed.cleaned, parsed.mentions, routing, forum::notify_line(routing)};
}

void DeliberationService::distill(Writer& w, const std::string& thread_id, const std::string& agent_id) {
    const auto& moves = w.thread(thread_id).state.moves();
    const std::size_t n = std::min(config_.distill_window, moves.size());
    if (n == 0) return;
    try {
        const auto snippets = agent::distill_memory(w.state.personas.at(agent_id), moves.subspan(moves.size() - n, n),
                                                    w.state.memories.at(agent_id), *deps_.provider, config_.max_snippets);
        if (snippets.empty()) return;
        auto arr = json::array();
        for (const auto& s : snippets) arr.push_back(s);
        w.commit(EventKind::MemoryDistilled, {{"agent_id", agent_id}, {"snippets", arr}});
    } catch (const std::exception& e) {
        spdlog::warn("memory distillation for {} failed: {}", agent_id, e.what());
    }
}

void DeliberationService::post_agent_outcome(Writer& w, const std::string& thread_id, const std::string& agent_id,
                                             const agent::TurnOutcome& outcome, const StreamSink& sink,
                                             std::vector<StreamItem>& items, const std::string& idempotency_key) {
    const auto& state = w.thread(thread_id).state;
    DeliberationMove move = outcome.move;
    move.move_id = forum::next_move_id(state);
    move.timestamp = w.timestamp_for(state);
    ensure_legal(state, move);

    // Responders search concurrently, so an earlier responder may already have
    // stored the same work under another provider's key.
    std::vector<knowledge::PaperRecord> papers;
    std::map<std::string, std::string> rekey;
    for (const auto& paper : outcome.new_papers) {
        const auto* known = w.state.graph.find_equivalent(paper);
        papers.push_back(known ? *known : paper);
        rekey[paper.key()] = papers.back().key();
    }
    auto citations = move.citations;
    for (auto& key : citations) {
        if (auto it = rekey.find(key); it != rekey.end()) key = it->second;
    }
    if (std::set<std::string>(citations.begin(), citations.end()).size() == citations.size()) {
        move.citations = citations;
    } else {
        papers = outcome.new_papers;
    }

    for (const auto& paper : papers) {
        const auto collection = w.state.graph.collection(agent_id);
        const bool collected = std::find(collection.begin(), collection.end(), paper.key()) != collection.end();
        if (w.state.graph.contains_paper(paper.key()) && collected) continue;
        w.commit(EventKind::PaperInserted, {{"paper", paper}, {"agent_id", agent_id}});
    }
    w.commit(EventKind::MovePosted, with_key({{"thread_id", thread_id}, {"move", move}}, idempotency_key));
    StreamItem item{StreamItem::Kind::Move, thread_id, move, agent_id, {}};
    items.push_back(item);
    if (sink) sink(item);
    distill(w, thread_id, agent_id);
}

void DeliberationService::run_responders(Writer& w, const std::string& thread_id, const protocol::MoveId& parent,
                                         const std::vector<std::string>& responders, const StreamSink& sink,
                                         std::vector<StreamItem>& items, std::vector<protocol::MoveId>* posted) {
    struct Result {
        std::optional<agent::TurnOutcome> outcome;
        std::string error;
    };
    // Turns run concurrently against one snapshot; results are applied in
    // responder order so the outcome does not depend on scheduling.
    const auto base = std::make_shared<const ProjectState>(w.state);
    const auto scholars = scholar_ptrs();
    const auto settings = runtime_settings();
    std::vector<std::future<Result>> futures;
    for (const auto& agent_id : responders) {
        futures.push_back(std::async(std::launch::async, [this, base, &scholars, settings, thread_id, parent, agent_id] {
            try {
                const auto& persona = base->personas.at(agent_id);
                knowledge::KnowledgeGraph graph = base->graph;
                agent::ToolEnvironment env;
                env.graph = &graph;
                env.scholars = scholars;
                env.agent_id = agent_id;
                env.search_limit = config_.scholar.search_limit;
                const auto* thread = base->project->find_thread(thread_id);
                return Result{agent::run_turn(persona, {&thread->state, parent}, base->memories.at(agent_id), env,
                                              *deps_.provider, settings),
                              {}};
            } catch (const std::exception& e) {
                return Result{std::nullopt, e.what()};
            }
        }));
    }
    for (std::size_t i = 0; i < responders.size(); ++i) {
        Result r = futures[i].get();
        if (r.outcome) {
            try {
                post_agent_outcome(w, thread_id, responders[i], *r.outcome, sink, items);
                if (posted) posted->push_back(items.back().move->move_id);
                continue;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
        spdlog::warn("turn of {} failed: {}", responders[i], r.error);
        StreamItem item{StreamItem::Kind::Error, thread_id, std::nullopt, responders[i], r.error};
        items.push_back(item);
        if (sink) sink(item);
    }
}

ReplyResult DeliberationService::post_reply(const std::string& project_id, const ReplyRequest& request,
                                            const StreamSink& sink) {
    Writer w(*this, handle(project_id));
    const auto& project = w.project();
    ReplyResult result;

    if (auto e = w.event_for_key(request.idempotency_key)) {
        const auto thread_id = e->payload.at("thread_id").get<std::string>();
        const auto user_move = e->payload.at("move").get<DeliberationMove>();
        result.user_move = user_move.move_id;
        result.replayed = true;
        result.items.push_back({StreamItem::Kind::Move, thread_id, user_move, {}, {}});
        for (const auto& m : w.thread(thread_id).state.moves()) {
            if (m.target == user_move.move_id && m.author.is_agent()) {
                result.items.push_back({StreamItem::Kind::Move, thread_id, m, m.author.id, {}});
            }
        }
        for (const auto& item : result.items) {
            if (sink) sink(item);
        }
        return result;
    }

    const forum::Thread* thread = project.thread_of(request.parent);
    if (!thread) throw forum::UnknownMove(request.parent);
    const std::string thread_id = thread->thread_id;
    auto parsed = forum::parse_mentions(request.text, project.roster);
    result.routing = forum::resolve_responders(*thread->state.find(request.parent), parsed.mentions, project.roster,
                                               config_.responder_cap);

    DeliberationMove user;
    user.move_id = forum::next_move_id(thread->state);
    user.author = protocol::Participant::human(request.author);
    user.target = request.parent;
    user.body = parsed.cleaned;
    user.timestamp = w.timestamp_for(thread->state);
    ensure_legal(thread->state, user);
    auto mentions = json::array();
    for (const auto& m : parsed.mentions) mentions.push_back({{"agent_id", m.agent_id}, {"begin", m.begin}, {"end", m.end}});
    w.commit(EventKind::MovePosted,
             with_key({{"thread_id", thread_id}, {"move", user}, {"mentions", mentions}}, request.idempotency_key));
    result.user_move = user.move_id;
    StreamItem first{StreamItem::Kind::Move, thread_id, user, {}, {}};
    result.items.push_back(first);
    if (sink) sink(first);

    std::vector<protocol::MoveId> posted;
    run_responders(w, thread_id, user.move_id, result.routing.responders, sink, result.items, &posted);

    if (config_.follow_on_round && posted.size() >= 2) {
        // One extra round: each responder answers the next responder's move.
        std::vector<std::pair<std::string, protocol::MoveId>> pairs;
        for (std::size_t i = 0; i < posted.size(); ++i) {
            const auto* m = w.thread(thread_id).state.find(posted[(i + 1) % posted.size()]);
            pairs.emplace_back(w.thread(thread_id).state.find(posted[i])->author.id, m->move_id);
        }
        for (const auto& [agent_id, target] : pairs) {
            run_responders(w, thread_id, target, {agent_id}, sink, result.items, nullptr);
        }
    }
    return result;
}

forum::PreviewDraft DeliberationService::what_if_preview(const std::string& project_id, const std::string& session,
                                                         const forum::WhatIfRequest& request) {
    const auto h = handle(project_id);
    std::shared_ptr<const ProjectState> snap;
    {
        std::lock_guard lock(h->snap_mutex);
        snap = h->snapshot;
    }
    if (!snap->project) throw NotFound("project " + project_id + " does not exist");
    auto persona = snap->personas.find(request.agent_id);
    auto memory = snap->memories.find(request.agent_id);
    const auto scholars = scholar_ptrs();
    forum::PreviewInputs inputs;
    inputs.persona = persona == snap->personas.end() ? nullptr : &persona->second;
    inputs.memory = memory == snap->memories.end() ? nullptr : &memory->second;
    inputs.graph = &snap->graph;
    inputs.scholars = scholars;
    inputs.settings = runtime_settings();
    auto draft = forum::what_if_preview(*snap->project, request, inputs, *deps_.provider);

    std::lock_guard lock(h->panels_mutex);
    return h->panels[session].show(std::move(draft));
}

std::optional<forum::PreviewDraft> DeliberationService::current_preview(const std::string& project_id,
                                                                        const std::string& session) const {
    const auto h = handle(project_id);
    std::lock_guard lock(h->panels_mutex);
    auto it = h->panels.find(session);
    return it == h->panels.end() ? std::nullopt : it->second.draft();
}

void DeliberationService::discard_preview(const std::string& project_id, const std::string& session) {
    const auto h = handle(project_id);
    std::lock_guard lock(h->panels_mutex);
    h->panels.erase(session);
}

StreamItem DeliberationService::post_preview(const std::string& project_id, const std::string& session,
                                             const std::string& idempotency_key) {
    Writer w(*this, handle(project_id));
    if (auto e = w.event_for_key(idempotency_key)) {
        auto m = e->payload.at("move").get<DeliberationMove>();
        return {StreamItem::Kind::Move, e->payload.at("thread_id").get<std::string>(), m, m.author.id, {}};
    }
    auto draft = current_preview(project_id, session);
    if (!draft) throw NotFound("no what-if draft in session " + session);

    agent::TurnOutcome outcome;
    outcome.move = draft->move;
    outcome.new_papers = draft->papers;
    std::vector<StreamItem> items;
    post_agent_outcome(w, draft->thread_id, draft->request.agent_id, outcome, {}, items, idempotency_key);
    discard_preview(project_id, session);
    return items.front();
}

std::optional<forum::Revision> DeliberationService::edit_proposal(const std::string& project_id,
                                                                  const std::string& section, const std::string& text,
                                                                  const std::optional<std::string>& base_digest,
                                                                  const std::string& idempotency_key) {
    Writer w(*this, handle(project_id));
    if (auto e = w.event_for_key(idempotency_key)) return forum::revision_from_json(e->payload.at("revision"));
    return commit_proposal_edit(w, section, text, base_digest, idempotency_key);
}

std::optional<forum::Revision> DeliberationService::quick_note(const std::string& project_id, const std::string& note,
                                                               const std::string& idempotency_key) {
    // Read and append under one writer lock so concurrent notes never go stale.
    Writer w(*this, handle(project_id));
    if (auto e = w.event_for_key(idempotency_key)) return forum::revision_from_json(e->payload.at("revision"));
    const auto current = w.project().proposal.text(forum::Section::Notes);
    return commit_proposal_edit(w, "Notes", current.empty() ? note : current + "\n" + note,
                                forum::section_digest(current), idempotency_key);
}

std::optional<forum::Revision> DeliberationService::commit_proposal_edit(Writer& w, const std::string& section,
                                                                         const std::string& text,
                                                                         const std::optional<std::string>& base_digest,
                                                                         const std::string& idempotency_key) {
    forum::ProposalDocument scratch = w.project().proposal;
    const auto revision = forum::record_proposal_edit(scratch, section, text, deps_.clock->now(), base_digest);
    if (!revision) return std::nullopt;
    json payload{{"section", section}, {"new_text", text}, {"revision", forum::to_json(*revision)}};
    payload["base_digest"] = base_digest ? json(*base_digest) : json();
    w.commit(EventKind::ProposalEdited, with_key(payload, idempotency_key));
    return revision;
}

void DeliberationService::edit_persona(const std::string& project_id, const agent::AgentPersona& persona,
                                       const std::string& idempotency_key) {
    Writer w(*this, handle(project_id));
    if (w.event_for_key(idempotency_key)) return;
    if (!w.project().in_roster(persona.agent_id)) throw forum::UnknownAgent(persona.agent_id);
    w.commit(EventKind::PersonaEdited, with_key({{"persona", persona}}, idempotency_key));
}

void DeliberationService::set_commitment_status(const std::string& project_id, const std::string& thread_id,
                                                const std::string& owner, const protocol::MoveId& source_move,
                                                protocol::CommitmentStatus status) {
    Writer w(*this, handle(project_id));
    protocol::ThreadState probe = w.thread(thread_id).state;
    probe.set_commitment_status(owner, source_move, status);
    w.commit(EventKind::CommitmentStatusChanged, {{"thread_id", thread_id},
                                                  {"owner", owner},
                                                  {"source_move", source_move},
                                                  {"status", protocol::to_string(status)}});
}

std::shared_ptr<const ProjectState> DeliberationService::snapshot(const std::string& project_id) const {
    const auto h = handle(project_id);
    std::lock_guard lock(h->snap_mutex);
    if (!h->snapshot->project) throw NotFound("project " + project_id + " does not exist");
    return h->snapshot;
}

std::vector<Event> DeliberationService::events(const std::string& project_id) const {
    const auto h = handle(project_id);
    std::lock_guard lock(h->snap_mutex);
    return h->log;
}

std::string DeliberationService::digest(const std::string& project_id) const {
    return state_digest(*snapshot(project_id));
}

mindmap::MindMapGraph DeliberationService::mindmap(const std::string& project_id, const mindmap::BuildOptions& options) {
    const auto snap = snapshot(project_id);
    return mindmap::build_graph(*snap->project, labeler_, options);
}

agent::MemoryViews DeliberationService::memory_views(const std::string& project_id, const std::string& agent_id) const {
    const auto snap = snapshot(project_id);
    auto it = snap->memories.find(agent_id);
    if (it == snap->memories.end()) throw NotFound("no memory for agent " + agent_id);
    return agent::memory_views(it->second);
}

json DeliberationService::export_project(const std::string& project_id) const {
    const auto snap = snapshot(project_id);
    json doc = forum::export_project(*snap->project);
    json personas = json::array();
    for (const auto& [_, p] : snap->personas) personas.push_back(p);
    doc["personas"] = personas;
    doc["knowledge_graph"] = snap->graph.snapshot();
    doc["state_digest"] = state_digest(*snap);
    return doc;
}

}  // namespace agora::service
