#include "agora/service/state.hpp"

#include "agora/common/digest.hpp"
#include "agora/knowledge/citations.hpp"
#include "agora/protocol/invariants.hpp"

#include <set>

namespace agora::service {

using nlohmann::json;

namespace {

forum::Project& require_project(ProjectState& s) {
    if (!s.project) throw std::invalid_argument("no project_created event yet");
    return *s.project;
}

forum::Thread& require_thread(ProjectState& s, const std::string& thread_id) {
    auto* t = require_project(s).find_thread(thread_id);
    if (!t) throw forum::UnknownThread(thread_id);
    return *t;
}

void apply_project_created(ProjectState& s, const json& p) {
    if (s.project) throw std::invalid_argument("project already created");
    forum::Project project;
    project.project_id = p.at("project_id").get<std::string>();
    project.title = p.at("title").get<std::string>();
    project.proposal = forum::ProposalDocument(forum::sections_from_json(p.at("proposal")));
    for (const auto& pj : p.at("roster")) {
        auto persona = pj.get<agent::AgentPersona>();
        if (s.personas.count(persona.agent_id)) throw std::invalid_argument("duplicate roster agent " + persona.agent_id);
        project.roster.push_back(persona.agent_id);
        s.memories.emplace(persona.agent_id, agent::MemoryStore(persona.agent_id));
        s.personas.emplace(persona.agent_id, std::move(persona));
    }
    s.project = std::move(project);
}

void apply_thread_created(ProjectState& s, const json& p) {
    std::optional<forum::Provenance> provenance;
    if (p.contains("provenance") && !p["provenance"].is_null()) {
        provenance = forum::Provenance{p["provenance"].at("source_thread").get<std::string>(),
                                       p["provenance"].at("source_move").get<std::string>()};
    }
    forum::add_thread(require_project(s), p.at("thread_id").get<std::string>(), p.at("title").get<std::string>(),
                      p.value("description", std::string{}), p.at("root").get<protocol::DeliberationMove>(), provenance);
}

void apply_move_posted(ProjectState& s, const json& p) {
    auto move = p.at("move").get<protocol::DeliberationMove>();
    if (move.author.is_agent() && !require_project(s).in_roster(move.author.id)) {
        throw std::invalid_argument("agent " + move.author.id + " is not in the roster");
    }
    for (const auto& key : move.citations) {
        if (!s.graph.contains_paper(key)) throw std::invalid_argument("citation " + key + " is not in the knowledge graph");
    }
    require_thread(s, p.at("thread_id").get<std::string>()).state.apply(move);
}

void apply_proposal_edited(ProjectState& s, const json& p) {
    auto& doc = require_project(s).proposal;
    const auto recorded = forum::revision_from_json(p.at("revision"));
    std::optional<std::string> base;
    if (p.contains("base_digest") && p["base_digest"].is_string()) base = p["base_digest"].get<std::string>();
    const auto applied = forum::record_proposal_edit(doc, p.at("section").get<std::string>(),
                                                     p.at("new_text").get<std::string>(), recorded.timestamp, base);
    if (!applied || *applied != recorded) throw std::invalid_argument("revision does not match the document history");
}

void apply_persona_edited(ProjectState& s, const json& p) {
    auto persona = p.at("persona").get<agent::AgentPersona>();
    auto it = s.personas.find(persona.agent_id);
    if (it == s.personas.end()) throw std::invalid_argument("persona " + persona.agent_id + " is not in the roster");
    it->second = std::move(persona);
}

void apply_memory_distilled(ProjectState& s, const json& p) {
    const auto agent_id = p.at("agent_id").get<std::string>();
    auto it = s.memories.find(agent_id);
    if (it == s.memories.end()) throw std::invalid_argument("no memory store for " + agent_id);
    for (const auto& sj : p.at("snippets")) it->second.append(sj.get<agent::MemorySnippet>());
}

void apply_paper_inserted(ProjectState& s, const json& p) {
    const auto paper = p.at("paper").get<knowledge::PaperRecord>();
    if (paper.title.empty()) throw std::invalid_argument("paper without a title");
    s.graph.insert(paper);
    if (p.contains("agent_id") && p["agent_id"].is_string()) {
        s.graph.add_to_collection(p["agent_id"].get<std::string>(), paper.key());
    }
}

void apply_status_changed(ProjectState& s, const json& p) {
    const auto status = protocol::parse_commitment_status(p.at("status").get<std::string>());
    if (!status) throw std::invalid_argument("unknown commitment status");
    require_thread(s, p.at("thread_id").get<std::string>())
        .state.set_commitment_status(p.at("owner").get<std::string>(), p.at("source_move").get<std::string>(), *status);
}

}  // namespace

void apply_event(ProjectState& state, const Event& event) {
    if (event.seq != state.seq + 1) throw GapInLog(state.seq + 1, event.seq);
    ProjectState next = state;
    try {
        const json& p = event.payload;
        switch (event.kind) {
        case EventKind::ProjectCreated: apply_project_created(next, p); break;
        case EventKind::ThreadCreated: apply_thread_created(next, p); break;
        case EventKind::MovePosted: apply_move_posted(next, p); break;
        case EventKind::ProposalEdited: apply_proposal_edited(next, p); break;
        case EventKind::PersonaEdited: apply_persona_edited(next, p); break;
        case EventKind::MemoryDistilled: apply_memory_distilled(next, p); break;
        case EventKind::PaperInserted: apply_paper_inserted(next, p); break;
        case EventKind::CommitmentStatusChanged: apply_status_changed(next, p); break;
        }
        if (p.contains("idempotency_key") && p["idempotency_key"].is_string()) {
            next.idempotency.emplace(p["idempotency_key"].get<std::string>(), event.seq);
        }
    } catch (const GapInLog&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptPayload(event.seq, e.what());
    }
    next.seq = event.seq;
    next.last_at = std::max(next.last_at, event.at);
    state = std::move(next);
}

ProjectState replay(std::span<const Event> events) {
    ProjectState state;
    for (const auto& e : events) apply_event(state, e);
    return state;
}

json to_json(const ProjectState& s) {
    json personas = json::object();
    for (const auto& [id, p] : s.personas) personas[id] = p;
    json memories = json::object();
    for (const auto& [id, store] : s.memories) {
        auto snippets = json::array();
        for (const auto& sn : store.snippets()) snippets.push_back(sn);
        memories[id] = snippets;
    }
    json idempotency = json::object();
    for (const auto& [k, seq] : s.idempotency) idempotency[k] = seq;
    return {{"project", s.project ? forum::to_json(*s.project) : json()},
            {"personas", personas},
            {"memories", memories},
            {"graph", s.graph.snapshot()},
            {"idempotency", idempotency},
            {"seq", s.seq}};
}

std::string state_digest(const ProjectState& state) { return sha256_hex(to_json(state).dump()); }

std::vector<std::string> check_state_invariants(const ProjectState& s) {
    std::vector<std::string> problems;
    const auto add = [&](const std::string& prefix, const std::vector<std::string>& more) {
        for (const auto& m : more) problems.push_back(prefix + m);
    };
    add("graph: ", s.graph.check_integrity());

    if (s.project) {
        const auto& project = *s.project;
        std::set<std::string> thread_ids;
        for (const auto& t : project.threads) {
            if (!thread_ids.insert(t.thread_id).second) problems.push_back("duplicate thread " + t.thread_id);
            add(t.thread_id + ": ", protocol::check_thread_invariants(t.state));
            for (const auto& m : t.state.moves()) {
                for (const auto& key : m.citations) {
                    if (!s.graph.contains_paper(key)) problems.push_back(m.move_id + ": citation " + key + " does not resolve");
                }
                if (!knowledge::markers_contiguous(m.body, m.citations)) {
                    problems.push_back(m.move_id + ": citation markers are not contiguous 1..n");
                }
            }
        }
        add("proposal: ", forum::check_revision_chain(project.proposal));
        if (!forum::provenance_acyclic(project)) problems.push_back("branch provenance has a cycle");
        for (const auto& id : project.roster) {
            if (!s.personas.count(id)) problems.push_back("roster agent " + id + " has no persona");
        }
    }

    for (const auto& [id, store] : s.memories) {
        if (!agent::lineage_is_dag(store.snippets())) problems.push_back("memory " + id + ": lineage is not a DAG");
        const auto views = agent::memory_views(store);
        std::multiset<std::string> stream, forest;
        for (const auto& sn : views.stream) stream.insert(sn.snippet_id);
        for (const auto& sid : agent::forest_ids(views.lineage)) forest.insert(sid);
        if (stream != forest) problems.push_back("memory " + id + ": stream and lineage views differ");
        for (std::size_t i = 1; i < views.stream.size(); ++i) {
            if (views.stream[i - 1].created_at >= views.stream[i].created_at) {
                problems.push_back("memory " + id + ": stream not in created_at order");
            }
        }
    }
    return problems;
}

}  // namespace agora::service
