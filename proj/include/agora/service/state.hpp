#pragma once

#include "agora/agent/memory.hpp"
#include "agora/agent/persona.hpp"
#include "agora/forum/project.hpp"
#include "agora/knowledge/graph.hpp"
#include "agora/service/events.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>

namespace agora::service {

/// Everything one project's event log determines.
struct ProjectState {
    std::optional<forum::Project> project;                // set by project_created
    std::map<std::string, agent::AgentPersona> personas;  // roster profiles
    std::map<std::string, agent::MemoryStore> memories;   // private per agent
    knowledge::KnowledgeGraph graph;
    std::map<std::string, std::uint64_t> idempotency;     // client key -> first event seq
    std::uint64_t seq = 0;
    std::uint64_t last_at = 0;

    bool operator==(const ProjectState&) const = default;
};

/// Applies one event. Throws GapInLog when `event.seq` is not the next seq and
/// CorruptPayload when the payload is malformed or breaks a domain rule.
void apply_event(ProjectState& state, const Event& event);

/// Folds `events` into a fresh state.
ProjectState replay(std::span<const Event> events);

/// Canonical JSON (object keys sorted) and its SHA-256.
nlohmann::json to_json(const ProjectState& state);
std::string state_digest(const ProjectState& state);

/// Cross-module audit: thread protocol invariants, proposal hash chains,
/// branch provenance, graph integrity, citation resolution and contiguity,
/// memory lineage and view equality. Empty when all hold.
std::vector<std::string> check_state_invariants(const ProjectState& state);

}  // namespace agora::service
