#pragma once

#include "agora/agent/memory.hpp"
#include "agora/agent/persona.hpp"
#include "agora/agent/provider.hpp"
#include "agora/knowledge/graph.hpp"
#include "agora/knowledge/scholar.hpp"
#include "agora/protocol/thread_state.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// One agent turn: plan -> optional tool round(s) -> reflect -> respond.
// Only the final rationale and a one-paragraph tool summary survive into the
// posted move; intermediate plans stay in the TurnOutcome trace.
namespace agora::agent {

enum class TurnMode { RespondDirectly, UseTool };
enum class ToolKind { GraphQuery, PaperSearch, AddPaper };

std::string_view to_string(TurnMode mode);
std::string_view to_string(ToolKind tool);
std::optional<ToolKind> parse_tool_kind(std::string_view name);

struct ToolRequest {
    ToolKind tool = ToolKind::PaperSearch;
    std::string query;
    bool operator==(const ToolRequest&) const = default;
};

/// Invariant: tool_request is present iff mode == UseTool.
struct TurnPlan {
    TurnMode mode = TurnMode::RespondDirectly;
    protocol::Act intended_act = protocol::Act::Claim;
    std::optional<ToolRequest> tool_request;
    std::vector<std::string> draft_points;

    bool well_formed() const { return tool_request.has_value() == (mode == TurnMode::UseTool); }
    bool operator==(const TurnPlan&) const = default;
};

nlohmann::json to_json(const TurnPlan& plan);

struct ToolResult {
    ToolRequest request;
    std::vector<knowledge::PaperRecord> papers;  // retrieved or added this round
    std::vector<knowledge::SnippetHit> hits;     // graph query results
    std::string summary;
};

enum class ToolErrorKind { ToolUnavailable, EmptyResult };

class ToolError : public std::runtime_error {
public:
    ToolError(ToolErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ToolErrorKind kind() const noexcept { return kind_; }

private:
    ToolErrorKind kind_;
};

class TurnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Where tools read and write. Paper searches insert what they find into
/// `graph` and the agent's collection; `inserted` lists every paper retrieved
/// this way (once each), whether or not the graph already held it.
struct ToolEnvironment {
    knowledge::KnowledgeGraph* graph = nullptr;
    std::span<knowledge::ScholarClient* const> scholars;
    std::string agent_id;
    std::size_t search_limit = 3;
    std::size_t graph_k = 3;
    std::vector<knowledge::PaperRecord> inserted;
};

struct ThreadContext {
    const protocol::ThreadState* thread = nullptr;
    protocol::MoveId parent;
};

struct RuntimeSettings {
    std::size_t tool_round_cap = 2;
    std::size_t memory_k = 5;
    std::size_t max_snippets = 3;
};

/// Outcome of the last tool round, as seen by reflect().
struct ToolOutcome {
    std::optional<ToolResult> result;
    std::optional<ToolErrorKind> error;

    static ToolOutcome success(ToolResult r) { return {std::move(r), std::nullopt}; }
    static ToolOutcome failure(ToolErrorKind k) { return {std::nullopt, k}; }
};

/// Papers and graph snippets gathered during the turn.
struct TurnEvidence {
    std::vector<knowledge::PaperRecord> papers;
    std::vector<knowledge::SnippetHit> hits;
    std::optional<std::string> tool_summary;
};

/// Throws TurnError if the thread is empty or the parent unknown;
/// ProviderUnavailable propagates. Unless `forced_act` is set the intended act
/// is filtered to one `persona` may legally use on the parent.
TurnPlan plan_turn(const AgentPersona& persona, const ThreadContext& context, std::span<const MemorySnippet> memories,
                   LanguageModelProvider& provider, std::optional<protocol::Act> forced_act = std::nullopt);

/// Throws TurnError when the plan has no tool request, ToolError otherwise.
ToolResult execute_tool(const TurnPlan& plan, ToolEnvironment& env);

/// `rounds_used` counts tool rounds already executed this turn. Once the cap
/// is reached after a failed round the plan is forced to respond directly.
TurnPlan reflect(const AgentPersona& persona, const TurnPlan& plan, const ToolOutcome& outcome, std::size_t rounds_used,
                 const ThreadContext& context, LanguageModelProvider& provider, const RuntimeSettings& settings,
                 std::optional<protocol::Act> forced_act = std::nullopt);

/// The returned move has no id or timestamp yet; the caller assigns both when
/// posting. Citations are limited to evidence papers present in `graph`.
protocol::DeliberationMove compose_response(const AgentPersona& persona, const TurnPlan& plan,
                                            const ThreadContext& context, const TurnEvidence& evidence,
                                            const knowledge::KnowledgeGraph& graph, LanguageModelProvider& provider);

/// 0..min(max_snippets, window size) new snippets, appended to a copy of
/// `store` to check lineage. The window must be non-empty.
std::vector<MemorySnippet> distill_memory(const AgentPersona& persona, std::span<const protocol::DeliberationMove> window,
                                          const MemoryStore& store, LanguageModelProvider& provider,
                                          std::size_t max_snippets = 3);

struct TurnOutcome {
    protocol::DeliberationMove move;
    std::vector<TurnPlan> plans;  // initial plan then each revision
    std::size_t tool_rounds = 0;
    std::vector<knowledge::PaperRecord> new_papers;  // retrieved by tools this turn
};

TurnOutcome run_turn(const AgentPersona& persona, const ThreadContext& context, const MemoryStore& memory,
                     ToolEnvironment& env, LanguageModelProvider& provider, const RuntimeSettings& settings,
                     std::optional<protocol::Act> forced_act = std::nullopt);

}  // namespace agora::agent
