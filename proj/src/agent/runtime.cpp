#include "agora/agent/runtime.hpp"

#include "agora/common/text.hpp"
#include "agora/knowledge/citations.hpp"

#include <algorithm>
#include <set>

namespace agora::agent {

using protocol::Act;
using protocol::DeliberationMove;

std::string_view to_string(TurnMode mode) { return mode == TurnMode::UseTool ? "use_tool" : "respond_directly"; }

std::string_view to_string(ToolKind tool) {
    switch (tool) {
    case ToolKind::GraphQuery: return "graph_query";
    case ToolKind::PaperSearch: return "paper_search";
    case ToolKind::AddPaper: return "add_paper";
    }
    return "?";
}

std::optional<ToolKind> parse_tool_kind(std::string_view name) {
    for (auto t : {ToolKind::GraphQuery, ToolKind::PaperSearch, ToolKind::AddPaper}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

nlohmann::json to_json(const TurnPlan& plan) {
    nlohmann::json j{{"mode", to_string(plan.mode)},
                     {"intended_act", protocol::to_string(plan.intended_act)},
                     {"draft_points", plan.draft_points}};
    if (plan.tool_request) {
        j["tool"] = to_string(plan.tool_request->tool);
        j["query"] = plan.tool_request->query;
    }
    return j;
}

namespace {

nlohmann::json persona_brief(const AgentPersona& p) {
    return {{"agent_id", p.agent_id},
            {"research_area", p.basic_info.research_area},
            {"focus_areas", p.research_and_professional_focus.focus_areas},
            {"methodology", p.research_and_professional_focus.methodology},
            {"domain_expertise", p.skills_and_expertise.domain_expertise},
            {"communication_style", p.personalities_and_characteristics.communication_style},
            {"audience_expertise_level", to_string(p.personalities_and_characteristics.audience_expertise_level)}};
}

nlohmann::json move_brief(const DeliberationMove& m) {
    return {{"move_id", m.move_id},
            {"author", m.author.id},
            {"author_kind", m.author.is_agent() ? "agent" : "human"},
            {"act", m.act ? nlohmann::json(std::string(protocol::to_string(*m.act))) : nlohmann::json()},
            {"body", m.body}};
}

nlohmann::json act_names(const std::vector<Act>& acts) {
    auto out = nlohmann::json::array();
    for (Act a : acts) out.push_back(protocol::to_string(a));
    return out;
}

const DeliberationMove& require_parent(const ThreadContext& ctx) {
    if (!ctx.thread || ctx.thread->empty()) throw TurnError("turn requires a non-empty thread context");
    const DeliberationMove* parent = ctx.thread->find(ctx.parent);
    if (!parent) throw TurnError("parent move " + ctx.parent + " is not in thread " + ctx.thread->thread_id());
    return *parent;
}

nlohmann::json path_to(const ThreadContext& ctx) {
    std::vector<const DeliberationMove*> chain;
    for (const DeliberationMove* m = ctx.thread->find(ctx.parent); m; m = m->target ? ctx.thread->find(*m->target) : nullptr) {
        chain.push_back(m);
    }
    auto out = nlohmann::json::array();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) out.push_back(move_brief(**it));
    return out;
}

std::vector<Act> allowed_for(const AgentPersona& persona, const ThreadContext& ctx) {
    return protocol::permitted_acts(*ctx.thread, ctx.parent, protocol::Participant::agent(persona.agent_id));
}

TurnPlan plan_from_json(const nlohmann::json& j, Act fallback_act) {
    TurnPlan plan;
    plan.intended_act = fallback_act;
    if (auto a = protocol::parse_act(j.value("intended_act", std::string{}))) plan.intended_act = *a;
    const auto tool = parse_tool_kind(j.value("tool", std::string{}));
    const auto query = text::trim(j.value("query", std::string{}));
    if (j.value("mode", std::string{}) == "use_tool" && tool && !query.empty()) {
        plan.mode = TurnMode::UseTool;
        plan.tool_request = ToolRequest{*tool, query};
    }
    if (j.contains("draft_points") && j["draft_points"].is_array()) {
        for (const auto& p : j["draft_points"]) {
            if (p.is_string()) plan.draft_points.push_back(p.get<std::string>());
        }
    }
    return plan;
}

// Forced acts pass through untouched; anything else must be legal here.
Act settle_act(Act proposed, const std::vector<Act>& allowed, std::optional<Act> forced) {
    if (forced) return *forced;
    if (std::find(allowed.begin(), allowed.end(), proposed) != allowed.end()) return proposed;
    if (allowed.empty()) throw TurnError("no deliberation act is legal for this parent");
    return allowed.front();
}

std::string describe(const knowledge::PaperRecord& p) {
    std::string s = "\"" + p.title + "\"";
    std::string meta = p.first_author();
    if (p.year) meta += (meta.empty() ? "" : ", ") + std::to_string(*p.year);
    if (!meta.empty()) s += " (" + meta + ")";
    return s;
}

}  // namespace

TurnPlan plan_turn(const AgentPersona& persona, const ThreadContext& context, std::span<const MemorySnippet> memories,
                   LanguageModelProvider& provider, std::optional<Act> forced_act) {
    const DeliberationMove& parent = require_parent(context);
    const auto allowed = allowed_for(persona, context);

    auto mems = nlohmann::json::array();
    for (const auto& m : memories) {
        mems.push_back({{"snippet_id", m.snippet_id}, {"kind", to_string(m.kind)}, {"text", m.text}});
    }
    ProviderRequest req{RequestKind::Plan, persona_digest(persona),
                        {{"agent", persona.agent_id},
                         {"persona", persona_brief(persona)},
                         {"thread_id", context.thread->thread_id()},
                         {"path", path_to(context)},
                         {"parent", move_brief(parent)},
                         {"allowed_acts", act_names(allowed)},
                         {"forced_act", forced_act ? nlohmann::json(std::string(protocol::to_string(*forced_act)))
                                                   : nlohmann::json()},
                         {"memories", mems},
                         {"tools", {"graph_query", "paper_search", "add_paper"}}}};
    TurnPlan plan = plan_from_json(provider.complete(req), allowed.empty() ? Act::Claim : allowed.front());
    plan.intended_act = settle_act(plan.intended_act, allowed, forced_act);
    return plan;
}

ToolResult execute_tool(const TurnPlan& plan, ToolEnvironment& env) {
    if (plan.mode != TurnMode::UseTool || !plan.tool_request) throw TurnError("plan does not request a tool");
    if (!env.graph) throw ToolError(ToolErrorKind::ToolUnavailable, "no knowledge graph attached");
    const ToolRequest& req = *plan.tool_request;
    ToolResult result{req, {}, {}, {}};

    const auto record = [&](const knowledge::PaperRecord& found) {
        const auto* known = env.graph->find_equivalent(found);
        const knowledge::PaperRecord p = known ? *known : found;
        knowledge::insert_paper(*env.graph, p);
        env.graph->add_to_collection(env.agent_id, p.key());
        const bool listed = std::any_of(env.inserted.begin(), env.inserted.end(),
                                        [&](const knowledge::PaperRecord& q) { return q.key() == p.key(); });
        if (!listed) env.inserted.push_back(p);
        result.papers.push_back(p);
    };

    switch (req.tool) {
    case ToolKind::GraphQuery: {
        result.hits = knowledge::query_graph(*env.graph, req.query, env.graph_k);
        if (result.hits.empty()) throw ToolError(ToolErrorKind::EmptyResult, "graph_query found nothing for '" + req.query + "'");
        std::vector<std::string> traces;
        for (const auto& h : result.hits) {
            if (std::find(traces.begin(), traces.end(), h.trace) == traces.end()) traces.push_back(h.trace);
        }
        std::vector<std::string> described;
        for (const auto& key : traces) described.push_back(describe(*env.graph->paper(key)) + " [" + key + "]");
        result.summary = "graph_query for \"" + req.query + "\" matched " + std::to_string(result.hits.size()) +
                         " snippet(s) from " + text::join(described, "; ") + ".";
        break;
    }
    case ToolKind::PaperSearch:
    case ToolKind::AddPaper: {
        if (env.scholars.empty()) throw ToolError(ToolErrorKind::ToolUnavailable, "no scholarly search configured");
        std::vector<knowledge::PaperRecord> found;
        try {
            found = knowledge::search_papers(req.query, env.scholars, req.tool == ToolKind::AddPaper ? 1 : env.search_limit);
        } catch (const knowledge::AllProvidersFailed& e) {
            throw ToolError(ToolErrorKind::ToolUnavailable, e.what());
        }
        if (found.empty()) throw ToolError(ToolErrorKind::EmptyResult, std::string(to_string(req.tool)) + " found nothing for '" + req.query + "'");
        for (const auto& p : found) record(p);
        std::vector<std::string> described;
        for (const auto& p : found) described.push_back(describe(p));
        result.summary = req.tool == ToolKind::AddPaper
            ? "add_paper added " + described.front() + " to the knowledge base."
            : "paper_search for \"" + req.query + "\" returned " + std::to_string(found.size()) +
                  " paper(s): " + text::join(described, "; ") + ".";
        break;
    }
    }
    return result;
}

TurnPlan reflect(const AgentPersona& persona, const TurnPlan& plan, const ToolOutcome& outcome, std::size_t rounds_used,
                 const ThreadContext& context, LanguageModelProvider& provider, const RuntimeSettings& settings,
                 std::optional<Act> forced_act) {
    require_parent(context);
    const auto allowed = allowed_for(persona, context);
    std::string status = "ok";
    if (outcome.error) status = *outcome.error == ToolErrorKind::EmptyResult ? "empty" : "unavailable";

    ProviderRequest req{RequestKind::Reflect, persona_digest(persona),
                        {{"agent", persona.agent_id},
                         {"persona", persona_brief(persona)},
                         {"plan", to_json(plan)},
                         {"outcome", status},
                         {"outcome_summary", outcome.result ? outcome.result->summary : std::string{}},
                         {"round", rounds_used},
                         {"allowed_acts", act_names(allowed)},
                         {"forced_act", forced_act ? nlohmann::json(std::string(protocol::to_string(*forced_act)))
                                                   : nlohmann::json()}}};
    TurnPlan revised = plan_from_json(provider.complete(req), plan.intended_act);
    revised.intended_act = settle_act(revised.intended_act, allowed, forced_act);

    if (outcome.error) {
        const bool exhausted = rounds_used >= settings.tool_round_cap;
        if (exhausted || revised == plan) {
            revised.mode = TurnMode::RespondDirectly;
            revised.tool_request.reset();
        }
    }
    return revised;
}

DeliberationMove compose_response(const AgentPersona& persona, const TurnPlan& plan, const ThreadContext& context,
                                  const TurnEvidence& evidence, const knowledge::KnowledgeGraph& graph,
                                  LanguageModelProvider& provider) {
    const DeliberationMove& parent = require_parent(context);

    // Citable = retrieved this turn or traced from graph hits, and present in the graph.
    std::set<std::string> citable;
    auto evidence_json = nlohmann::json::array();
    const auto offer = [&](const std::string& key) {
        const knowledge::PaperRecord* p = graph.paper(key);
        if (!p || !citable.insert(key).second) return;
        evidence_json.push_back({{"key", key},
                                 {"title", p->title},
                                 {"first_author", p->first_author()},
                                 {"year", p->year ? nlohmann::json(*p->year) : nlohmann::json()}});
    };
    for (const auto& p : evidence.papers) offer(p.key());
    for (const auto& h : evidence.hits) offer(h.trace);
    auto snippets = nlohmann::json::array();
    for (const auto& h : evidence.hits) snippets.push_back({{"text", h.snippet.text}, {"trace", h.trace}});

    nlohmann::json ctx{{"agent", persona.agent_id},
                       {"persona", persona_brief(persona)},
                       {"plan", to_json(plan)},
                       {"parent", move_brief(parent)},
                       {"evidence", evidence_json},
                       {"snippets", snippets},
                       {"tool_summary", evidence.tool_summary.value_or("")}};

    nlohmann::json reply;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        ctx["attempt"] = attempt;
        reply = provider.complete({RequestKind::Compose, persona_digest(persona), ctx});
        if (!text::trim(reply.value("rationale", std::string{})).empty()) break;
        if (attempt == 2) throw TurnError("provider returned an empty rationale twice for " + persona.agent_id);
    }

    const auto draft = knowledge::strip_placeholders(reply.value("body", std::string{}),
                                                     [&](const std::string& key) { return citable.count(key) > 0; });
    auto formatted = knowledge::format_citations(draft, graph);
    if (text::trim(formatted.body).empty()) throw TurnError("provider returned an empty body for " + persona.agent_id);

    DeliberationMove move;
    move.author = protocol::Participant::agent(persona.agent_id);
    move.act = plan.intended_act;
    move.target = parent.move_id;
    move.body = text::trim(formatted.body);
    move.rationale = text::trim(reply.value("rationale", std::string{}));
    move.citations = std::move(formatted.cited);
    move.tool_summary = evidence.tool_summary;
    return move;
}

std::vector<MemorySnippet> distill_memory(const AgentPersona& persona, std::span<const DeliberationMove> window,
                                          const MemoryStore& store, LanguageModelProvider& provider,
                                          std::size_t max_snippets) {
    if (window.empty()) throw TurnError("distillation window is empty");
    const std::size_t cap = std::min(max_snippets, window.size());

    auto window_json = nlohmann::json::array();
    for (const auto& m : window) window_json.push_back(move_brief(m));
    auto existing = nlohmann::json::array();
    for (const auto& s : store.snippets()) {
        existing.push_back({{"snippet_id", s.snippet_id}, {"kind", to_string(s.kind)}, {"text", s.text}});
    }
    const auto reply = provider.complete({RequestKind::Distill, persona_digest(persona),
                                          {{"agent", persona.agent_id},
                                           {"persona", persona_brief(persona)},
                                           {"window", window_json},
                                           {"existing", existing},
                                           {"max_snippets", cap}}});

    MemoryStore scratch = store;
    std::vector<MemorySnippet> out;
    if (!reply.contains("snippets") || !reply["snippets"].is_array()) return out;
    for (const auto& item : reply["snippets"]) {
        if (out.size() >= cap) break;
        const auto kind = parse_snippet_kind(item.value("kind", std::string{}));
        const auto body = text::trim(item.value("text", std::string{}));
        if (!kind || body.empty()) continue;
        MemorySnippet s;
        s.snippet_id = scratch.next_snippet_id();
        s.agent_id = persona.agent_id;
        s.kind = *kind;
        s.text = body;
        s.refines = item.value("refines", std::vector<std::string>{});
        s.created_at = scratch.next_created_at();
        s.source_window = {window.front().move_id, window.back().move_id};
        scratch.append(s);  // throws LineageViolation
        out.push_back(std::move(s));
    }
    return out;
}

TurnOutcome run_turn(const AgentPersona& persona, const ThreadContext& context, const MemoryStore& memory,
                     ToolEnvironment& env, LanguageModelProvider& provider, const RuntimeSettings& settings,
                     std::optional<Act> forced_act) {
    TurnOutcome outcome;
    const auto memories = conditioning_memories(memory, settings.memory_k);
    TurnPlan plan = plan_turn(persona, context, memories, provider, forced_act);
    outcome.plans.push_back(plan);

    TurnEvidence evidence;
    std::vector<std::string> summaries;
    const std::size_t inserted_before = env.inserted.size();
    while (plan.mode == TurnMode::UseTool && outcome.tool_rounds < settings.tool_round_cap) {
        ToolOutcome round;
        try {
            auto result = execute_tool(plan, env);
            evidence.papers.insert(evidence.papers.end(), result.papers.begin(), result.papers.end());
            evidence.hits.insert(evidence.hits.end(), result.hits.begin(), result.hits.end());
            summaries.push_back(result.summary);
            round = ToolOutcome::success(std::move(result));
        } catch (const ToolError& e) {
            summaries.push_back(e.what());
            round = ToolOutcome::failure(e.kind());
        }
        ++outcome.tool_rounds;
        TurnPlan revised = reflect(persona, plan, round, outcome.tool_rounds, context, provider, settings, forced_act);
        const bool settled = round.result.has_value() && revised == plan;
        plan = std::move(revised);
        outcome.plans.push_back(plan);
        if (settled) break;
    }
    if (!summaries.empty()) evidence.tool_summary = text::join(summaries, " ");

    outcome.move = compose_response(persona, plan, context, evidence, *env.graph, provider);
    outcome.new_papers.assign(env.inserted.begin() + static_cast<std::ptrdiff_t>(inserted_before), env.inserted.end());
    return outcome;
}

}  // namespace agora::agent
