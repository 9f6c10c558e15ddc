#include "agora/agent/memory.hpp"
#include "agora/agent/persona.hpp"
#include "agora/agent/provider.hpp"
#include "agora/agent/runtime.hpp"
#include "agora/knowledge/citations.hpp"
#include "agora/knowledge/replay_transport.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <deque>
#include <random>

using namespace agora;
using namespace agora::agent;
using protocol::Act;
namespace t = agora::testing;

namespace {

// Replies from per-kind queues; an empty queue means the provider is down.
class ScriptedProvider final : public LanguageModelProvider {
public:
    ProviderDescriptor descriptor() const override { return {"scripted", true}; }
    nlohmann::json complete(const ProviderRequest& request) override {
        requests.push_back(request);
        auto& q = replies[request.kind];
        if (q.empty()) throw ProviderUnavailable("no scripted reply");
        auto r = q.front();
        q.pop_front();
        return r;
    }
    std::map<RequestKind, std::deque<nlohmann::json>> replies;
    std::vector<ProviderRequest> requests;
};

class CountingScholar final : public knowledge::ScholarClient {
public:
    explicit CountingScholar(std::vector<knowledge::PaperRecord> papers, bool fail = false)
        : papers_(std::move(papers)), fail_(fail) {}
    knowledge::ScholarProvider provider() const override { return knowledge::ScholarProvider::SemanticScholar; }
    std::vector<knowledge::PaperRecord> search(const std::string&, std::size_t limit) override {
        ++calls;
        if (fail_) throw knowledge::ScholarError("down");
        auto out = papers_;
        if (out.size() > limit) out.resize(limit);
        return out;
    }
    int calls = 0;

private:
    std::vector<knowledge::PaperRecord> papers_;
    bool fail_;
};

const std::map<std::string, AgentPersona>& catalog() {
    static const auto c = load_persona_catalog(t::data_dir() / "personas");
    return c;
}

protocol::DeliberationMove make_move(std::string id, protocol::Participant who, std::optional<Act> act,
                                     std::optional<std::string> target, std::uint64_t ts, std::string body) {
    protocol::DeliberationMove m;
    m.move_id = std::move(id);
    m.author = std::move(who);
    m.act = act;
    m.target = std::move(target);
    m.body = std::move(body);
    m.rationale = m.author.is_agent() ? "reason" : "";
    m.timestamp = ts;
    return m;
}

protocol::ThreadState sample_thread() {
    protocol::ThreadState s("t1");
    s.apply(make_move("t1.m1", protocol::Participant::agent("HCI_Researcher"), Act::Issue, std::nullopt, 1,
                      "How should we evaluate critical thinking support?"));
    s.apply(make_move("t1.m2", protocol::Participant::human("u"), std::nullopt, "t1.m1", 2,
                      "Could CRISPR crop resilience field trials teach us about evaluation design?"));
    return s;
}

knowledge::PaperRecord paper(std::string id, std::string title) {
    knowledge::PaperRecord p;
    p.paper_id = std::move(id);
    p.title = std::move(title);
    p.authors = {"Ann Author"};
    p.year = 2022;
    p.abstract = "A study of evaluation. Results are mixed.";
    p.provider = knowledge::ScholarProvider::SemanticScholar;
    return p;
}

}  // namespace

TEST_CASE("persona catalog loads all bundled profiles and YAML round-trips") {
    const auto& c = catalog();
    CHECK(c.size() == 6);
    for (const auto& [id, p] : c) {
        CHECK(id == p.agent_id);
        CHECK_FALSE(p.basic_info.research_area.empty());
        CHECK(parse_persona_yaml(to_yaml(p)) == p);
        nlohmann::json j = p;
        CHECK(j.get<AgentPersona>() == p);
    }
    CHECK(c.at("HCI_Researcher").display_name() == "HCI Researcher");
    CHECK(persona_digest(c.at("HCI_Researcher")) != persona_digest(c.at("Learning_Scientist")));
    CHECK_THROWS_AS(parse_persona_yaml("agent_id: X\nbasic_info: [1, 2]\n"), PersonaError);
    CHECK_THROWS_AS(parse_persona_yaml("agent_id: X\nbasic_info: {research_area: a}\n"), PersonaError);
    const auto full = to_yaml(c.at("HCI_Researcher"));
    const auto line = full.find("agent_id:");
    REQUIRE(line != std::string::npos);
    const auto anonymous = full.substr(0, line) + full.substr(full.find('\n', line) + 1);
    CHECK_THROWS_AS(parse_persona_yaml(anonymous), PersonaError);
    CHECK(parse_persona_yaml(anonymous, "Fallback").agent_id == "Fallback");
}

TEST_CASE("memory store enforces lineage and the two views agree") {
    MemoryStore store("A");
    const auto add = [&](std::vector<std::string> refines) {
        MemorySnippet s;
        s.snippet_id = store.next_snippet_id();
        s.agent_id = "A";
        s.text = "idea " + s.snippet_id;
        s.refines = std::move(refines);
        s.created_at = store.next_created_at();
        store.append(s);
        return s.snippet_id;
    };
    const auto a = add({});
    const auto b = add({a});
    const auto c = add({});
    add({b, c});
    add({a});

    MemorySnippet bad;
    bad.snippet_id = "zz";
    bad.agent_id = "A";
    bad.created_at = store.next_created_at();
    bad.refines = {"missing"};
    CHECK_THROWS_AS(store.append(bad), LineageViolation);
    bad.refines.clear();
    bad.agent_id = "B";
    CHECK_THROWS_AS(store.append(bad), LineageViolation);
    bad.agent_id = "A";
    bad.created_at = 0;
    CHECK_THROWS_AS(store.append(bad), LineageViolation);

    const auto views = memory_views(store);
    std::vector<std::string> stream_ids;
    for (const auto& s : views.stream) stream_ids.push_back(s.snippet_id);
    auto forest = forest_ids(views.lineage);
    CHECK(forest.size() == stream_ids.size());
    std::sort(forest.begin(), forest.end());
    std::sort(stream_ids.begin(), stream_ids.end());
    CHECK(forest == stream_ids);
    CHECK(views.lineage.size() == 2);
    CHECK(lineage_is_dag(store.snippets()));
    CHECK(t::oracle_is_dag({store.snippets().begin(), store.snippets().end()}));

    const auto recent = conditioning_memories(store, 1);
    // The newest snippet plus its ancestor.
    CHECK(recent.size() == 2);
    CHECK(recent.front().snippet_id == a);

    std::vector<MemorySnippet> cyclic(2);
    cyclic[0].snippet_id = "x";
    cyclic[0].refines = {"y"};
    cyclic[1].snippet_id = "y";
    cyclic[1].refines = {"x"};
    CHECK_FALSE(lineage_is_dag(cyclic));
    CHECK_FALSE(t::oracle_is_dag(cyclic));
}

TEST_CASE("mock provider is deterministic per persona, context and kind") {
    MockProvider mock;
    ProviderRequest a{RequestKind::Plan, "d1", {{"allowed_acts", {"CLAIM", "SUPPORT"}}, {"parent", {{"body", "x y z"}}}}};
    CHECK(mock.complete(a) == mock.complete(a));
    CHECK(mock.descriptor().deterministic);
    ProviderRequest label{RequestKind::Label, "", {{"body", "One sentence here. Two sentences. Three."}}};
    const auto l = mock.complete(label);
    CHECK(l.contains("keyword"));
    CHECK(l.contains("summary"));
}

TEST_CASE("plan filters illegal acts unless forced") {
    const auto& persona = catalog().at("Learning_Scientist");
    const auto thread = sample_thread();
    ScriptedProvider p;
    p.replies[RequestKind::Plan] = {{{"mode", "respond_directly"}, {"intended_act", "REBUT"}},
                                    {{"mode", "use_tool"}, {"intended_act", "SUPPORT"}, {"tool", "paper_search"}, {"query", "  "}},
                                    {{"mode", "respond_directly"}, {"intended_act", "SUPPORT"}}};
    const auto illegal = plan_turn(persona, {&thread, "t1.m2"}, {}, p);
    CHECK(illegal.intended_act == Act::Claim);
    const auto blank_query = plan_turn(persona, {&thread, "t1.m2"}, {}, p);
    CHECK(blank_query.mode == TurnMode::RespondDirectly);
    CHECK(blank_query.well_formed());
    const auto forced = plan_turn(persona, {&thread, "t1.m2"}, {}, p, Act::Question);
    CHECK(forced.intended_act == Act::Question);
    CHECK(p.requests[0].context["allowed_acts"] == nlohmann::json{"CLAIM", "SUPPORT"});

    CHECK_THROWS_AS(plan_turn(persona, {&thread, "nope"}, {}, p), TurnError);
    CHECK_THROWS_AS(plan_turn(persona, {&thread, "t1.m2"}, {}, p), ProviderUnavailable);
}

TEST_CASE("tools insert papers, report empty results and unavailability") {
    knowledge::KnowledgeGraph graph;
    CountingScholar ok({paper("a", "Evaluation of critical thinking"), paper("b", "Field trials")});
    CountingScholar empty({});
    CountingScholar down({}, true);
    std::vector<knowledge::ScholarClient*> good{&ok}, none{&empty}, broken{&down};

    TurnPlan search{TurnMode::UseTool, Act::Claim, ToolRequest{ToolKind::PaperSearch, "evaluation"}, {}};
    ToolEnvironment env{&graph, good, "A", 3, 3, {}};
    const auto r = execute_tool(search, env);
    CHECK(r.papers.size() == 2);
    CHECK(graph.contains_paper("s2:a"));
    CHECK(graph.collection("A").size() == 2);
    CHECK(env.inserted.size() == 2);
    execute_tool(search, env);
    CHECK(env.inserted.size() == 2);

    TurnPlan add{TurnMode::UseTool, Act::Claim, ToolRequest{ToolKind::AddPaper, "evaluation"}, {}};
    CHECK(execute_tool(add, env).papers.size() == 1);

    TurnPlan query{TurnMode::UseTool, Act::Claim, ToolRequest{ToolKind::GraphQuery, "evaluation study"}, {}};
    const auto hits = execute_tool(query, env);
    CHECK_FALSE(hits.hits.empty());

    ToolEnvironment env_empty{&graph, none, "A", 3, 3, {}};
    try {
        execute_tool(search, env_empty);
        FAIL("expected ToolError");
    } catch (const ToolError& e) {
        CHECK(e.kind() == ToolErrorKind::EmptyResult);
    }
    ToolEnvironment env_down{&graph, broken, "A", 3, 3, {}};
    try {
        execute_tool(search, env_down);
        FAIL("expected ToolError");
    } catch (const ToolError& e) {
        CHECK(e.kind() == ToolErrorKind::ToolUnavailable);
    }
    TurnPlan direct;
    CHECK_THROWS_AS(execute_tool(direct, env), TurnError);
}

TEST_CASE("reflect forces a direct response after a failure it cannot fix") {
    const auto& persona = catalog().at("Learning_Scientist");
    const auto thread = sample_thread();
    const TurnPlan plan{TurnMode::UseTool, Act::Claim, ToolRequest{ToolKind::PaperSearch, "q"}, {}};
    ScriptedProvider p;
    const auto same = to_json(plan);
    auto pivot = same;
    pivot["query"] = "another query";
    p.replies[RequestKind::Reflect] = {same, pivot, pivot};
    RuntimeSettings settings;

    const auto unchanged = reflect(persona, plan, ToolOutcome::failure(ToolErrorKind::EmptyResult), 1, {&thread, "t1.m2"}, p, settings);
    CHECK(unchanged.mode == TurnMode::RespondDirectly);
    const auto pivoted = reflect(persona, plan, ToolOutcome::failure(ToolErrorKind::EmptyResult), 1, {&thread, "t1.m2"}, p, settings);
    CHECK(pivoted.mode == TurnMode::UseTool);
    CHECK(pivoted.tool_request->query == "another query");
    const auto capped = reflect(persona, plan, ToolOutcome::failure(ToolErrorKind::EmptyResult), 2, {&thread, "t1.m2"}, p, settings);
    CHECK(capped.mode == TurnMode::RespondDirectly);
    CHECK(p.requests[0].context["outcome"] == "empty");
}

TEST_CASE("compose keeps only citable papers, retries an empty rationale once and leaves ids unset") {
    const auto& persona = catalog().at("Learning_Scientist");
    const auto thread = sample_thread();
    knowledge::KnowledgeGraph graph;
    knowledge::insert_paper(graph, paper("a", "Evaluation of critical thinking"));
    knowledge::insert_paper(graph, paper("b", "Unrelated"));
    TurnEvidence evidence{{paper("a", "Evaluation of critical thinking"), paper("ghost", "Not in graph")}, {}, "searched"};
    const TurnPlan plan{TurnMode::RespondDirectly, Act::Claim, std::nullopt, {}};

    ScriptedProvider p;
    p.replies[RequestKind::Compose] = {
        {{"body", "x"}, {"rationale", " "}},
        {{"body", "Evidence [@s2:a] and [@s2:b] and [@s2:ghost] and [@s2:a]."}, {"rationale", "grounded"}}};
    const auto move = compose_response(persona, plan, {&thread, "t1.m2"}, evidence, graph, p);
    CHECK(move.body == "Evidence [1] and and and [1].");
    CHECK(move.citations == std::vector<std::string>{"s2:a"});
    CHECK(move.move_id.empty());
    CHECK(move.timestamp == 0);
    CHECK(move.act == Act::Claim);
    CHECK(move.target == "t1.m2");
    CHECK(move.tool_summary == "searched");
    CHECK(p.requests.size() == 2);
    CHECK(p.requests[1].context["attempt"] == 2);

    p.replies[RequestKind::Compose] = {{{"body", "x"}, {"rationale", ""}}, {{"body", "y"}, {"rationale", ""}}};
    CHECK_THROWS_AS(compose_response(persona, plan, {&thread, "t1.m2"}, evidence, graph, p), TurnError);
}

TEST_CASE("distillation respects the cap and lineage") {
    const auto& persona = catalog().at("Learning_Scientist");
    const auto thread = sample_thread();
    MemoryStore store("Learning_Scientist");
    ScriptedProvider p;
    p.replies[RequestKind::Distill] = {{{"snippets",
                                         {{{"kind", "hypothesis"}, {"text", "one"}},
                                          {{"kind", "unknown"}, {"text", "skipped"}},
                                          {{"kind", "question"}, {"text", "two"}, {"refines", {"Learning_Scientist.s1"}}}}}},
                                       {{"snippets", {{{"kind", "question"}, {"text", "bad"}, {"refines", {"nope"}}}}}}};
    const auto window = thread.moves();
    const auto out = distill_memory(persona, window, store, p, 3);
    REQUIRE(out.size() == 2);
    CHECK(out[1].refines == std::vector<std::string>{out[0].snippet_id});
    CHECK(out[0].source_window == MoveRange{"t1.m1", "t1.m2"});
    CHECK_THROWS_AS(distill_memory(persona, window, store, p, 3), LineageViolation);
    CHECK_THROWS_AS(distill_memory(persona, {}, store, p, 3), TurnError);
}

TEST_CASE("property: mock turns stay bounded, legal and cite only graph papers") {
    auto s2 = knowledge::RecordedCorpusTransport::from_file(t::data_dir() / "fixtures/scholar/semantic_scholar.json");
    auto oa = knowledge::RecordedCorpusTransport::from_file(t::data_dir() / "fixtures/scholar/openalex.json");
    knowledge::SemanticScholarClient c1(s2);
    knowledge::OpenAlexClient c2(oa);
    std::vector<knowledge::ScholarClient*> clients{&c1, &c2};
    MockProvider mock;
    RuntimeSettings settings;
    std::mt19937_64 rng(5);

    std::vector<std::string> ids;
    for (const auto& [id, p] : catalog()) ids.push_back(id);

    for (int session = 0; session < 40; ++session) {
        protocol::ThreadState thread("t1");
        knowledge::KnowledgeGraph graph;
        thread.apply(make_move("t1.m1", protocol::Participant::agent(ids[session % ids.size()]), Act::Issue,
                               std::nullopt, 1, "How can generative AI support critical thinking in education?"));
        std::map<std::string, MemoryStore> memories;
        for (int turn = 0; turn < 8; ++turn) {
            const auto moves = thread.moves();
            const auto parent = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)].move_id;
            const auto& who = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
            const auto& persona = catalog().at(who);
            if (protocol::permitted_acts(thread, parent, protocol::Participant::agent(who)).empty()) continue;
            ToolEnvironment env{&graph, clients, who, 3, 3, {}};
            auto& memory = memories.try_emplace(who, who).first->second;
            auto outcome = run_turn(persona, {&thread, parent}, memory, env, mock, settings);
            REQUIRE(outcome.tool_rounds <= settings.tool_round_cap);
            REQUIRE(outcome.plans.size() <= settings.tool_round_cap + 1);
            for (const auto& plan : outcome.plans) REQUIRE(plan.well_formed());
            auto move = outcome.move;
            move.move_id = "t1.m" + std::to_string(thread.moves().size() + 1);
            move.timestamp = thread.moves().back().timestamp + 1;
            REQUIRE_FALSE(protocol::validate_move(thread, move).has_value());
            for (const auto& key : move.citations) REQUIRE(graph.contains_paper(key));
            REQUIRE(knowledge::markers_contiguous(move.body, move.citations));
            thread.apply(move);
            const auto window = thread.moves();
            for (auto& s : distill_memory(persona, window.last(std::min<std::size_t>(10, window.size())), memory, mock, 3)) {
                memory.append(std::move(s));
            }
            REQUIRE(t::oracle_is_dag({memory.snippets().begin(), memory.snippets().end()}));
        }
        REQUIRE(graph.check_integrity().empty());
    }
}

TEST_CASE("chat provider sends an OpenAI-style body and parses JSON replies") {
    class Capture final : public net::HttpTransport {
    public:
        net::HttpResponse send(const net::HttpRequest& request) override {
            last = request;
            nlohmann::json reply{{"choices", {{{"message", {{"content", R"({"keyword":"k","summary":"s."})"}}}}}}};
            return {status, reply.dump()};
        }
        net::HttpRequest last;
        int status = 200;
    };
    auto transport = std::make_shared<Capture>();
    ChatCompletionsProvider chat(transport, {"test-model", "secret", "/v1/chat/completions"});
    const auto out = chat.complete({RequestKind::Label, "", {{"body", "text"}}});
    CHECK(out["keyword"] == "k");
    CHECK(transport->last.path == "/v1/chat/completions");
    CHECK(transport->last.headers.at("Authorization") == "Bearer secret");
    const auto body = nlohmann::json::parse(transport->last.body);
    CHECK(body["model"] == "test-model");
    CHECK(body["messages"].size() == 2);
    transport->status = 500;
    CHECK_THROWS_AS(chat.complete({RequestKind::Label, "", {{"body", "text"}}}), ProviderUnavailable);
}
