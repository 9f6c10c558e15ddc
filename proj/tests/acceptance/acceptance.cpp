#include "agora/common/text.hpp"
#include "agora/knowledge/citations.hpp"
#include "agora/knowledge/replay_transport.hpp"
#include "agora/knowledge/scholar.hpp"
#include "agora/mindmap/graph.hpp"
#include "agora/protocol/invariants.hpp"
#include "agora/protocol/transcript.hpp"
#include "agora/service/events.hpp"
#include "agora/service/script.hpp"
#include "agora/service/state.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <chrono>
#include <fstream>
#include <array>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

using namespace agora;
namespace t = agora::testing;
using protocol::Act;
using protocol::DeliberationMove;
using protocol::Participant;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> problems;

    void fail(std::string problem) {
        pass = false;
        if (problems.size() < 5) problems.push_back(std::move(problem));
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Every scenario, run once on a service that stays alive for inspection.
struct ScenarioRun {
    std::filesystem::path path;
    std::unique_ptr<service::DeliberationService> service;
    service::ScriptResult result;
};

std::vector<ScenarioRun> run_all_scenarios() {
    std::vector<ScenarioRun> runs;
    for (const auto& path : t::scenario_paths()) {
        ScenarioRun run{path, t::make_service(), {}};
        run.result = service::run_script_on(*run.service, service::load_script(path));
        runs.push_back(std::move(run));
    }
    return runs;
}

std::string name_of(const ScenarioRun& run) { return run.path.stem().string(); }

// 1. Protocol oracle equivalence.
Outcome protocol_equivalence() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    std::size_t pairs = 0;
    for (auto act : protocol::all_acts) {
        for (auto pk : protocol::all_parent_kinds) {
            ++pairs;
            if (protocol::is_legal_attachment(act, pk) != (t::oracle_children(pk).count(act) > 0)) {
                out.fail(std::string(protocol::to_string(act)) + " on " + std::string(protocol::to_string(pk)));
            }
        }
    }

    // Exhaustive: every candidate move over two agents and a human, up to 4 moves deep.
    std::size_t exhaustive = 0;
    std::function<void(const t::OracleThread&, const protocol::ThreadState&, int)> explore =
        [&](const t::OracleThread& oracle, const protocol::ThreadState& state, int depth) {
            std::vector<std::optional<protocol::MoveId>> targets{std::nullopt};
            for (const auto& m : oracle.moves) targets.push_back(m.move_id);
            for (const auto& who : {Participant::agent("A"), Participant::agent("B"), Participant::human("h")}) {
                std::vector<std::optional<Act>> acts{std::nullopt};
                if (who.is_agent()) acts.assign(protocol::all_acts.begin(), protocol::all_acts.end());
                for (const auto& act : acts) {
                    for (const auto& target : targets) {
                        DeliberationMove m;
                        m.move_id = "m" + std::to_string(depth + 1);
                        m.author = who;
                        m.act = act;
                        m.target = target;
                        m.body = "b";
                        if (who.is_agent()) m.rationale = "r";
                        m.timestamp = static_cast<std::uint64_t>(depth + 1);
                        ++exhaustive;
                        const auto expected = t::oracle_verdict(oracle, m);
                        const auto actual = protocol::validate_move(state, m);
                        if (expected.has_value() != actual.has_value() || (expected && *expected != actual->kind)) {
                            out.fail("exhaustive mismatch at depth " + std::to_string(depth) + " for " + m.move_id);
                            continue;
                        }
                        if (expected || depth + 1 >= 4) continue;
                        auto next_oracle = oracle;
                        next_oracle.moves.push_back(m);
                        explore(next_oracle, protocol::apply_move(state, m), depth + 1);
                    }
                }
            }
        };
    explore({}, protocol::ThreadState("t"), 0);

    std::mt19937_64 rng(7);
    constexpr int random_threads = 10000;
    std::size_t verdicts = 0;
    for (int trial = 0; trial < random_threads; ++trial) {
        protocol::ThreadState state("t");
        t::OracleThread oracle;
        for (const auto& step : t::random_thread(rng, 5)) {
            if (step.kind == t::RandomThreadStep::Kind::Concede) {
                try {
                    state.set_commitment_status(step.owner, step.source, protocol::CommitmentStatus::Conceded);
                    oracle.withdrawn.insert({step.owner, step.source});
                } catch (const protocol::ProtocolError&) {
                }
                continue;
            }
            ++verdicts;
            const auto expected = t::oracle_verdict(oracle, step.move);
            const auto actual = protocol::validate_move(state, step.move);
            if (expected.has_value() != actual.has_value() || (expected && *expected != actual->kind)) {
                out.fail("random thread " + std::to_string(trial) + " disagrees on " + step.move.move_id);
                break;
            }
            if (expected) continue;
            state = protocol::apply_move(state, step.move);
            oracle.moves.push_back(step.move);
        }
    }
    const double secs = seconds_since(start);
    if (secs >= 10.0) out.fail("runtime " + std::to_string(secs) + " s");
    std::ostringstream d;
    d << pairs << " pairs, " << exhaustive << " exhaustive candidates, " << random_threads << " random threads ("
      << verdicts << " verdicts), " << std::fixed << std::setprecision(2) << secs << " s";
    out.detail = d.str();
    return out;
}

// 2. Root-act invariant over randomized sessions.
Outcome root_act_invariant() {
    Outcome out;
    const auto config = t::test_config();
    const auto catalog = t::script_options().catalog;
    std::vector<std::string> agents;
    for (const auto& [id, _] : catalog) agents.push_back(id);

    constexpr int sessions = 1000;
    std::size_t roots = 0, ops = 0, rejected = 0;
    for (int s = 0; s < sessions; ++s) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(s) + 1);
        const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
        auto svc = t::make_service(config);
        auto pool = agents;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(2 + pick(pool.size() - 1));
        const auto pid = svc->create_project("Session " + std::to_string(s),
                                             {{forum::Section::Motivation, "Randomized session about deliberation."}}, pool);
        const auto opener = pick(2) ? std::optional<std::string>(pool[pick(pool.size())]) : std::nullopt;
        svc->create_thread(pid, "Opening", "First thread", opener);
        const auto steps = 3 + pick(6);
        for (std::size_t i = 0; i < steps; ++i) {
            const auto snap = svc->snapshot(pid);
            std::vector<protocol::MoveId> moves;
            for (const auto& th : snap->project->threads) {
                for (const auto& m : th.state.moves()) moves.push_back(m.move_id);
            }
            const auto target = moves[pick(moves.size())];
            ++ops;
            switch (pick(5)) {
            case 0:
                svc->create_thread(pid, "Thread " + std::to_string(i), "More", pick(2) ? std::optional<std::string>(pool[pick(pool.size())]) : std::nullopt);
                break;
            case 1:
                svc->branch_thread(pid, target, "Branch " + std::to_string(i));
                break;
            case 2: {
                const auto stance = std::array{forum::Stance::Agree, forum::Stance::Disagree, forum::Stance::Question}[pick(3)];
                svc->what_if_preview(pid, "s", {target, pool[pick(pool.size())], stance});
                try {
                    svc->post_preview(pid, "s");
                } catch (const protocol::ProtocolError&) {
                    ++rejected;
                    svc->discard_preview(pid, "s");
                }
                break;
            }
            default: {
                std::string text = "What about this?";
                const auto mentions = pick(3);
                for (std::size_t k = 0; k < mentions; ++k) text += " @" + pool[pick(pool.size())];
                svc->post_reply(pid, {target, text, "user", {}});
            }
            }
        }
        const auto snap = svc->snapshot(pid);
        for (const auto& th : snap->project->threads) {
            const auto* root = th.state.root();
            ++roots;
            if (!root || !root->author.is_agent() || root->act != Act::Issue) {
                out.fail("session " + std::to_string(s) + " thread " + th.thread_id + " root is not an agent ISSUE");
            }
            for (const auto& m : th.state.moves()) {
                if (!m.target && &m != root) out.fail("session " + std::to_string(s) + " has a second root");
            }
        }
    }
    out.detail = std::to_string(sessions) + " sessions, " + std::to_string(ops) + " operations, " + std::to_string(roots) +
                 " thread roots checked, " + std::to_string(rejected) + " illegal what-if posts rejected";
    return out;
}

// 3. The nine routing cases: mentions (none, one, several) x parent author (agent root, agent reply, human).
Outcome routing_table() {
    Outcome out;
    auto svc = t::make_service();
    const std::vector<std::string> roster{"HCI_Researcher", "Learning_Scientist", "Clinical_Psychologist"};
    const auto pid = svc->create_project("Routing", {{forum::Section::Motivation, "Who answers whom."}}, roster);
    const auto tid = svc->create_thread(pid, "Routing", "Who responds?", "Learning_Scientist");
    const auto root = svc->snapshot(pid)->project->find_thread(tid)->state.root()->move_id;
    const auto seeded = svc->post_reply(pid, {root, "@HCI_Researcher start us off", "sam", {}});
    const auto agent_parent = seeded.items.at(1).move->move_id;
    const auto human_parent = seeded.user_move;

    struct Parent {
        std::string label;
        protocol::MoveId id;
        std::optional<std::string> agent_author;
    };
    struct Text {
        std::string label;
        std::string text;
        std::vector<std::string> mentioned;
    };
    const std::vector<Parent> parents{{"agent root", root, "Learning_Scientist"},
                                      {"agent reply", agent_parent, "HCI_Researcher"},
                                      {"human reply", human_parent, std::nullopt}};
    const std::vector<Text> texts{
        {"no mention", "What do you all think?", {}},
        {"one mention", "@Clinical_Psychologist what do you think?", {"Clinical_Psychologist"}},
        {"mentions", "@Clinical_Psychologist and @HCI_Researcher, also @Clinical_Psychologist again",
         {"Clinical_Psychologist", "HCI_Researcher"}}};

    int cases = 0;
    bool saw_default_line = false;
    for (const auto& parent : parents) {
        for (const auto& text : texts) {
            ++cases;
            std::vector<std::string> expected;
            std::string expected_line;
            if (!text.mentioned.empty()) {
                expected = text.mentioned;
                expected_line = "Will notify: @" + text.mentioned[0];
                for (std::size_t i = 1; i < text.mentioned.size(); ++i) expected_line += ", @" + text.mentioned[i];
            } else if (parent.agent_author) {
                expected = {*parent.agent_author};
                expected_line = "Will notify: @" + *parent.agent_author + " (default)";
            } else {
                expected_line = "Mention an agent with @ to get a response";
            }
            const auto label = parent.label + " / " + text.label;
            const auto preview = svc->preview_responders(pid, parent.id, text.text);
            if (preview.routing.responders != expected) out.fail(label + ": preview responders differ");
            if (preview.notify_line != expected_line) out.fail(label + ": notify line '" + preview.notify_line + "'");
            if (preview.notify_line.find("(default)") != std::string::npos) saw_default_line = true;
            const auto posted = svc->post_reply(pid, {parent.id, text.text, "sam", {}});
            if (posted.routing.responders != expected) out.fail(label + ": posted responders differ");
            std::vector<std::string> authors;
            for (const auto& item : posted.items) {
                if (item.move && item.move->author.is_agent()) authors.push_back(item.move->author.id);
            }
            if (authors != expected) out.fail(label + ": responding authors differ");
        }
    }
    if (!saw_default_line) out.fail("the default notify line never appeared");
    out.detail = std::to_string(cases) + " cases via preview and post";
    return out;
}

// 4. Commitment conservation and challenge well-formedness.
Outcome commitments(const std::vector<ScenarioRun>& runs) {
    Outcome out;
    std::size_t threads = 0;
    for (const auto& run : runs) {
        for (const auto& text : t::split_transcripts(run.result.transcript)) {
            ++threads;
            try {
                const auto state = protocol::import_transcript(text);
                for (const auto& p : protocol::check_thread_invariants(state)) out.fail(name_of(run) + ": " + p);
                for (const auto& p : t::commitment_oracle(state)) out.fail(name_of(run) + ": " + p);
            } catch (const std::exception& e) {
                out.fail(name_of(run) + ": " + e.what());
            }
        }
    }
    out.detail = std::to_string(runs.size()) + " scenarios, " + std::to_string(threads) + " thread transcripts replayed";
    return out;
}

bool move_is_root(const forum::Project& project, const std::string& move_id) {
    const auto* move = project.find_move(move_id);
    return move && move->is_root();
}

// 5. Mind-map isomorphism, labels and source_of.
Outcome mindmap_isomorphism(const std::vector<ScenarioRun>& runs) {
    Outcome out;
    std::size_t nodes = 0;
    for (const auto& run : runs) {
        const auto& project = *run.service->snapshot(run.result.project_id)->project;
        const auto graph = run.service->mindmap(run.result.project_id);
        for (const auto& thread : project.threads) {
            const auto sub = mindmap::restrict_to_thread(graph, thread.thread_id);
            for (const auto& p : t::isomorphism_oracle(sub, thread)) out.fail(name_of(run) + ": " + p);
            std::multiset<std::string> edge_acts, move_acts;
            for (const auto& e : sub.edges) edge_acts.insert(e.act);
            for (const auto& m : thread.state.moves()) {
                if (m.target) move_acts.insert(m.act ? std::string(protocol::to_string(*m.act)) : "REPLY");
            }
            if (edge_acts != move_acts) out.fail(name_of(run) + ": edge acts differ in " + thread.thread_id);
        }
        for (const auto& node : graph.nodes) {
            ++nodes;
            const auto& l = node.labels;
            if (text::utf8_length(l.overview) > text::utf8_length(l.keyword) ||
                text::utf8_length(l.keyword) > text::utf8_length(l.summary)) {
                out.fail(name_of(run) + ": labels not monotone for " + node.node_id);
            }
            if (move_is_root(project, node.node_id) != !l.overview.empty()) {
                out.fail(name_of(run) + ": overview label should show only thread titles, " + node.node_id);
            }
            const auto src = mindmap::source_of(graph, node.node_id);
            const auto* thread = project.find_thread(src.thread_id);
            const auto* move = project.find_move(node.node_id);
            if (!thread || !move || project.thread_of(node.node_id) != thread) {
                out.fail(name_of(run) + ": source_of does not locate " + node.node_id);
                continue;
            }
            const auto resolved = src.move_id.value_or(thread->state.root()->move_id);
            if (resolved != node.node_id || src.move_id.has_value() == move->is_root()) {
                out.fail(name_of(run) + ": source_of does not round-trip " + node.node_id);
            }
        }
    }
    out.detail = std::to_string(nodes) + " nodes across " + std::to_string(runs.size()) + " scenarios";
    return out;
}

// 6. Determinism of the bundled walkthrough.
Outcome determinism() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    const auto a = t::run_scenario(t::walkthrough_path());
    const auto b = t::run_scenario(t::walkthrough_path());
    const double secs = seconds_since(start);
    if (a.transcript != b.transcript) out.fail("transcripts differ");
    if (a.digest != b.digest) out.fail("state digests differ");
    if (service::events_to_jsonl(a.events) != service::events_to_jsonl(b.events)) out.fail("event logs differ");
    if (secs >= 30.0) out.fail("runtime " + std::to_string(secs) + " s");

    // The walkthrough must exercise the whole flow.
    const auto script = service::load_script(t::walkthrough_path());
    std::set<std::string> actions;
    bool five = false, disagree = false;
    for (const auto& step : script["steps"]) {
        actions.insert(step["action"].get<std::string>());
        if (step["action"] == "reply") {
            const auto text = step["text"].get<std::string>();
            five = five || std::count(text.begin(), text.end(), '@') >= 5;
        }
        if (step["action"] == "what_if" && step.value("stance", "") == "disagree") disagree = true;
    }
    for (const auto* needed : {"reply", "what_if", "branch", "edit_proposal"}) {
        if (!actions.count(needed)) out.fail(std::string("walkthrough lacks ") + needed);
    }
    if (!five || !disagree) out.fail("walkthrough lacks the 5-agent mention or the disagree what-if");
    std::ostringstream d;
    d << a.transcript.size() << " transcript bytes, " << a.events.size() << " events, digest " << a.digest.substr(0, 12)
      << ", 2 runs in " << std::fixed << std::setprecision(2) << secs << " s";
    out.detail = d.str();
    return out;
}

// 7. Citation integrity.
Outcome citation_integrity(const std::vector<ScenarioRun>& runs) {
    Outcome out;
    const std::regex marker(R"(\[(\d+)\])");
    std::size_t moves = 0, cited = 0;
    for (const auto& run : runs) {
        const auto snap = run.service->snapshot(run.result.project_id);
        for (const auto& thread : snap->project->threads) {
            for (const auto& m : thread.state.moves()) {
                if (!m.author.is_agent()) continue;
                ++moves;
                std::vector<int> first_seen;
                for (auto it = std::sregex_iterator(m.body.begin(), m.body.end(), marker); it != std::sregex_iterator(); ++it) {
                    const int n = std::stoi((*it)[1].str());
                    if (std::find(first_seen.begin(), first_seen.end(), n) == first_seen.end()) first_seen.push_back(n);
                }
                for (std::size_t i = 0; i < first_seen.size(); ++i) {
                    if (first_seen[i] != static_cast<int>(i) + 1) out.fail(m.move_id + ": markers not contiguous in order");
                }
                if (first_seen.size() != m.citations.size()) out.fail(m.move_id + ": marker count differs from citations");
                for (const auto& key : m.citations) {
                    ++cited;
                    if (!snap->graph.contains_paper(key)) out.fail(m.move_id + ": " + key + " not in the knowledge graph");
                }
            }
        }
    }
    if (cited == 0) out.fail("no scenario move cites anything");

    const auto dir = t::data_dir() / "fixtures" / "scholar";
    knowledge::SemanticScholarClient s2(knowledge::RecordedCorpusTransport::from_file(dir / "semantic_scholar.json"));
    knowledge::OpenAlexClient oa(knowledge::RecordedCorpusTransport::from_file(dir / "openalex.json"));
    std::vector<knowledge::ScholarClient*> clients{&s2, &oa};
    const auto found = knowledge::search_papers("plant breeding CRISPR", clients, 5);
    const bool crispr = std::any_of(found.begin(), found.end(), [](const knowledge::PaperRecord& p) {
        return p.year == 2023 && p.title.find("CRISPR") != std::string::npos && p.first_author() == "Muhammad Ahmad";
    });
    if (!crispr) out.fail("CRISPR query did not return the 2023 record");
    out.detail = std::to_string(moves) + " agent moves, " + std::to_string(cited) +
                 " citations resolved; CRISPR query returns the 2023 record";
    return out;
}

// 8. Crash-replay at every event boundary.
Outcome crash_replay() {
    Outcome out;
    const auto events = t::run_scenario(t::walkthrough_path()).events;
    t::TempDir dir;
    for (std::size_t k = 0; k <= events.size(); ++k) {
        const std::span<const service::Event> prefix(events.data(), k);
        try {
            const auto state = service::replay(prefix);
            for (const auto& p : service::check_state_invariants(state)) out.fail("prefix " + std::to_string(k) + ": " + p);
        } catch (const std::exception& e) {
            out.fail("prefix " + std::to_string(k) + ": " + e.what());
        }

        // The same prefix on disk with the next event torn halfway.
        const auto id = "crash" + std::to_string(k);
        service::FileEventStore store(dir.path());
        for (const auto& e : prefix) store.append(id, e);
        if (k < events.size()) {
            std::ofstream f(store.path_for(id), std::ios::app | std::ios::binary);
            const auto line = service::to_json(events[k]).dump();
            f << line.substr(0, line.size() / 2);
        }
        const auto loaded = store.load(id);
        if (loaded != std::vector<service::Event>(prefix.begin(), prefix.end())) {
            out.fail("prefix " + std::to_string(k) + ": torn log did not load back to the prefix");
        }
    }
    out.detail = std::to_string(events.size() + 1) + " prefixes replayed from memory and from torn log files";
    return out;
}

// 9. Memory lineage.
void collect(const std::vector<agent::LineageNode>& forest, std::multiset<std::string>& ids) {
    for (const auto& n : forest) {
        ids.insert(n.snippet_id);
        collect(n.children, ids);
    }
}

Outcome memory_lineage(const std::vector<ScenarioRun>& runs) {
    Outcome out;
    std::size_t agents = 0, snippets = 0;
    for (const auto& run : runs) {
        const auto snap = run.service->snapshot(run.result.project_id);
        for (const auto& [agent_id, store] : snap->memories) {
            ++agents;
            snippets += store.snippets().size();
            const std::vector<agent::MemorySnippet> all(store.snippets().begin(), store.snippets().end());
            if (!t::oracle_is_dag(all)) out.fail(name_of(run) + ": " + agent_id + " lineage has a cycle");
            const auto views = run.service->memory_views(run.result.project_id, agent_id);
            std::multiset<std::string> stream, forest;
            for (const auto& s : views.stream) stream.insert(s.snippet_id);
            collect(views.lineage, forest);
            std::multiset<std::string> stored;
            for (const auto& s : all) stored.insert(s.snippet_id);
            if (stream != forest || stream != stored) out.fail(name_of(run) + ": " + agent_id + " views differ");
        }
    }
    if (snippets == 0) out.fail("no memory snippets were distilled");
    out.detail = std::to_string(agents) + " agent memories, " + std::to_string(snippets) + " snippets";
    return out;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
    std::vector<ScenarioRun> runs;
    try {
        runs = run_all_scenarios();
    } catch (const std::exception& e) {
        std::cerr << "scenario run failed: " << e.what() << "\n";
        return 1;
    }
    criteria.emplace_back("protocol oracle equivalence", protocol_equivalence);
    criteria.emplace_back("root-act invariant", root_act_invariant);
    criteria.emplace_back("responder routing table", routing_table);
    criteria.emplace_back("commitment conservation and challenges", [&] { return commitments(runs); });
    criteria.emplace_back("mind-map isomorphism", [&] { return mindmap_isomorphism(runs); });
    criteria.emplace_back("determinism", determinism);
    criteria.emplace_back("citation integrity", [&] { return citation_integrity(runs); });
    criteria.emplace_back("crash-replay", crash_replay);
    criteria.emplace_back("memory lineage", [&] { return memory_lineage(runs); });

    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << "\n";
        for (const auto& p : o.problems) std::cout << "      " << p << "\n";
        if (!o.pass) ++failed;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - static_cast<std::size_t>(failed) << "/"
              << criteria.size() << "\n";
    return failed ? 1 : 0;
}
