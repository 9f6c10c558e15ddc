#include "agora/protocol/invariants.hpp"
#include "agora/protocol/transcript.hpp"
#include "agora/service/config.hpp"
#include "agora/service/events.hpp"
#include "agora/service/script.hpp"
#include "agora/service/service.hpp"
#include "agora/service/state.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <thread>

using namespace agora;
using namespace agora::service;
namespace t = agora::testing;
using nlohmann::json;

namespace {

std::map<forum::Section, std::string> proposal() {
    return {{forum::Section::Motivation, "Students lean on AI assistants; we study whether expert panels help."},
            {forum::Section::Methods, "A within-subjects study."}};
}

const std::vector<std::string> roster{"HCI_Researcher", "Learning_Scientist", "Clinical_Psychologist"};

struct Fixture {
    std::unique_ptr<DeliberationService> svc = t::make_service();
    std::string pid = svc->create_project("Critical thinking with AI", proposal(), roster);
    std::string tid = svc->create_thread(pid, "Measuring critical thinking", "How do we measure it?", "HCI_Researcher");
    std::string root = tid + ".m1";
};

void check_gapless(const std::vector<Event>& events) {
    for (std::size_t i = 0; i < events.size(); ++i) REQUIRE(events[i].seq == i + 1);
}

}  // namespace

TEST_CASE("config loads YAML, rejects unknown keys and masks secrets") {
    const auto c = config_from_yaml("port: 9000\nprovider:\n  kind: live\n  api_key: sk-secret\nresponder_cap: 4\n");
    CHECK(c.port == 9000);
    CHECK(c.provider.kind == "live");
    CHECK(c.responder_cap == 4);
    CHECK(to_json(c)["provider"]["api_key"] == "***");
    CHECK(to_json(c).dump().find("sk-secret") == std::string::npos);

    CHECK_THROWS_AS(config_from_yaml("bogus: 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_yaml("scholar:\n  nope: 2\n"), ConfigError);
    CHECK_THROWS_AS(config_from_yaml("provider:\n  kind: magic\n"), ConfigError);
    CHECK_THROWS_AS(config_from_yaml("responder_cap: 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_yaml("port: [1, 2]\n"), ConfigError);
    CHECK(config_from_yaml("").port == 8080);

    const auto bundled = load_config(t::data_dir().parent_path() / "config" / "agora.yaml", t::test_config());
    CHECK(bundled.provider.kind == "mock");
    CHECK_THROWS_AS(load_config("/nonexistent/agora.yaml"), ConfigError);
}

TEST_CASE("environment variables override file settings") {
    std::map<std::string, std::string> env{{"AGORA_PORT", "7001"}, {"S2_API_KEY", "k"}, {"AGORA_FOLLOW_ON_ROUND", "yes"}};
    const EnvLookup lookup = [&](const std::string& name) -> std::optional<std::string> {
        auto it = env.find(name);
        return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    auto c = config_from_yaml("port: 9000\n");
    apply_env_overrides(c, lookup);
    CHECK(c.port == 7001);
    CHECK(c.scholar.semantic_scholar_key == "k");
    CHECK(c.follow_on_round);
    env["AGORA_PORT"] = "99999";
    CHECK_THROWS_AS(apply_env_overrides(c, lookup), ConfigError);
    env["AGORA_PORT"] = "12ab";
    CHECK_THROWS_AS(apply_env_overrides(c, lookup), ConfigError);
}

TEST_CASE("event JSONL round-trips and parsing is strict") {
    const auto result = t::run_scenario(t::walkthrough_path());
    const auto text = events_to_jsonl(result.events);
    CHECK(events_from_jsonl(text) == result.events);
    CHECK_THROWS_AS(events_from_jsonl(text + "{\"seq\":"), CorruptPayload);
    CHECK_THROWS_AS(event_from_json(json{{"seq", 1}, {"kind", "nope"}, {"payload", json::object()}, {"at", 1}}),
                    CorruptPayload);
    for (auto kind : {EventKind::ProjectCreated, EventKind::MovePosted, EventKind::PaperInserted}) {
        CHECK(parse_event_kind(to_string(kind)) == kind);
    }
}

TEST_CASE("file event store skips a torn trailing line") {
    t::TempDir dir;
    FileEventStore store(dir.path());
    const auto events = t::run_scenario(t::walkthrough_path()).events;
    for (const auto& e : events) store.append("p1", e);
    CHECK(store.load("p1") == events);
    CHECK(store.projects() == std::vector<std::string>{"p1"});
    {
        std::ofstream out(store.path_for("p1"), std::ios::app | std::ios::binary);
        const auto torn = to_json(Event{events.size() + 1, EventKind::PersonaEdited, json::object(), 0}).dump();
        out << torn.substr(0, torn.size() / 2);
    }
    CHECK(store.load("p1") == events);
    CHECK(store.load("missing").empty());
}

TEST_CASE("replay rejects gaps and corrupt payloads and is deterministic") {
    const auto events = t::run_scenario(t::walkthrough_path()).events;
    const auto state = replay(events);
    CHECK(state == replay(events));
    CHECK(state_digest(state) == state_digest(replay(events)));
    CHECK(check_state_invariants(state).empty());

    auto gap = events;
    gap.erase(gap.begin() + 3);
    CHECK_THROWS_AS(replay(gap), GapInLog);

    auto corrupt = events;
    for (auto& e : corrupt) {
        if (e.kind == EventKind::MovePosted) {
            e.payload.erase("move");
            break;
        }
    }
    CHECK_THROWS_AS(replay(corrupt), CorruptPayload);

    auto foreign = events;
    for (auto& e : foreign) {
        if (e.kind == EventKind::MovePosted && e.payload["move"]["author"]["kind"] == "agent") {
            e.payload["move"]["author"]["id"] = "Stranger";
            break;
        }
    }
    CHECK_THROWS_AS(replay(foreign), CorruptPayload);
}

TEST_CASE("projects validate their roster and threads open with an agent ISSUE") {
    Fixture f;
    CHECK(f.pid == "p1");
    CHECK_THROWS_AS(f.svc->create_project("x", proposal(), {"Nobody"}), forum::UnknownAgent);
    const auto snap = f.svc->snapshot(f.pid);
    const auto* root = snap->project->find_move(f.root);
    REQUIRE(root);
    CHECK(root->act == protocol::Act::Issue);
    CHECK(root->author.id == "HCI_Researcher");
    CHECK(snap->personas.size() == roster.size());
    CHECK_THROWS_AS(f.svc->snapshot("p404"), NotFound);
    CHECK_FALSE(f.svc->suggest_threads(f.pid).empty());
}

TEST_CASE("replies route to mentioned agents and stream in application order") {
    Fixture f;
    const auto preview = f.svc->preview_responders(f.pid, f.root, "@Learning_Scientist and @Clinical_Psychologist?");
    CHECK(preview.routing.responders == std::vector<std::string>{"Learning_Scientist", "Clinical_Psychologist"});
    CHECK(preview.notify_line == "Will notify: @Learning_Scientist, @Clinical_Psychologist");

    std::vector<StreamItem> streamed;
    const auto result = f.svc->post_reply(f.pid, {f.root, "@Learning_Scientist and @Clinical_Psychologist?", "alex", {}},
                                          [&](const StreamItem& item) { streamed.push_back(item); });
    REQUIRE(result.items.size() == 3);
    REQUIRE(streamed.size() == 3);
    CHECK(!result.items[0].move->author.is_agent());
    CHECK(result.items[0].move->body == "@Learning_Scientist and @Clinical_Psychologist?");
    CHECK(result.items[1].move->author.id == "Learning_Scientist");
    CHECK(result.items[2].move->author.id == "Clinical_Psychologist");
    for (std::size_t i = 0; i < 3; ++i) CHECK(streamed[i].move->move_id == result.items[i].move->move_id);
    for (std::size_t i = 1; i < 3; ++i) CHECK(result.items[i].move->target == result.user_move);

    const auto none = f.svc->preview_responders(f.pid, result.user_move, "no mention here");
    CHECK(none.routing.needs_mention);
    CHECK(none.notify_line == "Mention an agent with @ to get a response");
    const auto posted = f.svc->post_reply(f.pid, {result.user_move, "no mention here", "alex", {}});
    CHECK(posted.items.size() == 1);

    const auto by_default = f.svc->preview_responders(f.pid, result.items[1].move->move_id, "go on");
    CHECK(by_default.routing.by_default);
    CHECK(by_default.notify_line == "Will notify: @Learning_Scientist (default)");
    CHECK_THROWS_AS(f.svc->preview_responders(f.pid, "t1.m99", "x"), forum::UnknownMove);
    CHECK(check_state_invariants(*f.svc->snapshot(f.pid)).empty());
}

TEST_CASE("idempotency keys replay the original outcome") {
    Fixture f;
    const ReplyRequest request{f.root, "@HCI_Researcher thoughts?", "alex", "key-1"};
    const auto first = f.svc->post_reply(f.pid, request);
    const auto seq = f.svc->snapshot(f.pid)->seq;
    const auto again = f.svc->post_reply(f.pid, request);
    CHECK(again.replayed);
    CHECK(f.svc->snapshot(f.pid)->seq == seq);
    CHECK(again.user_move == first.user_move);
    REQUIRE(again.items.size() == first.items.size());
    for (std::size_t i = 0; i < first.items.size(); ++i) CHECK(again.items[i].move == first.items[i].move);

    const auto t2 = f.svc->create_thread(f.pid, "Second", "", std::nullopt, "thread-key");
    CHECK(f.svc->create_thread(f.pid, "Second", "", std::nullopt, "thread-key") == t2);
    CHECK(f.svc->create_project("Critical thinking with AI", proposal(), roster, "proj-key") ==
          f.svc->create_project("Critical thinking with AI", proposal(), roster, "proj-key"));
    const auto b = f.svc->branch_thread(f.pid, first.items[1].move->move_id, "Side", "branch-key");
    CHECK(f.svc->branch_thread(f.pid, first.items[1].move->move_id, "Side", "branch-key") == b);
}

TEST_CASE("what-if previews do not mutate state and illegal drafts stay available") {
    Fixture f;
    const auto reply = f.svc->post_reply(f.pid, {f.root, "@HCI_Researcher thoughts?", "alex", {}});
    const auto claim = reply.items[1].move->move_id;
    const auto digest = f.svc->digest(f.pid);

    const auto draft = f.svc->what_if_preview(f.pid, "s1", {claim, "Learning_Scientist", forum::Stance::Question});
    CHECK(draft.move.act == protocol::Act::Question);
    CHECK(f.svc->digest(f.pid) == digest);
    CHECK(f.svc->current_preview(f.pid, "s1").has_value());
    CHECK_FALSE(f.svc->current_preview(f.pid, "other").has_value());

    const auto posted = f.svc->post_preview(f.pid, "s1");
    REQUIRE(posted.move);
    CHECK(posted.move->act == protocol::Act::Question);
    CHECK(posted.move->target == claim);
    CHECK_FALSE(f.svc->current_preview(f.pid, "s1").has_value());
    CHECK_THROWS_AS(f.svc->post_preview(f.pid, "s1"), NotFound);

    f.svc->what_if_preview(f.pid, "s2", {f.root, "Learning_Scientist", forum::Stance::Disagree});
    const auto before = f.svc->digest(f.pid);
    try {
        f.svc->post_preview(f.pid, "s2");
        FAIL("expected a ProtocolError");
    } catch (const protocol::ProtocolError& e) {
        CHECK(e.kind() == protocol::ProtocolErrorKind::IllegalActForTarget);
    }
    CHECK(f.svc->digest(f.pid) == before);
    CHECK(f.svc->current_preview(f.pid, "s2").has_value());
    f.svc->discard_preview(f.pid, "s2");
    CHECK_FALSE(f.svc->current_preview(f.pid, "s2").has_value());

    CHECK_THROWS_AS(f.svc->what_if_preview(f.pid, "s3", {claim, "Nobody", forum::Stance::Agree}), forum::UnknownAgent);
    CHECK_THROWS_AS(f.svc->what_if_preview(f.pid, "s3", {"t1.m99", "HCI_Researcher", forum::Stance::Agree}),
                    forum::UnknownMove);
}

TEST_CASE("proposal edits detect stale bases and notes append") {
    Fixture f;
    const auto base = forum::section_digest(proposal().at(forum::Section::Methods));
    const auto rev = f.svc->edit_proposal(f.pid, "Methods", "A mixed-methods study.", base);
    REQUIRE(rev);
    CHECK(rev->before_digest == base);
    CHECK_FALSE(f.svc->edit_proposal(f.pid, "Methods", "A mixed-methods study.").has_value());
    try {
        f.svc->edit_proposal(f.pid, "Methods", "Something else.", base);
        FAIL("expected StaleEdit");
    } catch (const forum::StaleEdit& e) {
        CHECK(e.current_digest() == rev->after_digest);
    }
    CHECK_THROWS_AS(f.svc->edit_proposal(f.pid, "Budget", "x"), forum::SectionUnknown);
    f.svc->quick_note(f.pid, "first");
    f.svc->quick_note(f.pid, "second");
    CHECK(f.svc->snapshot(f.pid)->project->proposal.text(forum::Section::Notes) == "first\nsecond");
}

TEST_CASE("persona edits and commitment status changes are events") {
    Fixture f;
    auto persona = f.svc->snapshot(f.pid)->personas.at("Learning_Scientist");
    persona.basic_info.short_bio = "Dr. Renamed";
    f.svc->edit_persona(f.pid, persona);
    CHECK(f.svc->snapshot(f.pid)->personas.at("Learning_Scientist").basic_info.short_bio == "Dr. Renamed");
    CHECK(f.svc->catalog().at("Learning_Scientist").basic_info.short_bio != "Dr. Renamed");
    auto stranger = persona;
    stranger.agent_id = "Plant_Geneticist";
    CHECK_THROWS_AS(f.svc->edit_persona(f.pid, stranger), forum::UnknownAgent);

    const auto reply = f.svc->post_reply(f.pid, {f.root, "@Clinical_Psychologist claim something", "alex", {}});
    f.svc->what_if_preview(f.pid, "s", {reply.items[1].move->move_id, "Learning_Scientist", forum::Stance::Disagree});
    const auto rebut = f.svc->post_preview(f.pid, "s");
    const auto* move = &*rebut.move;
    REQUIRE(move->act == protocol::Act::Rebut);
    f.svc->set_commitment_status(f.pid, f.tid, move->author.id, move->move_id, protocol::CommitmentStatus::Conceded);
    const auto& state = f.svc->snapshot(f.pid)->project->find_thread(f.tid)->state;
    CHECK(state.stores().at(move->author.id).active_count() == 0);
    CHECK_THROWS_AS(f.svc->set_commitment_status(f.pid, f.tid, move->author.id, move->move_id,
                                                 protocol::CommitmentStatus::Retracted),
                    protocol::ProtocolError);
    CHECK(f.svc->events(f.pid).back().kind == EventKind::CommitmentStatusChanged);
}

TEST_CASE("a restarted service rebuilds projects from the file store") {
    t::TempDir dir;
    auto config = t::test_config();
    std::string digest;
    std::string pid;
    {
        auto svc = t::make_service(config, std::make_shared<FileEventStore>(dir.path()));
        pid = run_script_on(*svc, load_script(t::walkthrough_path())).project_id;
        digest = svc->digest(pid);
    }
    auto restarted = t::make_service(config, std::make_shared<FileEventStore>(dir.path()));
    restarted->load_from_store();
    CHECK(restarted->project_ids() == std::vector<std::string>{pid});
    CHECK(restarted->digest(pid) == digest);
    const auto next = restarted->create_project("Another", proposal(), roster);
    CHECK(next != pid);
}

TEST_CASE("concurrent replies keep the event log gapless and the state valid") {
    Fixture f;
    const auto seed = f.svc->post_reply(f.pid, {f.root, "@HCI_Researcher start", "alex", {}});
    const auto target = seed.items[1].move->move_id;
    std::vector<std::thread> workers;
    for (int i = 0; i < 6; ++i) {
        workers.emplace_back([&, i] {
            const std::string who = roster[static_cast<std::size_t>(i) % roster.size()];
            f.svc->post_reply(f.pid, {i % 2 ? target : f.root, "@" + who + " view " + std::to_string(i), "u" + std::to_string(i), {}});
            f.svc->quick_note(f.pid, "note " + std::to_string(i));
        });
    }
    for (auto& w : workers) w.join();
    const auto events = f.svc->events(f.pid);
    check_gapless(events);
    const auto snap = f.svc->snapshot(f.pid);
    CHECK(snap->seq == events.size());
    CHECK(check_state_invariants(*snap).empty());
    CHECK(replay(events) == *snap);
}

TEST_CASE("export includes threads, personas, the graph and the digest") {
    Fixture f;
    f.svc->post_reply(f.pid, {f.root, "@HCI_Researcher what about prior work?", "alex", {}});
    const auto doc = f.svc->export_project(f.pid);
    CHECK(doc["state_digest"] == f.svc->digest(f.pid));
    CHECK(doc["personas"].size() == roster.size());
    CHECK(doc.contains("knowledge_graph"));
    CHECK(doc.contains("threads"));
    const auto views = f.svc->memory_views(f.pid, "HCI_Researcher");
    CHECK_FALSE(views.stream.empty());
    CHECK_THROWS_AS(f.svc->memory_views(f.pid, "Nobody"), NotFound);
}

TEST_CASE("scripts are validated before running and expectations are enforced") {
    CHECK_NOTHROW(validate_script(load_script(t::walkthrough_path())));
    CHECK_THROWS_AS(validate_script(json::array()), ScriptError);
    CHECK_THROWS_AS(validate_script(json{{"steps", json::array({{{"action", "dance"}}})}}), ScriptError);
    CHECK_THROWS_AS(validate_script(json{{"steps", json::array({{{"action", "reply"}, {"parent", "ghost"}, {"text", "x"}}})}}),
                    ScriptError);

    json script{{"title", "T"},
                {"proposal", {{"Motivation", "Why this matters."}}},
                {"roster", {"HCI_Researcher", "Learning_Scientist"}},
                {"steps",
                 {{{"action", "create_thread"}, {"as", "t"}, {"title", "Topic"}},
                  {{"action", "reply"},
                   {"parent", "t"},
                   {"text", "@HCI_Researcher hi"},
                   {"expect", {{"responders", {"Learning_Scientist"}}}}}}}};
    try {
        run_script(script, t::script_options());
        FAIL("expected AssertionFailed");
    } catch (const AssertionFailed& e) {
        CHECK(e.step() == 2);
    }
    script["steps"][1]["expect"]["responders"] = {"HCI_Researcher"};
    const auto ok = run_script(script, t::script_options());
    CHECK(t::split_transcripts(ok.transcript).size() == 1);
}

TEST_CASE("every bundled scenario runs and its transcripts re-import") {
    for (const auto& path : t::scenario_paths()) {
        CAPTURE(path.string());
        const auto result = t::run_scenario(path);
        const auto state = replay(result.events);
        CHECK(state_digest(state) == result.digest);
        CHECK(check_state_invariants(state).empty());
        for (const auto& text : t::split_transcripts(result.transcript)) {
            const auto thread = protocol::import_transcript(text);
            CHECK(protocol::check_thread_invariants(thread).empty());
            CHECK(protocol::export_transcript(thread) == text);
        }
    }
}
