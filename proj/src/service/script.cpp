#include "agora/service/script.hpp"

#include "agora/protocol/transcript.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace agora::service {

using nlohmann::json;

namespace {

const std::set<std::string> known_actions{"create_thread", "suggest_threads", "reply",      "what_if",
                                          "branch",        "edit_proposal",   "quick_note", "set_status"};

std::string base_name(const std::string& ref) { return ref.substr(0, ref.find('.')); }

std::string require_string(const json& step, const char* key, std::size_t index) {
    if (!step.contains(key) || !step[key].is_string() || step[key].get<std::string>().empty()) {
        throw ScriptError(index, std::string("missing string field '") + key + "'");
    }
    return step[key].get<std::string>();
}

struct Bindings {
    std::map<std::string, std::string> threads;                 // name -> thread id
    std::map<std::string, std::string> moves;                   // name -> move id
    std::map<std::string, std::vector<std::string>> responses;  // name -> agent move ids

    std::string move(const std::string& ref, std::size_t step, const forum::Project& project) const {
        const auto dot = ref.find('.');
        const auto name = ref.substr(0, dot);
        if (dot != std::string::npos) {
            std::size_t k = 0;
            try {
                k = std::stoul(ref.substr(dot + 1));
            } catch (const std::exception&) {
                throw ScriptError(step, "bad reference " + ref);
            }
            auto it = responses.find(name);
            if (it == responses.end() || k == 0 || k > it->second.size()) {
                throw ScriptError(step, "reference " + ref + " has no agent move");
            }
            return it->second[k - 1];
        }
        if (auto it = moves.find(name); it != moves.end()) return it->second;
        if (auto it = threads.find(name); it != threads.end()) return project.find_thread(it->second)->state.root()->move_id;
        throw ScriptError(step, "unknown reference " + ref);
    }

    std::string thread(const std::string& ref, std::size_t step, const forum::Project& project) const {
        if (auto it = threads.find(ref); it != threads.end()) return it->second;
        const auto* t = project.thread_of(move(ref, step, project));
        return t->thread_id;
    }
};

void expect_true(bool ok, std::size_t step, const std::string& what) {
    if (!ok) throw AssertionFailed(step, what);
}

std::vector<std::string> agent_moves(const ReplyResult& r, std::vector<std::string>* authors, std::size_t* errors) {
    std::vector<std::string> ids;
    for (std::size_t i = 1; i < r.items.size(); ++i) {
        const auto& item = r.items[i];
        if (item.kind == StreamItem::Kind::Error) {
            ++*errors;
            continue;
        }
        ids.push_back(item.move->move_id);
        authors->push_back(item.move->author.id);
    }
    return ids;
}

}  // namespace

void validate_script(const json& script) {
    if (!script.is_object()) throw ScriptError(0, "script must be a JSON object");
    const auto steps = script.value("steps", json::array());
    if (!steps.is_array()) throw ScriptError(0, "'steps' must be an array");
    std::set<std::string> names;
    const auto check_ref = [&](const json& step, const char* key, std::size_t i) {
        const auto ref = require_string(step, key, i);
        if (!names.count(base_name(ref))) throw ScriptError(i, "reference " + ref + " is not defined by an earlier step");
    };
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        const std::size_t n = i + 1;
        if (!step.is_object()) throw ScriptError(n, "step must be an object");
        const auto action = require_string(step, "action", n);
        if (!known_actions.count(action)) throw ScriptError(n, "unknown action " + action);
        if (action == "create_thread") require_string(step, "title", n);
        if (action == "reply") {
            check_ref(step, "parent", n);
            if (!step.contains("text") || !step["text"].is_string()) throw ScriptError(n, "missing string field 'text'");
        }
        if (action == "what_if") {
            check_ref(step, "target", n);
            require_string(step, "agent", n);
            if (!forum::parse_stance(require_string(step, "stance", n))) throw ScriptError(n, "unknown stance");
        }
        if (action == "branch") {
            check_ref(step, "source", n);
            require_string(step, "title", n);
        }
        if (action == "edit_proposal") {
            if (!forum::parse_section(require_string(step, "section", n))) throw ScriptError(n, "unknown section");
            if (!step.contains("text") || !step["text"].is_string()) throw ScriptError(n, "missing string field 'text'");
        }
        if (action == "quick_note") require_string(step, "text", n);
        if (action == "set_status") {
            check_ref(step, "source", n);
            require_string(step, "owner", n);
            const auto status = protocol::parse_commitment_status(require_string(step, "status", n));
            if (!status) throw ScriptError(n, "unknown commitment status");
        }
        if (step.contains("as")) {
            if (!step["as"].is_string() || step["as"].get<std::string>().find('.') != std::string::npos) {
                throw ScriptError(n, "'as' must be a name without dots");
            }
            names.insert(step["as"].get<std::string>());
        }
    }
}

ScriptResult run_script_on(DeliberationService& service, const json& script) {
    validate_script(script);
    ScriptResult result;
    const auto roster = script.value("roster", std::vector<std::string>{});
    result.project_id = service.create_project(script.value("title", std::string("untitled")),
                                               forum::sections_from_json(script.value("proposal", json::object())), roster);
    const auto& pid = result.project_id;
    const std::string user = script.value("user", std::string("user"));
    Bindings b;

    const auto steps = script.value("steps", json::array());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        const std::size_t n = i + 1;
        const auto action = step["action"].get<std::string>();
        const auto expect = step.value("expect", json::object());
        const auto name = step.value("as", std::string{});
        json record{{"step", n}, {"action", action}};
        const auto project = [&] { return *service.snapshot(pid)->project; };

        if (action == "create_thread") {
            std::optional<std::string> opener;
            if (step.contains("opener")) opener = step["opener"].get<std::string>();
            const auto tid = service.create_thread(pid, step["title"], step.value("description", std::string{}), opener);
            if (!name.empty()) b.threads[name] = tid;
            record["thread_id"] = tid;
        } else if (action == "suggest_threads") {
            const auto suggestions = service.suggest_threads(pid);
            record["suggestions"] = json::array();
            for (const auto& s : suggestions) record["suggestions"].push_back(forum::to_json(s));
            if (expect.contains("min")) expect_true(suggestions.size() >= expect["min"].get<std::size_t>(), n, "too few suggestions");
            if (step.contains("confirm")) {
                const auto k = step["confirm"].get<std::size_t>();
                if (k >= suggestions.size()) throw ScriptError(n, "no suggestion " + std::to_string(k));
                const auto tid = service.create_thread(pid, suggestions[k].title, suggestions[k].description);
                if (!name.empty()) b.threads[name] = tid;
                record["thread_id"] = tid;
            }
        } else if (action == "reply") {
            const auto parent = b.move(step["parent"], n, project());
            const auto reply = service.post_reply(pid, {parent, step["text"], step.value("author", user), {}});
            std::vector<std::string> authors;
            std::size_t errors = 0;
            const auto ids = agent_moves(reply, &authors, &errors);
            if (!name.empty()) {
                b.moves[name] = reply.user_move;
                b.responses[name] = ids;
            }
            record["user_move"] = reply.user_move;
            record["responders"] = reply.routing.responders;
            record["agent_moves"] = ids;
            record["errors"] = errors;
            if (expect.contains("responders")) {
                expect_true(reply.routing.responders == expect["responders"].get<std::vector<std::string>>(), n,
                            "responders " + json(reply.routing.responders).dump());
            }
            if (expect.contains("authors")) {
                expect_true(authors == expect["authors"].get<std::vector<std::string>>(), n, "authors " + json(authors).dump());
            }
            if (expect.contains("moves")) expect_true(ids.size() == expect["moves"].get<std::size_t>(), n, "agent move count");
            if (expect.contains("errors")) expect_true(errors == expect["errors"].get<std::size_t>(), n, "error count");
            if (expect.contains("needs_mention")) {
                expect_true(reply.routing.needs_mention == expect["needs_mention"].get<bool>(), n, "needs_mention");
            }
        } else if (action == "what_if") {
            const auto stance = *forum::parse_stance(step["stance"].get<std::string>());
            const auto session = step.value("session", std::string("default"));
            const auto target = b.move(step["target"], n, project());
            const auto before = service.digest(pid);
            const auto draft = service.what_if_preview(pid, session, {target, step["agent"], stance});
            expect_true(service.digest(pid) == before, n, "preview changed the project state");
            record["draft_act"] = protocol::to_string(*draft.move.act);
            if (expect.contains("act")) {
                expect_true(protocol::to_string(*draft.move.act) == expect["act"].get<std::string>(), n, "draft act");
            }
            if (step.value("post", false)) {
                const auto item = service.post_preview(pid, session);
                record["move_id"] = item.move->move_id;
                if (!name.empty()) b.moves[name] = item.move->move_id;
            } else {
                service.discard_preview(pid, session);
            }
        } else if (action == "branch") {
            const auto source = b.move(step["source"], n, project());
            const auto source_thread = project().thread_of(source)->thread_id;
            const auto before = project().find_thread(source_thread)->state;
            const auto tid = service.branch_thread(pid, source, step["title"]);
            expect_true(project().find_thread(source_thread)->state == before, n, "branching changed the source thread");
            if (!name.empty()) b.threads[name] = tid;
            record["thread_id"] = tid;
            if (expect.contains("root_act")) {
                const auto* root = project().find_thread(tid)->state.root();
                expect_true(root->act && protocol::to_string(*root->act) == expect["root_act"].get<std::string>(), n,
                            "branch root act");
            }
        } else if (action == "edit_proposal") {
            const auto revision = service.edit_proposal(pid, step["section"], step["text"]);
            record["revision"] = revision ? json(revision->seq) : json();
            if (expect.contains("recorded")) expect_true(revision.has_value() == expect["recorded"].get<bool>(), n, "revision recorded");
        } else if (action == "quick_note") {
            const auto revision = service.quick_note(pid, step["text"]);
            record["revision"] = revision ? json(revision->seq) : json();
        } else if (action == "set_status") {
            const auto source = b.move(step["source"], n, project());
            const auto tid = project().thread_of(source)->thread_id;
            service.set_commitment_status(pid, tid, step["owner"], source,
                                          *protocol::parse_commitment_status(step["status"].get<std::string>()));
        }

        if (expect.contains("threads")) {
            expect_true(project().threads.size() == expect["threads"].get<std::size_t>(), n, "thread count");
        }
        result.steps.push_back(record);
    }

    const auto snap = service.snapshot(pid);
    for (const auto& t : snap->project->threads) result.transcript += protocol::export_transcript(t.state);
    result.digest = state_digest(*snap);
    result.events = service.events(pid);
    return result;
}

ScriptResult run_script(const json& script, const ScriptOptions& options) {
    validate_script(script);
    ServiceDeps deps;
    deps.provider = options.provider ? options.provider : std::make_shared<agent::MockProvider>();
    deps.scholars = options.scholars;
    deps.catalog = options.catalog;
    deps.clock = std::make_shared<LogicalClock>();
    deps.store = std::make_shared<MemoryEventStore>();
    DeliberationService service(options.config, std::move(deps));
    return run_script_on(service, script);
}

json load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read script " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScriptError(0, std::string("script is not valid JSON: ") + e.what());
    }
}

}  // namespace agora::service
