#include "agora/forum/project.hpp"

#include "agora/common/text.hpp"
#include "agora/protocol/transcript.hpp"

#include <algorithm>
#include <set>

namespace agora::forum {

using protocol::Act;
using protocol::DeliberationMove;
using protocol::Participant;

const Thread* Project::find_thread(const std::string& thread_id) const {
    auto it = std::find_if(threads.begin(), threads.end(), [&](const Thread& t) { return t.thread_id == thread_id; });
    return it == threads.end() ? nullptr : &*it;
}

Thread* Project::find_thread(const std::string& thread_id) {
    return const_cast<Thread*>(std::as_const(*this).find_thread(thread_id));
}

const Thread* Project::thread_of(const protocol::MoveId& move_id) const {
    for (const auto& t : threads) {
        if (t.state.find(move_id)) return &t;
    }
    return nullptr;
}

const DeliberationMove* Project::find_move(const protocol::MoveId& move_id) const {
    const Thread* t = thread_of(move_id);
    return t ? t->state.find(move_id) : nullptr;
}

bool Project::in_roster(const std::string& agent_id) const {
    return std::find(roster.begin(), roster.end(), agent_id) != roster.end();
}

std::string next_thread_id(const Project& project) {
    std::size_t n = project.threads.size() + 1;
    while (project.find_thread("t" + std::to_string(n))) ++n;
    return "t" + std::to_string(n);
}

protocol::MoveId next_move_id(const protocol::ThreadState& thread) {
    return thread.thread_id() + ".m" + std::to_string(thread.moves().size() + 1);
}

DeliberationMove make_thread_root(const std::string& thread_id, const std::string& opener, const std::string& title,
                                  const std::string& description, std::uint64_t timestamp) {
    DeliberationMove root;
    root.move_id = thread_id + ".m1";
    root.author = Participant::agent(opener);
    root.act = Act::Issue;
    root.body = description.empty() ? title : title + "\n\n" + description;
    root.rationale = "Opened this thread to deliberate on: " + title;
    root.timestamp = timestamp;
    return root;
}

std::string branch_opener(const Project& project, const protocol::MoveId& source_move) {
    const DeliberationMove* source = project.find_move(source_move);
    if (!source) throw UnknownMove(source_move);
    if (source->author.is_agent() && project.in_roster(source->author.id)) return source->author.id;
    if (project.roster.empty()) throw ForumError("project " + project.project_id + " has an empty roster");
    return project.roster.front();
}

DeliberationMove make_branch_root(const Project& project, const std::string& thread_id,
                                  const protocol::MoveId& source_move, const std::string& title,
                                  std::uint64_t timestamp) {
    const DeliberationMove* source = project.find_move(source_move);
    if (!source) throw UnknownMove(source_move);
    std::string quote = text::utf8_prefix(source->body, 200);
    if (quote.size() < source->body.size()) quote += "…";

    DeliberationMove root = make_thread_root(thread_id, branch_opener(project, source_move), title, {}, timestamp);
    root.body = title + "\n\nBranched from " + source_move + " (" + source->author.id + "):\n> " + quote;
    root.rationale = "Branched from " + source_move + " to explore it in more depth.";
    return root;
}

Thread& add_thread(Project& project, const std::string& thread_id, const std::string& title,
                   const std::string& description, const DeliberationMove& root,
                   const std::optional<Provenance>& provenance) {
    if (project.find_thread(thread_id)) throw ForumError("duplicate thread id " + thread_id);
    if (project.roster.empty()) throw ForumError("project " + project.project_id + " has an empty roster");
    if (!root.author.is_agent() || root.act != Act::Issue) throw ForumError("thread root must be an agent ISSUE");
    if (!project.in_roster(root.author.id)) throw ForumError("thread opener " + root.author.id + " is not in the roster");
    if (provenance) {
        const Thread* source = project.find_thread(provenance->source_thread);
        if (!source || !source->state.find(provenance->source_move)) throw UnknownMove(provenance->source_move);
    }
    Thread t{thread_id, title, description, protocol::ThreadState(thread_id), provenance};
    t.state.apply(root);
    project.threads.push_back(std::move(t));
    return project.threads.back();
}

Thread& create_thread(Project& project, const std::string& title, const std::string& description,
                      const std::string& opener, std::uint64_t timestamp) {
    const auto id = next_thread_id(project);
    return add_thread(project, id, title, description, make_thread_root(id, opener, title, description, timestamp));
}

Thread& branch_thread(Project& project, const protocol::MoveId& source_move, const std::string& title,
                      std::uint64_t timestamp) {
    const Thread* source = project.thread_of(source_move);
    if (!source) throw UnknownMove(source_move);
    const Provenance link{source->thread_id, source_move};
    const auto id = next_thread_id(project);
    auto root = make_branch_root(project, id, source_move, title, timestamp);
    return add_thread(project, id, title, {}, root, link);
}

bool provenance_acyclic(const Project& project) {
    for (const auto& start : project.threads) {
        std::set<std::string> seen{start.thread_id};
        const Thread* t = &start;
        while (t->provenance) {
            t = project.find_thread(t->provenance->source_thread);
            if (!t) break;
            if (!seen.insert(t->thread_id).second) return false;
        }
    }
    return true;
}

nlohmann::json to_json(const Thread& thread) {
    nlohmann::json j{{"thread_id", thread.thread_id},
                     {"title", thread.title},
                     {"description", thread.description},
                     {"state", protocol::to_json(thread.state)}};
    j["provenance"] = thread.provenance
        ? nlohmann::json{{"source_thread", thread.provenance->source_thread}, {"source_move", thread.provenance->source_move}}
        : nlohmann::json();
    return j;
}

nlohmann::json to_json(const Project& project) {
    auto threads = nlohmann::json::array();
    for (const auto& t : project.threads) threads.push_back(to_json(t));
    return {{"project_id", project.project_id},
            {"title", project.title},
            {"proposal", to_json(project.proposal)},
            {"roster", project.roster},
            {"threads", threads}};
}

nlohmann::json export_project(const Project& project) {
    auto threads = nlohmann::json::array();
    auto provenance = nlohmann::json::array();
    for (const auto& t : project.threads) {
        threads.push_back({{"thread_id", t.thread_id},
                           {"title", t.title},
                           {"description", t.description},
                           {"transcript", protocol::export_transcript(t.state)}});
        if (t.provenance) {
            provenance.push_back({{"thread_id", t.thread_id},
                                  {"source_thread", t.provenance->source_thread},
                                  {"source_move", t.provenance->source_move}});
        }
    }
    auto revisions = nlohmann::json::array();
    for (const auto& r : project.proposal.revisions()) revisions.push_back(to_json(r));
    return {{"format", "agora-project-export/1"},
            {"project_id", project.project_id},
            {"title", project.title},
            {"roster", project.roster},
            {"proposal", {{"initial", sections_to_json(project.proposal.initial_sections())},
                          {"sections", sections_to_json(project.proposal.sections())}}},
            {"revisions", revisions},
            {"threads", threads},
            {"provenance", provenance}};
}

}  // namespace agora::forum
