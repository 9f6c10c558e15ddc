#pragma once

#include "agora/forum/proposal.hpp"
#include "agora/protocol/thread_state.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::forum {

class UnknownMove : public std::runtime_error {
public:
    explicit UnknownMove(const std::string& id) : std::runtime_error("unknown move " + id) {}
};

class UnknownThread : public std::runtime_error {
public:
    explicit UnknownThread(const std::string& id) : std::runtime_error("unknown thread " + id) {}
};

class ForumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A branched thread points back at the move it was spawned from.
struct Provenance {
    std::string source_thread;
    protocol::MoveId source_move;
    bool operator==(const Provenance&) const = default;
};

struct Thread {
    std::string thread_id;
    std::string title;
    std::string description;
    protocol::ThreadState state;
    std::optional<Provenance> provenance;

    bool operator==(const Thread&) const = default;
};

struct Project {
    std::string project_id;
    std::string title;
    ProposalDocument proposal;
    std::vector<std::string> roster;
    std::vector<Thread> threads;

    const Thread* find_thread(const std::string& thread_id) const;
    Thread* find_thread(const std::string& thread_id);
    /// The thread holding `move_id`, or nullptr.
    const Thread* thread_of(const protocol::MoveId& move_id) const;
    const protocol::DeliberationMove* find_move(const protocol::MoveId& move_id) const;
    bool in_roster(const std::string& agent_id) const;

    bool operator==(const Project&) const = default;
};

std::string next_thread_id(const Project& project);
protocol::MoveId next_move_id(const protocol::ThreadState& thread);

/// ISSUE root for a new thread, authored by `opener`.
protocol::DeliberationMove make_thread_root(const std::string& thread_id, const std::string& opener,
                                            const std::string& title, const std::string& description,
                                            std::uint64_t timestamp);

/// Opener for a branch from `source_move`: its agent author when it has one,
/// otherwise the first roster agent. Throws UnknownMove / ForumError.
std::string branch_opener(const Project& project, const protocol::MoveId& source_move);

/// ISSUE root quoting the source move. Throws UnknownMove.
protocol::DeliberationMove make_branch_root(const Project& project, const std::string& thread_id,
                                            const protocol::MoveId& source_move, const std::string& title,
                                            std::uint64_t timestamp);

/// Adds a thread whose state holds exactly its root. Throws ForumError on a
/// duplicate id, an empty roster, an opener outside the roster or a root that
/// is not an agent ISSUE; UnknownMove for dangling provenance.
Thread& add_thread(Project& project, const std::string& thread_id, const std::string& title,
                   const std::string& description, const protocol::DeliberationMove& root,
                   const std::optional<Provenance>& provenance = std::nullopt);

Thread& create_thread(Project& project, const std::string& title, const std::string& description,
                      const std::string& opener, std::uint64_t timestamp);

/// New thread rooted at an ISSUE that quotes `source_move`, with empty
/// commitment stores and a provenance link. The source thread is untouched.
Thread& branch_thread(Project& project, const protocol::MoveId& source_move, const std::string& title,
                      std::uint64_t timestamp);

/// Following thread -> source move -> containing thread never revisits a thread.
bool provenance_acyclic(const Project& project);

nlohmann::json to_json(const Thread& thread);
nlohmann::json to_json(const Project& project);

/// Proposal, revision log, thread transcripts and provenance links.
nlohmann::json export_project(const Project& project);

}  // namespace agora::forum
