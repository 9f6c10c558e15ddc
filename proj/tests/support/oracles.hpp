#pragma once

#include "agora/agent/memory.hpp"
#include "agora/forum/mentions.hpp"
#include "agora/forum/project.hpp"
#include "agora/mindmap/graph.hpp"
#include "agora/protocol/thread_state.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

// Reference implementations written independently of the library code they
// check. They favour directness over speed.
namespace agora::testing {

// Legality written parent -> children: which acts may answer a given parent.
std::set<protocol::Act> oracle_children(protocol::ParentKind parent);

// A move list plus administrative status changes, replayed naively.
struct OracleThread {
    std::vector<protocol::DeliberationMove> moves;
    // (owner, source move) pairs no longer active
    std::set<std::pair<std::string, std::string>> withdrawn;
};

// Verdict for appending `move`, checked in the documented rule order.
std::optional<protocol::ProtocolErrorKind> oracle_verdict(const OracleThread& thread,
                                                          const protocol::DeliberationMove& move);

struct RandomThreadStep {
    enum class Kind { Move, Concede } kind = Kind::Move;
    protocol::DeliberationMove move;
    std::string owner;
    std::string source;
};

// A random sequence of at most `max_moves` proposed moves (legal or not) over
// two agents and one human, with occasional concessions.
std::vector<RandomThreadStep> random_thread(std::mt19937_64& rng, std::size_t max_moves);

// All @handle spans obtained by trying every start offset against every
// handle, then keeping the leftmost-longest non-overlapping ones.
std::vector<forum::Mention> reference_mentions(const std::string& text, const std::vector<std::string>& roster);

// Expected [n] numbering of placeholder keys in first-appearance order.
std::vector<int> renumbering_oracle(const std::vector<std::string>& keys_in_order);

// Active commitment counts and challenge resolutions recomputed from moves.
std::vector<std::string> commitment_oracle(const protocol::ThreadState& state);

// Kahn's algorithm over the refines relation; false on a cycle or dangling id.
bool oracle_is_dag(const std::vector<agent::MemorySnippet>& snippets);

// Node count, parent relation and edge-act multiset compared against moves.
std::vector<std::string> isomorphism_oracle(const mindmap::MindMapGraph& graph, const forum::Thread& thread);

}  // namespace agora::testing
