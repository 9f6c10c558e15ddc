#pragma once

#include "agora/protocol/thread_state.hpp"

#include <string>
#include <vector>

namespace agora::protocol {

/// Full-replay audit of a thread: legality soundness of every stored move
/// against its prefix, commitment conservation, challenge well-formedness
/// and the agent-root-is-ISSUE rule. Returns one message per violation.
std::vector<std::string> check_thread_invariants(const ThreadState& state);

}  // namespace agora::protocol
