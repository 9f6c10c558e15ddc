#include "agora/protocol/invariants.hpp"

#include <map>

namespace agora::protocol {

std::vector<std::string> check_thread_invariants(const ThreadState& state) {
    std::vector<std::string> problems;
    const auto moves = state.moves();

    if (!moves.empty() && moves.front().author.is_agent() && moves.front().act != Act::Issue) {
        problems.push_back("agent-authored root " + moves.front().move_id + " is not ISSUE");
    }

    // Legality soundness: replay each move against the prefix before it,
    // interleaving administrative status changes at their recorded positions.
    ThreadState prefix(state.thread_id());
    const auto& log = state.status_log();
    std::size_t next_status = 0;
    const auto replay_status = [&](std::size_t applied) {
        while (next_status < log.size() && log[next_status].after_moves == applied) {
            const auto& s = log[next_status++];
            try {
                prefix.set_commitment_status(s.owner, s.source_move, s.status);
            } catch (const ProtocolError& e) {
                problems.push_back("status change replay failed: " + std::string(e.what()));
            }
        }
    };
    replay_status(0);
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (auto v = validate_move(prefix, moves[i])) {
            problems.push_back("move " + moves[i].move_id + " illegal against its prefix: " +
                               std::string(to_string(v->kind)) + " " + v->detail);
            break;
        }
        prefix.apply(moves[i]);
        replay_status(i + 1);
    }

    // Commitment conservation.
    std::map<std::string, std::size_t> committing;
    for (const auto& m : moves) {
        if (m.act == Act::Claim || m.act == Act::Rebut) ++committing[m.author.id];
    }
    std::map<std::string, std::size_t> withdrawn;
    for (const auto& s : log) ++withdrawn[s.owner];
    for (const auto& [owner, store] : state.stores()) {
        const std::size_t expected = committing[owner] - std::min(committing[owner], withdrawn[owner]);
        if (store.active_count() != expected) {
            problems.push_back("commitment conservation broken for " + owner);
        }
        for (const auto& c : store.commitments) {
            const DeliberationMove* src = state.find(c.source_move);
            if (!src || src->author.id != owner || !(src->act == Act::Claim || src->act == Act::Rebut)) {
                problems.push_back("commitment " + c.source_move + " of " + owner + " has no CLAIM/REBUT source");
            }
        }
    }
    for (const auto& [owner, n] : committing) {
        if (n > 0 && !state.stores().count(owner)) problems.push_back("missing commitment store for " + owner);
    }

    // Challenge well-formedness.
    for (const auto& ch : state.challenges()) {
        const DeliberationMove* challenge = state.find(ch.challenge_move);
        if (!challenge || !(challenge->act == Act::Question || challenge->act == Act::Rebut)) {
            problems.push_back("challenge " + ch.challenge_move + " is not a QUESTION/REBUT");
            continue;
        }
        if (!ch.resolved_by) continue;
        const DeliberationMove* answer = state.find(*ch.resolved_by);
        if (!answer || answer->act != Act::Support || answer->author.id != ch.burden_holder ||
            !answers_challenge(state, *answer, ch)) {
            problems.push_back("challenge " + ch.challenge_move + " resolved by a move that is not the burden holder's SUPPORT");
        }
    }
    return problems;
}

}  // namespace agora::protocol
