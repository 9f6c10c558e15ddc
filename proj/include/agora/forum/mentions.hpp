#pragma once

#include "agora/protocol/move.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::forum {

/// `begin`/`end` are byte offsets of "@handle" in the raw text. Cleaning only
/// rewrites case and spaces inside handles, so spans hold for both texts.
struct Mention {
    std::string agent_id;
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const Mention&) const = default;
};

struct ParsedReply {
    std::string cleaned;  // matched handles rewritten to their canonical form
    std::vector<Mention> mentions;
};

/// Handles match case-insensitively, with a space standing in for '_'. The
/// longest roster handle wins and both ends need a word boundary. Mentions
/// come in textual order, one per agent (first span kept).
ParsedReply parse_mentions(std::string_view text, std::span<const std::string> roster);

class UnknownAgent : public std::runtime_error {
public:
    explicit UnknownAgent(const std::string& id) : std::runtime_error("agent " + id + " is not in the roster"), id_(id) {}
    const std::string& agent_id() const noexcept { return id_; }

private:
    std::string id_;
};

struct Routing {
    std::vector<std::string> responders;
    bool by_default = false;      // no mentions: the parent's agent author answers
    bool needs_mention = false;   // no mentions on a human post: nobody is notified
};

inline constexpr std::size_t default_responder_cap = 8;

/// Mentioned agents in mention order (capped), else the parent's agent author,
/// else nobody. Throws UnknownAgent if a mentioned agent left the roster.
Routing resolve_responders(const protocol::DeliberationMove& parent, std::span<const Mention> mentions,
                           std::span<const std::string> roster, std::size_t cap = default_responder_cap);

/// "Will notify: @A, @B" / "Will notify: @A (default)" / prompt to mention.
std::string notify_line(const Routing& routing);

}  // namespace agora::forum
