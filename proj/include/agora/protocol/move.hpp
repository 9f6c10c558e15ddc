#pragma once

#include "agora/protocol/act.hpp"

#include <nlohmann/json.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agora::protocol {

using MoveId = std::string;

enum class ParticipantKind { Agent, Human };

struct Participant {
    std::string id;
    ParticipantKind kind = ParticipantKind::Human;

    bool is_agent() const { return kind == ParticipantKind::Agent; }
    auto operator<=>(const Participant&) const = default;

    static Participant agent(std::string id) { return {std::move(id), ParticipantKind::Agent}; }
    static Participant human(std::string id) { return {std::move(id), ParticipantKind::Human}; }
};

/// One contribution to a thread. Human free-text replies carry no act.
struct DeliberationMove {
    MoveId move_id;
    Participant author;
    std::optional<Act> act;
    std::optional<MoveId> target;  // none for the thread root
    std::string body;
    std::string rationale;
    std::vector<std::string> citations;  // paper keys, index i <-> marker [i+1]
    std::optional<std::string> tool_summary;
    std::uint64_t timestamp = 0;  // monotone within the thread

    bool is_root() const { return !target.has_value(); }
    bool operator==(const DeliberationMove&) const = default;
};

/// Parent kind a reply to `parent` attaches to (FreeText for human moves).
ParentKind parent_kind_of(const DeliberationMove& parent);

void to_json(nlohmann::json& j, const Participant& p);
void from_json(const nlohmann::json& j, Participant& p);
void to_json(nlohmann::json& j, const DeliberationMove& m);
void from_json(const nlohmann::json& j, DeliberationMove& m);

}  // namespace agora::protocol
