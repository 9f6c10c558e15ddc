#pragma once

#include <array>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace agora::protocol {

/// The five deliberation acts. No other act is representable.
enum class Act { Issue, Claim, Support, Rebut, Question };

inline constexpr std::array<Act, 5> all_acts{Act::Issue, Act::Claim, Act::Support, Act::Rebut, Act::Question};

std::string_view to_string(Act act);
std::optional<Act> parse_act(std::string_view name);

/// What a move can attach to: the thread root position, an act-labelled
/// parent, or a human free-text parent (which carries no act).
enum class ParentKind { Root, Issue, Claim, Support, Rebut, Question, FreeText };

inline constexpr std::array<ParentKind, 7> all_parent_kinds{
    ParentKind::Root,  ParentKind::Issue,    ParentKind::Claim,   ParentKind::Support,
    ParentKind::Rebut, ParentKind::Question, ParentKind::FreeText};

std::string_view to_string(ParentKind kind);
ParentKind parent_kind_of(Act act);

/// Parent kinds an agent move carrying `act` may attach to.
///
///   ISSUE    -> root
///   CLAIM    -> ISSUE, QUESTION, free text
///   SUPPORT  -> CLAIM, SUPPORT, REBUT, QUESTION, free text
///   REBUT    -> CLAIM, SUPPORT
///   QUESTION -> CLAIM, SUPPORT, REBUT
std::set<ParentKind> legal_target_kinds(Act act);

bool is_legal_attachment(Act act, ParentKind parent);

/// Acts an agent may use when replying to `parent`, in declaration order.
std::vector<Act> acts_attachable_to(ParentKind parent);

}  // namespace agora::protocol
