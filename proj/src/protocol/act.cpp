#include "agora/protocol/act.hpp"

#include <vector>

namespace agora::protocol {

std::string_view to_string(Act act) {
    switch (act) {
    case Act::Issue: return "ISSUE";
    case Act::Claim: return "CLAIM";
    case Act::Support: return "SUPPORT";
    case Act::Rebut: return "REBUT";
    case Act::Question: return "QUESTION";
    }
    return "?";
}

std::optional<Act> parse_act(std::string_view name) {
    for (Act a : all_acts) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

std::string_view to_string(ParentKind kind) {
    switch (kind) {
    case ParentKind::Root: return "ROOT";
    case ParentKind::Issue: return "ISSUE";
    case ParentKind::Claim: return "CLAIM";
    case ParentKind::Support: return "SUPPORT";
    case ParentKind::Rebut: return "REBUT";
    case ParentKind::Question: return "QUESTION";
    case ParentKind::FreeText: return "FREE_TEXT";
    }
    return "?";
}

ParentKind parent_kind_of(Act act) {
    switch (act) {
    case Act::Issue: return ParentKind::Issue;
    case Act::Claim: return ParentKind::Claim;
    case Act::Support: return ParentKind::Support;
    case Act::Rebut: return ParentKind::Rebut;
    case Act::Question: return ParentKind::Question;
    }
    return ParentKind::FreeText;
}

std::set<ParentKind> legal_target_kinds(Act act) {
    using P = ParentKind;
    switch (act) {
    case Act::Issue: return {P::Root};
    case Act::Claim: return {P::Issue, P::Question, P::FreeText};
    case Act::Support: return {P::Claim, P::Support, P::Rebut, P::Question, P::FreeText};
    case Act::Rebut: return {P::Claim, P::Support};
    case Act::Question: return {P::Claim, P::Support, P::Rebut};
    }
    return {};
}

bool is_legal_attachment(Act act, ParentKind parent) { return legal_target_kinds(act).count(parent) > 0; }

std::vector<Act> acts_attachable_to(ParentKind parent) {
    std::vector<Act> out;
    for (Act a : all_acts) {
        if (is_legal_attachment(a, parent)) out.push_back(a);
    }
    return out;
}

}  // namespace agora::protocol
