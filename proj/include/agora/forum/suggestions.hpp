#pragma once

#include "agora/agent/provider.hpp"
#include "agora/forum/proposal.hpp"

#include <string>
#include <vector>

namespace agora::forum {

/// Draft thread title and description; nothing is persisted until confirmed.
struct ThreadSuggestion {
    std::string title;
    std::string description;
    bool operator==(const ThreadSuggestion&) const = default;
};

inline constexpr std::size_t max_suggestions = 5;

/// 1..5 drafts derived from the proposal. Throws ForumError when Motivation is
/// blank and agent::ProviderUnavailable when no usable suggestion comes back.
std::vector<ThreadSuggestion> suggest_threads(const ProposalDocument& proposal, agent::LanguageModelProvider& provider);

nlohmann::json to_json(const ThreadSuggestion& s);

}  // namespace agora::forum
