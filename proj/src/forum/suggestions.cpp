#include "agora/forum/suggestions.hpp"

#include "agora/common/digest.hpp"
#include "agora/common/text.hpp"
#include "agora/forum/project.hpp"

namespace agora::forum {

std::vector<ThreadSuggestion> suggest_threads(const ProposalDocument& proposal, agent::LanguageModelProvider& provider) {
    if (text::trim(proposal.text(Section::Motivation)).empty()) {
        throw ForumError("thread suggestions need a non-empty Motivation section");
    }
    const auto sections = sections_to_json(proposal.sections());
    const auto reply = provider.complete(
        {agent::RequestKind::SuggestThreads, {}, {{"proposal", sections}, {"proposal_digest", sha256_hex(sections.dump())}}});

    std::vector<ThreadSuggestion> out;
    if (reply.contains("suggestions") && reply["suggestions"].is_array()) {
        for (const auto& s : reply["suggestions"]) {
            if (out.size() == max_suggestions) break;
            auto title = text::trim(s.value("title", std::string{}));
            if (title.empty()) continue;
            out.push_back({title, text::trim(s.value("description", std::string{}))});
        }
    }
    if (out.empty()) throw agent::ProviderUnavailable("provider returned no thread suggestions");
    return out;
}

nlohmann::json to_json(const ThreadSuggestion& s) { return {{"title", s.title}, {"description", s.description}}; }

}  // namespace agora::forum
