#pragma once

#include "agora/agent/runtime.hpp"
#include "agora/forum/project.hpp"

#include <optional>
#include <string>

namespace agora::forum {

enum class Stance { Agree, Disagree, Question };

std::string_view to_string(Stance stance);
std::optional<Stance> parse_stance(std::string_view name);
/// agree -> SUPPORT, disagree -> REBUT, question -> QUESTION.
protocol::Act act_for(Stance stance);

struct WhatIfRequest {
    protocol::MoveId target_move;
    std::string agent_id;
    Stance stance = Stance::Agree;
    bool operator==(const WhatIfRequest&) const = default;
};

/// An unposted agent move. Papers the turn retrieved are kept here and only
/// enter the shared graph if the draft is posted.
struct PreviewDraft {
    WhatIfRequest request;
    std::string thread_id;
    protocol::DeliberationMove move;  // no id or timestamp yet
    std::vector<knowledge::PaperRecord> papers;
};

struct PreviewInputs {
    const agent::AgentPersona* persona = nullptr;
    const agent::MemoryStore* memory = nullptr;
    const knowledge::KnowledgeGraph* graph = nullptr;
    std::span<knowledge::ScholarClient* const> scholars;
    agent::RuntimeSettings settings;
};

/// Runs a turn with the stance-mapped act forced, against a private copy of
/// the graph. Legality is not checked here; posting the draft does that.
/// Throws UnknownMove, UnknownAgent or agent::ProviderUnavailable.
PreviewDraft what_if_preview(const Project& project, const WhatIfRequest& request, const PreviewInputs& inputs,
                             agent::LanguageModelProvider& provider);

/// One panel's current draft. Generating a new preview replaces the old one.
class WhatIfPanel {
public:
    const std::optional<PreviewDraft>& draft() const { return draft_; }
    const PreviewDraft& show(PreviewDraft draft) { return *(draft_ = std::move(draft)); }
    void discard() { draft_.reset(); }
    /// Hands the draft over for posting and clears the panel.
    std::optional<PreviewDraft> take() { return std::exchange(draft_, std::nullopt); }

private:
    std::optional<PreviewDraft> draft_;
};

nlohmann::json to_json(const PreviewDraft& draft);

}  // namespace agora::forum
