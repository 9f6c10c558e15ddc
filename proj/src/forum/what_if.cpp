#include "agora/forum/what_if.hpp"

#include "agora/forum/mentions.hpp"

namespace agora::forum {

std::string_view to_string(Stance stance) {
    switch (stance) {
    case Stance::Agree: return "agree";
    case Stance::Disagree: return "disagree";
    case Stance::Question: return "question";
    }
    return "?";
}

std::optional<Stance> parse_stance(std::string_view name) {
    for (auto s : {Stance::Agree, Stance::Disagree, Stance::Question}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

protocol::Act act_for(Stance stance) {
    switch (stance) {
    case Stance::Agree: return protocol::Act::Support;
    case Stance::Disagree: return protocol::Act::Rebut;
    case Stance::Question: return protocol::Act::Question;
    }
    return protocol::Act::Support;
}

PreviewDraft what_if_preview(const Project& project, const WhatIfRequest& request, const PreviewInputs& inputs,
                             agent::LanguageModelProvider& provider) {
    const Thread* thread = project.thread_of(request.target_move);
    if (!thread) throw UnknownMove(request.target_move);
    if (!project.in_roster(request.agent_id) || !inputs.persona) throw UnknownAgent(request.agent_id);

    knowledge::KnowledgeGraph scratch = inputs.graph ? *inputs.graph : knowledge::KnowledgeGraph{};
    agent::ToolEnvironment env;
    env.graph = &scratch;
    env.scholars = inputs.scholars;
    env.agent_id = request.agent_id;
    const agent::MemoryStore empty_memory(request.agent_id);

    auto outcome = agent::run_turn(*inputs.persona, {&thread->state, request.target_move},
                                   inputs.memory ? *inputs.memory : empty_memory, env, provider, inputs.settings,
                                   act_for(request.stance));
    return {request, thread->thread_id, std::move(outcome.move), std::move(outcome.new_papers)};
}

nlohmann::json to_json(const PreviewDraft& draft) {
    auto papers = nlohmann::json::array();
    for (const auto& p : draft.papers) papers.push_back(p.key());
    return {{"target_move", draft.request.target_move},
            {"agent_id", draft.request.agent_id},
            {"stance", to_string(draft.request.stance)},
            {"thread_id", draft.thread_id},
            {"move", draft.move},
            {"papers", papers}};
}

}  // namespace agora::forum
