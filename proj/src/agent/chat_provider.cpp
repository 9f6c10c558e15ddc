#include "agora/agent/provider.hpp"

namespace agora::agent {

namespace {

std::string instruction_for(RequestKind kind) {
    switch (kind) {
    case RequestKind::Plan:
        return "You are the research persona described in the context, taking part in a threaded deliberation. "
               "Plan your next reply. Choose intended_act from allowed_acts (or use forced_act when present). "
               "Decide whether to respond directly or use one tool (graph_query, paper_search, add_paper). Reply as "
               "JSON: {\"mode\":\"respond_directly\"|\"use_tool\",\"intended_act\":...,\"tool\":...,\"query\":...,"
               "\"draft_points\":[...]}";
    case RequestKind::Reflect:
        return "Revise the plan in the context given the tool outcome. If the outcome was empty, pivot to a "
               "different query, tool or act. Reply with the same JSON shape as a plan.";
    case RequestKind::Compose:
        return "Write the final reply for the plan in the context, in the persona's voice, performing "
               "intended_act. Cite evidence only from the provided evidence list using placeholders of the form "
               "[@paper_key]. Reply as JSON: {\"body\":...,\"rationale\": one short paragraph explaining why you "
               "chose this act}.";
    case RequestKind::Distill:
        return "Distill the recent discussion window into at most max_snippets research-idea snippets, each about "
               "a single hypothesis, question, rationale_shift or methodological_consideration. A snippet may list "
               "ids of existing snippets it refines. Reply as JSON: {\"snippets\":[{\"kind\",\"text\",\"refines\"}]}";
    case RequestKind::SuggestThreads:
        return "Suggest between one and five discussion threads for the research proposal in the context. Reply "
               "as JSON: {\"suggestions\":[{\"title\",\"description\"}]}";
    case RequestKind::Label:
        return "Label the post in the context for a mind map: a keyword phrase of at most six words and a summary "
               "of one or two sentences. Reply as JSON: {\"keyword\":...,\"summary\":...}";
    }
    return {};
}

}  // namespace

ChatCompletionsProvider::ChatCompletionsProvider(std::shared_ptr<net::HttpTransport> transport,
                                                 ChatProviderOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {}

nlohmann::json ChatCompletionsProvider::build_body(const ProviderRequest& request) const {
    return {{"model", options_.model},
            {"temperature", 0.7},
            {"response_format", {{"type", "json_object"}}},
            {"messages",
             {{{"role", "system"}, {"content", instruction_for(request.kind)}},
              {{"role", "user"}, {"content", request.context.dump()}}}}};
}

nlohmann::json ChatCompletionsProvider::complete(const ProviderRequest& request) {
    net::HttpRequest http;
    http.method = "POST";
    http.path = options_.path;
    http.body = build_body(request).dump();
    if (!options_.api_key.empty()) http.headers["Authorization"] = "Bearer " + options_.api_key;

    net::HttpResponse resp;
    try {
        resp = transport_->send(http);
    } catch (const net::TransportError& e) {
        throw ProviderUnavailable(e.what());
    }
    if (resp.status != 200) throw ProviderUnavailable("chat provider returned HTTP " + std::to_string(resp.status));
    try {
        const auto body = nlohmann::json::parse(resp.body);
        const auto content = body.at("choices").at(0).at("message").at("content").get<std::string>();
        auto reply = nlohmann::json::parse(content);
        if (!reply.is_object()) throw ProviderUnavailable("chat provider reply is not a JSON object");
        return reply;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderUnavailable(std::string("chat provider reply unusable: ") + e.what());
    }
}

}  // namespace agora::agent
