#pragma once

#include "agora/common/http_client.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <stdexcept>
#include <string>

namespace agora::agent {

/// What the caller wants back. Each kind has a fixed JSON reply shape:
///
///   plan            {"mode","intended_act","tool"?,"query"?,"draft_points":[...]}
///   reflect         same shape as plan
///   compose         {"body","rationale"}  body may cite with "[@paper key]"
///   distill         {"snippets":[{"kind","text","refines":[...]}]}
///   suggest_threads {"suggestions":[{"title","description"}]}
///   label           {"keyword","summary"}
enum class RequestKind { Plan, Reflect, Compose, Distill, SuggestThreads, Label };

std::string_view to_string(RequestKind kind);

struct ProviderRequest {
    RequestKind kind = RequestKind::Plan;
    std::string persona_digest;  // empty for persona-free requests
    nlohmann::json context;

    std::string context_digest() const;
};

struct ProviderDescriptor {
    std::string name;
    bool deterministic = false;
};

class ProviderUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LanguageModelProvider {
public:
    virtual ~LanguageModelProvider() = default;
    virtual ProviderDescriptor descriptor() const = 0;
    /// Throws ProviderUnavailable when no usable reply can be produced.
    virtual nlohmann::json complete(const ProviderRequest& request) = 0;
};

/// Deterministic offline provider: identical (persona digest, context digest,
/// request kind) always yields identical output.
class MockProvider final : public LanguageModelProvider {
public:
    ProviderDescriptor descriptor() const override { return {"mock", true}; }
    nlohmann::json complete(const ProviderRequest& request) override;
};

struct ChatProviderOptions {
    std::string model = "gpt-4o-mini";
    std::string api_key;
    std::string path = "/v1/chat/completions";
};

/// OpenAI-compatible chat-completions backend. Each request kind becomes a
/// system instruction naming the reply shape; the context is the user turn.
class ChatCompletionsProvider final : public LanguageModelProvider {
public:
    ChatCompletionsProvider(std::shared_ptr<net::HttpTransport> transport, ChatProviderOptions options);
    ProviderDescriptor descriptor() const override { return {"chat:" + options_.model, false}; }
    nlohmann::json complete(const ProviderRequest& request) override;

    /// Request body sent for `request`; exposed for inspection.
    nlohmann::json build_body(const ProviderRequest& request) const;

private:
    std::shared_ptr<net::HttpTransport> transport_;
    ChatProviderOptions options_;
};

}  // namespace agora::agent
