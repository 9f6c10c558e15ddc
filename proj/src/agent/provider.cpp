#include "agora/agent/provider.hpp"

#include "agora/common/digest.hpp"

namespace agora::agent {

std::string_view to_string(RequestKind kind) {
    switch (kind) {
    case RequestKind::Plan: return "plan";
    case RequestKind::Reflect: return "reflect";
    case RequestKind::Compose: return "compose";
    case RequestKind::Distill: return "distill";
    case RequestKind::SuggestThreads: return "suggest_threads";
    case RequestKind::Label: return "label";
    }
    return "?";
}

std::string ProviderRequest::context_digest() const { return sha256_hex(context.dump()); }

}  // namespace agora::agent
