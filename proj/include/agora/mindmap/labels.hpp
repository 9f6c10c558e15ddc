#pragma once

#include "agora/agent/provider.hpp"
#include "agora/mindmap/graph.hpp"

#include <map>
#include <mutex>

namespace agora::mindmap {

inline constexpr std::size_t fallback_code_points = 60;
inline constexpr std::size_t keyword_max_words = 6;

/// First 60 code points of `body`, plus an ellipsis when cut.
std::string fallback_label(std::string_view body);

/// Clips and, where needed, shortens labels so that overview <= keyword <=
/// summary in code points.
NodeLabels enforce_monotone(NodeLabels labels);

/// Keyword and summary labels per move, cached by move id and body digest.
/// Labels produced by the fallback are not cached, so they are retried once
/// the provider is back. Safe to share across threads.
class Labeler {
public:
    explicit Labeler(agent::LanguageModelProvider* provider = nullptr) : provider_(provider) {}

    NodeLabels labels_for(const forum::Thread& thread, const protocol::DeliberationMove& move);

    std::size_t cache_size() const;
    std::size_t provider_calls() const;

private:
    struct Entry {
        std::string body_digest;
        std::string keyword;
        std::string summary;
    };

    agent::LanguageModelProvider* provider_;
    mutable std::mutex mutex_;
    std::map<protocol::MoveId, Entry> cache_;
    std::size_t calls_ = 0;
};

}  // namespace agora::mindmap
