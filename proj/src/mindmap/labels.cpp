#include "agora/mindmap/labels.hpp"

#include "agora/common/digest.hpp"
#include "agora/common/text.hpp"

#include <spdlog/spdlog.h>

namespace agora::mindmap {

namespace {

std::string first_sentences(std::string_view body, std::size_t n) {
    const auto sentences = text::split_sentences(body);
    std::vector<std::string> kept(sentences.begin(), sentences.begin() + static_cast<std::ptrdiff_t>(std::min(n, sentences.size())));
    return text::join(kept, " ");
}

}  // namespace

std::string fallback_label(std::string_view body) {
    std::string out = text::utf8_prefix(body, fallback_code_points);
    if (out.size() < body.size()) out += "…";
    return out;
}

NodeLabels enforce_monotone(NodeLabels l) {
    using text::utf8_length;
    l.summary = text::trim(l.summary);
    if (l.summary.empty()) l.summary = text::trim(l.keyword);
    if (l.summary.empty()) l.summary = "(empty)";
    l.keyword = text::clip_words(text::trim(l.keyword), keyword_max_words);
    if (l.keyword.empty() || utf8_length(l.keyword) > utf8_length(l.summary)) {
        l.keyword = text::clip_words(l.summary, keyword_max_words);
    }
    if (utf8_length(l.overview) > utf8_length(l.keyword)) {
        // Roots: let the keyword view show the title when it fits.
        const auto title = text::clip_words(l.overview, keyword_max_words);
        if (utf8_length(title) <= utf8_length(l.summary) && utf8_length(title) > utf8_length(l.keyword)) l.keyword = title;
        if (utf8_length(l.overview) > utf8_length(l.keyword)) l.overview = text::utf8_prefix(l.overview, utf8_length(l.keyword));
    }
    return l;
}

NodeLabels Labeler::labels_for(const forum::Thread& thread, const protocol::DeliberationMove& move) {
    NodeLabels labels;
    if (move.is_root()) labels.overview = thread.title;
    const std::string digest = sha256_hex(labels.overview + "\n" + move.body);

    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(move.move_id); it != cache_.end() && it->second.body_digest == digest) {
        labels.keyword = it->second.keyword;
        labels.summary = it->second.summary;
        return enforce_monotone(labels);
    }

    if (provider_) {
        try {
            ++calls_;
            nlohmann::json ctx{{"body", move.body},
                               {"act", move.act ? nlohmann::json(std::string(protocol::to_string(*move.act))) : nlohmann::json()}};
            if (move.is_root()) ctx["title"] = thread.title;
            const auto reply = provider_->complete({agent::RequestKind::Label, {}, ctx});
            Entry e{digest, reply.value("keyword", std::string{}), first_sentences(reply.value("summary", std::string{}), 2)};
            if (!text::trim(e.summary).empty()) {
                cache_[move.move_id] = e;
                labels.keyword = e.keyword;
                labels.summary = e.summary;
                return enforce_monotone(labels);
            }
        } catch (const agent::ProviderUnavailable& ex) {
            spdlog::warn("label provider unavailable for {}: {}", move.move_id, ex.what());
        } catch (const nlohmann::json::exception& ex) {
            spdlog::warn("label provider returned malformed labels for {}: {}", move.move_id, ex.what());
        }
    }
    labels.summary = fallback_label(first_sentences(move.body, 2));
    labels.keyword = text::clip_words(labels.summary, keyword_max_words);
    return enforce_monotone(labels);
}

std::size_t Labeler::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

std::size_t Labeler::provider_calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

}  // namespace agora::mindmap
