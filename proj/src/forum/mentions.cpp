#include "agora/forum/mentions.hpp"

#include <algorithm>
#include <cctype>

namespace agora::forum {

namespace {

bool word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || u >= 0x80;
}

bool handle_char_matches(char text_c, char handle_c) {
    if (handle_c == '_') return text_c == '_' || text_c == ' ';
    return std::tolower(static_cast<unsigned char>(text_c)) == std::tolower(static_cast<unsigned char>(handle_c));
}

// Length of the longest handle matching right after '@' at `at`, or 0.
std::size_t match_at(std::string_view text, std::size_t at, const std::string& handle) {
    const std::size_t start = at + 1;
    if (handle.empty() || start + handle.size() > text.size()) return 0;
    for (std::size_t i = 0; i < handle.size(); ++i) {
        if (!handle_char_matches(text[start + i], handle[i])) return 0;
    }
    const std::size_t end = start + handle.size();
    if (end < text.size() && word_byte(text[end])) return 0;
    return handle.size();
}

}  // namespace

ParsedReply parse_mentions(std::string_view text, std::span<const std::string> roster) {
    ParsedReply out{std::string(text), {}};
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '@' || (i > 0 && word_byte(text[i - 1]))) {
            ++i;
            continue;
        }
        const std::string* best = nullptr;
        for (const auto& handle : roster) {
            const std::size_t n = match_at(text, i, handle);
            if (n > 0 && (!best || n > best->size())) best = &handle;
        }
        if (!best) {
            ++i;
            continue;
        }
        const std::size_t end = i + 1 + best->size();
        std::copy(best->begin(), best->end(), out.cleaned.begin() + static_cast<std::ptrdiff_t>(i + 1));
        const bool seen = std::any_of(out.mentions.begin(), out.mentions.end(),
                                      [&](const Mention& m) { return m.agent_id == *best; });
        if (!seen) out.mentions.push_back({*best, i, end});
        i = end;
    }
    return out;
}

Routing resolve_responders(const protocol::DeliberationMove& parent, std::span<const Mention> mentions,
                           std::span<const std::string> roster, std::size_t cap) {
    const auto in_roster = [&](const std::string& id) { return std::find(roster.begin(), roster.end(), id) != roster.end(); };
    Routing r;
    if (!mentions.empty()) {
        for (const auto& m : mentions) {
            if (!in_roster(m.agent_id)) throw UnknownAgent(m.agent_id);
            if (std::find(r.responders.begin(), r.responders.end(), m.agent_id) != r.responders.end()) continue;
            if (r.responders.size() < cap) r.responders.push_back(m.agent_id);
        }
        return r;
    }
    if (parent.author.is_agent()) {
        if (!in_roster(parent.author.id)) throw UnknownAgent(parent.author.id);
        r.responders.push_back(parent.author.id);
        r.by_default = true;
        return r;
    }
    r.needs_mention = true;
    return r;
}

std::string notify_line(const Routing& routing) {
    if (routing.needs_mention) return "Mention an agent with @ to get a response";
    std::string line = "Will notify: ";
    for (std::size_t i = 0; i < routing.responders.size(); ++i) line += (i ? ", @" : "@") + routing.responders[i];
    if (routing.by_default) line += " (default)";
    return line;
}

}  // namespace agora::forum
