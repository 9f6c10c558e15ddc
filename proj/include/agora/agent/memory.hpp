#pragma once

#include "agora/protocol/move.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::agent {

enum class SnippetKind { Hypothesis, Question, RationaleShift, MethodologicalConsideration };

std::string_view to_string(SnippetKind kind);
std::optional<SnippetKind> parse_snippet_kind(std::string_view name);

struct MoveRange {
    protocol::MoveId first;
    protocol::MoveId last;
    bool operator==(const MoveRange&) const = default;
};

/// A distilled single-focus research idea. `refines` links form a DAG over
/// earlier snippets of the same agent.
struct MemorySnippet {
    std::string snippet_id;
    std::string agent_id;
    SnippetKind kind = SnippetKind::Hypothesis;
    std::string text;
    std::vector<std::string> refines;
    std::uint64_t created_at = 0;
    MoveRange source_window;

    bool operator==(const MemorySnippet&) const = default;
};

void to_json(nlohmann::json& j, const MemorySnippet& s);
void from_json(const nlohmann::json& j, MemorySnippet& s);

class LineageViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-agent append-only snippet store.
class MemoryStore {
public:
    MemoryStore() = default;
    explicit MemoryStore(std::string agent_id) : agent_id_(std::move(agent_id)) {}

    const std::string& agent_id() const { return agent_id_; }
    std::span<const MemorySnippet> snippets() const { return snippets_; }
    const MemorySnippet* find(const std::string& snippet_id) const;
    bool empty() const { return snippets_.empty(); }

    std::uint64_t next_created_at() const;
    std::string next_snippet_id() const;

    /// Throws LineageViolation unless the snippet belongs to this agent, is
    /// newer than every stored snippet and refines only stored snippets.
    void append(MemorySnippet snippet);

    bool operator==(const MemoryStore&) const = default;

private:
    std::string agent_id_;
    std::vector<MemorySnippet> snippets_;
};

struct LineageNode {
    std::string snippet_id;
    std::vector<LineageNode> children;
    std::vector<std::string> cross_links;  // refines entries beyond the primary parent
};

struct MemoryViews {
    std::vector<MemorySnippet> stream;  // ascending created_at
    std::vector<LineageNode> lineage;   // roots: snippets refining nothing
};

/// Chronological stream plus lineage forest. A snippet sits under its first
/// `refines` entry; further parents are listed as cross-links, so every
/// snippet appears exactly once in each view.
MemoryViews memory_views(const MemoryStore& store);

/// Snippet ids reachable in a lineage forest (pre-order).
std::vector<std::string> forest_ids(const std::vector<LineageNode>& forest);

/// The `k` most recent snippets plus all their lineage ancestors, in
/// chronological order.
std::vector<MemorySnippet> conditioning_memories(const MemoryStore& store, std::size_t k);

/// Independent of MemoryStore::append: true when the refines relation over
/// `snippets` has no cycle and no dangling reference.
bool lineage_is_dag(std::span<const MemorySnippet> snippets);

}  // namespace agora::agent
