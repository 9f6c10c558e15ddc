#pragma once

#include "agora/knowledge/paper.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace agora::knowledge {

enum class EntityKind { Keyphrase, Acronym };

struct Entity {
    std::string entity_id;
    std::string label;
    EntityKind kind = EntityKind::Keyphrase;
    bool operator==(const Entity&) const = default;
};

/// One abstract sentence, traced to its source paper.
struct Snippet {
    std::string snippet_id;
    std::string text;
    std::string source_paper;  // paper key
    bool operator==(const Snippet&) const = default;
};

enum class EdgeKind { Mentions, CitationTrace };

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::Mentions;
    auto operator<=>(const GraphEdge&) const = default;
};

struct GraphDelta {
    std::vector<std::string> papers;
    std::vector<std::string> entities;
    std::vector<std::string> snippets;
    std::size_t edges = 0;

    bool empty() const { return papers.empty() && entities.empty() && snippets.empty() && edges == 0; }
};

struct SnippetHit {
    Snippet snippet;
    std::string trace;  // key of the paper the snippet came from
    std::size_t score = 0;
};

/// Papers, extracted entities and abstract snippets with citation-trace edges.
/// Shared per project; agents see their own literature through collections.
class KnowledgeGraph {
public:
    const PaperRecord* paper(const std::string& key) const;
    bool contains_paper(const std::string& key) const { return papers_.count(key) > 0; }
    /// A stored paper describing the same work: same DOI, else same normalized title.
    const PaperRecord* find_equivalent(const PaperRecord& paper) const;

    const std::map<std::string, PaperRecord>& papers() const { return papers_; }
    const std::map<std::string, Entity>& entities() const { return entities_; }
    const std::vector<Snippet>& snippets() const { return snippets_; }
    const std::set<GraphEdge>& edges() const { return edges_; }

    /// Idempotent: re-inserting a known paper yields an empty delta.
    GraphDelta insert(const PaperRecord& paper);

    /// Up to `k` snippets ranked by query keyword overlap with the snippet,
    /// its paper's title and linked entities. Ties keep insertion order.
    std::vector<SnippetHit> query(const std::string& query, std::size_t k) const;

    void add_to_collection(const std::string& agent_id, const std::string& paper_key);
    std::vector<std::string> collection(const std::string& agent_id) const;
    const std::map<std::string, std::set<std::string>>& collections() const { return collections_; }

    /// Dangling references and edge-typing problems; empty when consistent.
    std::vector<std::string> check_integrity() const;

    nlohmann::json snapshot() const;
    static KnowledgeGraph from_snapshot(const nlohmann::json& snapshot);

    bool operator==(const KnowledgeGraph&) const = default;

private:
    std::map<std::string, PaperRecord> papers_;
    std::map<std::string, Entity> entities_;
    std::vector<Snippet> snippets_;
    std::set<GraphEdge> edges_;
    std::map<std::string, std::set<std::string>> collections_;
};

GraphDelta insert_paper(KnowledgeGraph& graph, const PaperRecord& paper);
std::vector<SnippetHit> query_graph(const KnowledgeGraph& graph, const std::string& query, std::size_t k);

/// Keyword heuristics standing in for noun-phrase extraction.
std::vector<Entity> extract_entities(const PaperRecord& paper);

std::string_view to_string(EdgeKind kind);

}  // namespace agora::knowledge
