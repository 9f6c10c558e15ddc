#pragma once

#include "agora/forum/project.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agora::mindmap {

class Labeler;

enum class ZoomLevel { Overview, Keyword, Summary };

std::string_view to_string(ZoomLevel zoom);
std::optional<ZoomLevel> parse_zoom(std::string_view name);

/// Edge label for human free-text replies; distinct from the five acts.
inline constexpr std::string_view reply_marker = "REPLY";
/// Edge label for the optional branch-provenance class.
inline constexpr std::string_view branch_marker = "BRANCH";

enum class EdgeClass { Reply, Provenance };

std::string_view to_string(EdgeClass cls);
std::optional<EdgeClass> parse_edge_class(std::string_view name);

/// Where a node came from. The root node stands for its thread (no move id).
struct NodeSource {
    std::string thread_id;
    std::optional<protocol::MoveId> move_id;
    bool operator==(const NodeSource&) const = default;
};

struct NodeLabels {
    std::string overview;  // thread title on roots, empty on collapsed move nodes
    std::string keyword;   // at most 6 words
    std::string summary;   // 1-2 sentences
    bool operator==(const NodeLabels&) const = default;
};

struct MindMapNode {
    std::string node_id;  // the move id
    NodeSource source;
    NodeLabels labels;
    bool operator==(const MindMapNode&) const = default;
};

struct MindMapEdge {
    std::string from;  // replying move
    std::string to;    // its target (or, for provenance, the branch source)
    std::string act;   // act name, REPLY or BRANCH
    std::string rationale;
    EdgeClass cls = EdgeClass::Reply;
    bool operator==(const MindMapEdge&) const = default;
};

struct MindMapGraph {
    std::vector<MindMapNode> nodes;
    std::vector<MindMapEdge> edges;

    const MindMapNode* node(const std::string& node_id) const;
    bool operator==(const MindMapGraph&) const = default;
};

struct BuildOptions {
    bool include_provenance = false;
};

/// One node per move, one reply edge per non-root move. Deterministic for a
/// given forum state (labels come from the cache-backed labeler).
MindMapGraph build_graph(const forum::Project& project, Labeler& labeler, const BuildOptions& options = {});
MindMapGraph build_thread_graph(const forum::Thread& thread, Labeler& labeler);

/// Nodes of one thread and the reply edges among them.
MindMapGraph restrict_to_thread(const MindMapGraph& graph, const std::string& thread_id);

/// Throws std::out_of_range for an unknown node.
NodeSource source_of(const MindMapGraph& graph, const std::string& node_id);
std::string label_at(const MindMapNode& node, ZoomLevel zoom);
/// The posting agent's stored rationale; empty for human replies.
std::string rationale_of(const MindMapEdge& edge);

/// Node count, parent relation and edge acts checked against the reply tree.
std::vector<std::string> check_isomorphic(const MindMapGraph& graph, const forum::Thread& thread);
/// overview <= keyword <= summary in code points, keyword <= 6 words,
/// summary non-empty with at most 2 sentences.
std::vector<std::string> check_labels(const MindMapNode& node);
/// Every node and edge of `smaller` appears in `larger` (labels ignored).
bool is_subgraph(const MindMapGraph& smaller, const MindMapGraph& larger);

}  // namespace agora::mindmap
