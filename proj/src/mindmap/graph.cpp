#include "agora/mindmap/graph.hpp"

#include "agora/common/text.hpp"
#include "agora/mindmap/labels.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace agora::mindmap {

std::string_view to_string(ZoomLevel zoom) {
    switch (zoom) {
    case ZoomLevel::Overview: return "overview";
    case ZoomLevel::Keyword: return "keyword";
    case ZoomLevel::Summary: return "summary";
    }
    return "?";
}

std::optional<ZoomLevel> parse_zoom(std::string_view name) {
    for (auto z : {ZoomLevel::Overview, ZoomLevel::Keyword, ZoomLevel::Summary}) {
        if (to_string(z) == name) return z;
    }
    return std::nullopt;
}

std::string_view to_string(EdgeClass cls) { return cls == EdgeClass::Reply ? "reply" : "provenance"; }

std::optional<EdgeClass> parse_edge_class(std::string_view name) {
    if (name == "reply") return EdgeClass::Reply;
    if (name == "provenance") return EdgeClass::Provenance;
    return std::nullopt;
}

const MindMapNode* MindMapGraph::node(const std::string& node_id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const MindMapNode& n) { return n.node_id == node_id; });
    return it == nodes.end() ? nullptr : &*it;
}

namespace {

std::string edge_act(const protocol::DeliberationMove& m) {
    return m.act ? std::string(protocol::to_string(*m.act)) : std::string(reply_marker);
}

void append_thread(MindMapGraph& graph, const forum::Thread& thread, Labeler& labeler) {
    for (const auto& m : thread.state.moves()) {
        MindMapNode node{m.move_id, {thread.thread_id, std::nullopt}, labeler.labels_for(thread, m)};
        if (!m.is_root()) node.source.move_id = m.move_id;
        graph.nodes.push_back(std::move(node));
        if (m.target) {
            graph.edges.push_back(
                {m.move_id, *m.target, edge_act(m), m.author.is_agent() ? m.rationale : std::string{}, EdgeClass::Reply});
        }
    }
}

}  // namespace

MindMapGraph build_graph(const forum::Project& project, Labeler& labeler, const BuildOptions& options) {
    MindMapGraph graph;
    for (const auto& t : project.threads) append_thread(graph, t, labeler);
    if (options.include_provenance) {
        for (const auto& t : project.threads) {
            if (!t.provenance || !t.state.root()) continue;
            graph.edges.push_back({t.state.root()->move_id, t.provenance->source_move, std::string(branch_marker), {},
                                   EdgeClass::Provenance});
        }
    }
    return graph;
}

MindMapGraph build_thread_graph(const forum::Thread& thread, Labeler& labeler) {
    MindMapGraph graph;
    append_thread(graph, thread, labeler);
    return graph;
}

MindMapGraph restrict_to_thread(const MindMapGraph& graph, const std::string& thread_id) {
    MindMapGraph out;
    std::set<std::string> ids;
    for (const auto& n : graph.nodes) {
        if (n.source.thread_id != thread_id) continue;
        out.nodes.push_back(n);
        ids.insert(n.node_id);
    }
    for (const auto& e : graph.edges) {
        if (e.cls == EdgeClass::Reply && ids.count(e.from) && ids.count(e.to)) out.edges.push_back(e);
    }
    return out;
}

NodeSource source_of(const MindMapGraph& graph, const std::string& node_id) {
    const MindMapNode* n = graph.node(node_id);
    if (!n) throw std::out_of_range("unknown mind-map node " + node_id);
    return n->source;
}

std::string label_at(const MindMapNode& node, ZoomLevel zoom) {
    switch (zoom) {
    case ZoomLevel::Overview: return node.labels.overview;
    case ZoomLevel::Keyword: return node.labels.keyword;
    case ZoomLevel::Summary: return node.labels.summary;
    }
    return {};
}

std::string rationale_of(const MindMapEdge& edge) { return edge.rationale; }

std::vector<std::string> check_isomorphic(const MindMapGraph& graph, const forum::Thread& thread) {
    std::vector<std::string> problems;
    const auto sub = restrict_to_thread(graph, thread.thread_id);
    const auto moves = thread.state.moves();
    if (sub.nodes.size() != moves.size()) {
        problems.push_back(thread.thread_id + ": " + std::to_string(sub.nodes.size()) + " nodes for " +
                           std::to_string(moves.size()) + " moves");
    }
    std::map<std::string, std::vector<const MindMapEdge*>> out_edges;
    for (const auto& e : sub.edges) out_edges[e.from].push_back(&e);

    std::multiset<std::string> edge_acts, move_acts;
    for (const auto& e : sub.edges) edge_acts.insert(e.act);
    for (const auto& m : moves) {
        const MindMapNode* n = sub.node(m.move_id);
        if (!n) {
            problems.push_back(m.move_id + ": no node");
            continue;
        }
        const NodeSource expected{thread.thread_id, m.is_root() ? std::nullopt : std::optional(m.move_id)};
        if (n->source != expected) problems.push_back(m.move_id + ": source locator mismatch");
        const auto& es = out_edges[m.move_id];
        if (m.is_root()) {
            if (!es.empty()) problems.push_back(m.move_id + ": root has an outgoing edge");
            continue;
        }
        move_acts.insert(edge_act(m));
        if (es.size() != 1) {
            problems.push_back(m.move_id + ": " + std::to_string(es.size()) + " edges instead of 1");
        } else if (es.front()->to != *m.target) {
            problems.push_back(m.move_id + ": edge points at " + es.front()->to + " instead of " + *m.target);
        } else if (es.front()->act != edge_act(m)) {
            problems.push_back(m.move_id + ": edge act " + es.front()->act + " differs from the move");
        }
    }
    if (edge_acts != move_acts) problems.push_back(thread.thread_id + ": edge-act multiset differs from move acts");
    return problems;
}

std::vector<std::string> check_labels(const MindMapNode& node) {
    std::vector<std::string> problems;
    const auto& l = node.labels;
    const auto o = text::utf8_length(l.overview), k = text::utf8_length(l.keyword), s = text::utf8_length(l.summary);
    if (o > k || k > s) problems.push_back(node.node_id + ": label lengths not monotone");
    if (text::word_count(l.keyword) > keyword_max_words) problems.push_back(node.node_id + ": keyword over 6 words");
    if (text::trim(l.summary).empty()) problems.push_back(node.node_id + ": empty summary");
    if (text::split_sentences(l.summary).size() > 2) problems.push_back(node.node_id + ": summary over 2 sentences");
    return problems;
}

bool is_subgraph(const MindMapGraph& smaller, const MindMapGraph& larger) {
    for (const auto& n : smaller.nodes) {
        const MindMapNode* other = larger.node(n.node_id);
        if (!other || other->source != n.source) return false;
    }
    for (const auto& e : smaller.edges) {
        if (std::find(larger.edges.begin(), larger.edges.end(), e) == larger.edges.end()) return false;
    }
    return true;
}

}  // namespace agora::mindmap
