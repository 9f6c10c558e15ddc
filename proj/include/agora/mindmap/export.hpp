#pragma once

#include "agora/mindmap/graph.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace agora::mindmap {

class ExportFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Node-link document: {"directed":true,"multigraph":false,"nodes":[...],"links":[...]}.
nlohmann::json to_node_link(const MindMapGraph& graph);
MindMapGraph from_node_link(const nlohmann::json& doc);

/// Graphviz digraph carrying every node and edge attribute.
std::string to_dot(const MindMapGraph& graph);
/// Parses the subset of DOT written by to_dot.
MindMapGraph from_dot(std::string_view text);

}  // namespace agora::mindmap
