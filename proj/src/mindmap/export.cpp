#include "agora/mindmap/export.hpp"

#include <cctype>
#include <map>

namespace agora::mindmap {

nlohmann::json to_node_link(const MindMapGraph& graph) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : graph.nodes) {
        nodes.push_back({{"id", n.node_id},
                         {"thread_id", n.source.thread_id},
                         {"move_id", n.source.move_id ? nlohmann::json(*n.source.move_id) : nlohmann::json()},
                         {"overview", n.labels.overview},
                         {"keyword", n.labels.keyword},
                         {"summary", n.labels.summary}});
    }
    auto links = nlohmann::json::array();
    for (const auto& e : graph.edges) {
        links.push_back({{"source", e.from},
                         {"target", e.to},
                         {"act", e.act},
                         {"rationale", e.rationale},
                         {"class", to_string(e.cls)}});
    }
    return {{"directed", true}, {"multigraph", false}, {"graph", nlohmann::json::object()}, {"nodes", nodes}, {"links", links}};
}

MindMapGraph from_node_link(const nlohmann::json& doc) {
    MindMapGraph graph;
    try {
        for (const auto& n : doc.at("nodes")) {
            MindMapNode node;
            node.node_id = n.at("id").get<std::string>();
            node.source.thread_id = n.at("thread_id").get<std::string>();
            if (!n.at("move_id").is_null()) node.source.move_id = n.at("move_id").get<std::string>();
            node.labels = {n.value("overview", std::string{}), n.value("keyword", std::string{}),
                           n.value("summary", std::string{})};
            graph.nodes.push_back(std::move(node));
        }
        for (const auto& l : doc.at("links")) {
            const auto cls = parse_edge_class(l.value("class", std::string("reply")));
            if (!cls) throw ExportFormatError("unknown edge class");
            graph.edges.push_back({l.at("source").get<std::string>(), l.at("target").get<std::string>(),
                                   l.at("act").get<std::string>(), l.value("rationale", std::string{}), *cls});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ExportFormatError(std::string("malformed node-link document: ") + e.what());
    }
    return graph;
}

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string attrs(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out = " [";
    for (std::size_t i = 0; i < kv.size(); ++i) out += (i ? ", " : "") + kv[i].first + "=" + quote(kv[i].second);
    return out + "]";
}

}  // namespace

std::string to_dot(const MindMapGraph& graph) {
    std::string out = "digraph mindmap {\n";
    for (const auto& n : graph.nodes) {
        out += "  " + quote(n.node_id) +
               attrs({{"label", n.labels.keyword},
                      {"thread", n.source.thread_id},
                      {"move", n.source.move_id.value_or("")},
                      {"overview", n.labels.overview},
                      {"keyword", n.labels.keyword},
                      {"summary", n.labels.summary}}) +
               ";\n";
    }
    for (const auto& e : graph.edges) {
        out += "  " + quote(e.from) + " -> " + quote(e.to) +
               attrs({{"label", e.act}, {"act", e.act}, {"rationale", e.rationale}, {"class", std::string(to_string(e.cls))}}) +
               ";\n";
    }
    return out + "}\n";
}

namespace {

class DotLexer {
public:
    explicit DotLexer(std::string_view text) : text_(text) {}

    // Next token; quoted strings come back unescaped with `quoted` set.
    bool next(std::string& token, bool& quoted) {
        skip_space();
        quoted = false;
        if (pos_ >= text_.size()) return false;
        const char c = text_[pos_];
        if (c == '"') {
            quoted = true;
            token.clear();
            for (++pos_; pos_ < text_.size() && text_[pos_] != '"'; ++pos_) {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    ++pos_;
                    token += text_[pos_] == 'n' ? '\n' : text_[pos_];
                } else {
                    token += text_[pos_];
                }
            }
            if (pos_ >= text_.size()) throw ExportFormatError("unterminated string in DOT input");
            ++pos_;
            return true;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            token = "->";
            pos_ += 2;
            return true;
        }
        if (std::string_view("{}[]=,;").find(c) != std::string_view::npos) {
            token = std::string(1, c);
            ++pos_;
            return true;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ == start) throw ExportFormatError(std::string("unexpected character '") + c + "' in DOT input");
        token = std::string(text_.substr(start, pos_ - start));
        return true;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct Token {
    std::string text;
    bool quoted = false;
    bool is(std::string_view s) const { return !quoted && text == s; }
};

}  // namespace

MindMapGraph from_dot(std::string_view text) {
    std::vector<Token> tokens;
    {
        DotLexer lexer(text);
        Token t;
        while (lexer.next(t.text, t.quoted)) tokens.push_back(t);
    }
    std::size_t i = 0;
    const auto expect = [&](std::string_view s) {
        if (i >= tokens.size() || !tokens[i].is(s)) throw ExportFormatError("expected '" + std::string(s) + "' in DOT input");
        ++i;
    };
    const auto parse_attrs = [&]() {
        std::map<std::string, std::string> kv;
        if (i < tokens.size() && tokens[i].is("[")) {
            ++i;
            while (i < tokens.size() && !tokens[i].is("]")) {
                const std::string key = tokens[i++].text;
                expect("=");
                if (i >= tokens.size()) throw ExportFormatError("missing attribute value");
                kv[key] = tokens[i++].text;
                if (i < tokens.size() && tokens[i].is(",")) ++i;
            }
            expect("]");
        }
        return kv;
    };

    expect("digraph");
    if (i < tokens.size() && !tokens[i].is("{")) ++i;  // graph name
    expect("{");
    MindMapGraph graph;
    while (i < tokens.size() && !tokens[i].is("}")) {
        const std::string first = tokens[i++].text;
        if (i < tokens.size() && tokens[i].is("->")) {
            ++i;
            if (i >= tokens.size()) throw ExportFormatError("edge without a target");
            const std::string second = tokens[i++].text;
            auto kv = parse_attrs();
            const auto cls = parse_edge_class(kv.count("class") ? kv["class"] : "reply");
            if (!cls) throw ExportFormatError("unknown edge class");
            graph.edges.push_back({first, second, kv["act"], kv["rationale"], *cls});
        } else {
            auto kv = parse_attrs();
            MindMapNode node{first, {kv["thread"], std::nullopt}, {kv["overview"], kv["keyword"], kv["summary"]}};
            if (!kv["move"].empty()) node.source.move_id = kv["move"];
            graph.nodes.push_back(std::move(node));
        }
        if (i < tokens.size() && tokens[i].is(";")) ++i;
    }
    expect("}");
    return graph;
}

}  // namespace agora::mindmap
