#include "agora/knowledge/graph.hpp"

#include "agora/common/text.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace agora::knowledge {

std::string_view to_string(EdgeKind kind) {
    return kind == EdgeKind::CitationTrace ? "citation_trace" : "mentions";
}

namespace {

EdgeKind parse_edge_kind(std::string_view s) {
    if (s == "citation_trace") return EdgeKind::CitationTrace;
    if (s == "mentions") return EdgeKind::Mentions;
    throw std::invalid_argument("unknown edge kind");
}

bool looks_like_acronym(std::string_view word) {
    std::size_t upper = 0;
    for (unsigned char c : word) {
        if (std::isupper(c)) ++upper;
        else if (!std::isdigit(c)) return false;
    }
    return upper >= 2;
}

bool contains_token(const std::vector<std::string>& haystack, const std::string& needle) {
    return std::find(haystack.begin(), haystack.end(), needle) != haystack.end();
}

}  // namespace

std::vector<Entity> extract_entities(const PaperRecord& paper) {
    std::vector<Entity> out;
    const auto add = [&](std::string label, EntityKind kind) {
        for (const auto& e : out) {
            if (e.label == label) return;
        }
        out.push_back({"e:" + label, std::move(label), kind});
    };

    // Acronyms keep their identity regardless of case elsewhere.
    std::string word;
    const auto flush = [&] {
        if (looks_like_acronym(word)) add(text::to_lower(word), EntityKind::Acronym);
        word.clear();
    };
    for (char c : paper.title + " " + paper.abstract) {
        if (std::isalnum(static_cast<unsigned char>(c))) word.push_back(c);
        else flush();
    }
    flush();

    // Title bigrams of adjacent content words, then salient single words.
    const auto title_tokens = text::tokenize(paper.title);
    for (std::size_t i = 0; i + 1 < title_tokens.size(); ++i) {
        const auto& a = title_tokens[i];
        const auto& b = title_tokens[i + 1];
        if (a.size() >= 3 && b.size() >= 3 && !text::is_stopword(a) && !text::is_stopword(b)) {
            add(a + " " + b, EntityKind::Keyphrase);
        }
    }
    for (const auto& k : text::keywords(paper.title, 6)) add(k, EntityKind::Keyphrase);
    for (const auto& k : text::keywords(paper.abstract, 5)) add(k, EntityKind::Keyphrase);
    return out;
}

const PaperRecord* KnowledgeGraph::paper(const std::string& key) const {
    auto it = papers_.find(key);
    return it == papers_.end() ? nullptr : &it->second;
}

const PaperRecord* KnowledgeGraph::find_equivalent(const PaperRecord& paper) const {
    if (auto it = papers_.find(paper.key()); it != papers_.end()) return &it->second;
    if (auto doi = paper.doi()) {
        for (const auto& [key, p] : papers_) {
            if (p.doi() == doi) return &p;
        }
    }
    const auto title = normalize_title(paper.title);
    for (const auto& [key, p] : papers_) {
        if (normalize_title(p.title) == title) return &p;
    }
    return nullptr;
}

GraphDelta KnowledgeGraph::insert(const PaperRecord& paper) {
    GraphDelta delta;
    if (paper.title.empty()) throw std::invalid_argument("paper title must be non-empty");
    const auto key = paper.key();
    if (papers_.count(key)) return delta;

    papers_.emplace(key, paper);
    delta.papers.push_back(key);

    const auto add_edge = [&](GraphEdge e) {
        if (edges_.insert(std::move(e)).second) ++delta.edges;
    };

    const auto entities = extract_entities(paper);
    for (const auto& e : entities) {
        if (entities_.emplace(e.entity_id, e).second) delta.entities.push_back(e.entity_id);
        add_edge({key, e.entity_id, EdgeKind::Mentions});
    }

    const auto sentences = text::split_sentences(paper.abstract);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        Snippet s{key + "#s" + std::to_string(i + 1), sentences[i], key};
        const auto tokens = text::tokenize(s.text);
        for (const auto& e : entities) {
            bool linked = true;
            for (const auto& part : text::tokenize(e.label)) linked = linked && contains_token(tokens, part);
            if (linked) add_edge({s.snippet_id, e.entity_id, EdgeKind::Mentions});
        }
        add_edge({s.snippet_id, key, EdgeKind::CitationTrace});
        delta.snippets.push_back(s.snippet_id);
        snippets_.push_back(std::move(s));
    }
    return delta;
}

std::vector<SnippetHit> KnowledgeGraph::query(const std::string& query, std::size_t k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto wanted = text::keywords(query, 16);
    if (wanted.empty()) wanted = text::tokenize(query);

    std::vector<SnippetHit> hits;
    for (const auto& s : snippets_) {
        auto tokens = text::tokenize(s.text);
        if (const PaperRecord* p = paper(s.source_paper)) {
            const auto title = text::tokenize(p->title);
            tokens.insert(tokens.end(), title.begin(), title.end());
        }
        auto lo = edges_.lower_bound(GraphEdge{s.snippet_id, "", EdgeKind::Mentions});
        for (; lo != edges_.end() && lo->from == s.snippet_id; ++lo) {
            if (lo->kind != EdgeKind::Mentions) continue;
            if (auto e = entities_.find(lo->to); e != entities_.end()) {
                const auto label = text::tokenize(e->second.label);
                tokens.insert(tokens.end(), label.begin(), label.end());
            }
        }
        std::size_t score = 0;
        for (const auto& w : wanted) {
            if (contains_token(tokens, w)) ++score;
        }
        if (score > 0) hits.push_back({s, s.source_paper, score});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const SnippetHit& a, const SnippetHit& b) { return a.score > b.score; });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

void KnowledgeGraph::add_to_collection(const std::string& agent_id, const std::string& paper_key) {
    if (!contains_paper(paper_key)) throw std::invalid_argument("unknown paper " + paper_key);
    collections_[agent_id].insert(paper_key);
}

std::vector<std::string> KnowledgeGraph::collection(const std::string& agent_id) const {
    auto it = collections_.find(agent_id);
    if (it == collections_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<std::string> KnowledgeGraph::check_integrity() const {
    std::vector<std::string> problems;
    std::set<std::string> snippet_ids;
    for (const auto& s : snippets_) {
        snippet_ids.insert(s.snippet_id);
        if (!papers_.count(s.source_paper)) problems.push_back("snippet " + s.snippet_id + " has no source paper");
    }
    for (const auto& e : edges_) {
        if (e.kind == EdgeKind::CitationTrace) {
            if (!snippet_ids.count(e.from) || !papers_.count(e.to)) {
                problems.push_back("citation-trace edge " + e.from + " -> " + e.to + " is not snippet -> paper");
            }
        } else {
            const bool from_ok = snippet_ids.count(e.from) || papers_.count(e.from);
            if (!from_ok || !entities_.count(e.to)) problems.push_back("dangling mentions edge " + e.from + " -> " + e.to);
        }
    }
    for (const auto& [agent, keys] : collections_) {
        for (const auto& k : keys) {
            if (!papers_.count(k)) problems.push_back("collection of " + agent + " references unknown paper " + k);
        }
    }
    return problems;
}

nlohmann::json KnowledgeGraph::snapshot() const {
    auto papers = nlohmann::json::array();
    for (const auto& [key, p] : papers_) papers.push_back(p);
    auto entities = nlohmann::json::array();
    for (const auto& [id, e] : entities_) {
        entities.push_back({{"entity_id", e.entity_id},
                            {"label", e.label},
                            {"kind", e.kind == EntityKind::Acronym ? "acronym" : "keyphrase"}});
    }
    auto snippets = nlohmann::json::array();
    for (const auto& s : snippets_) {
        snippets.push_back({{"snippet_id", s.snippet_id}, {"text", s.text}, {"source_paper", s.source_paper}});
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : edges_) edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
    nlohmann::json collections = nlohmann::json::object();
    for (const auto& [agent, keys] : collections_) collections[agent] = keys;
    return {{"papers", papers}, {"entities", entities}, {"snippets", snippets}, {"edges", edges},
            {"collections", collections}};
}

KnowledgeGraph KnowledgeGraph::from_snapshot(const nlohmann::json& snapshot) {
    KnowledgeGraph g;
    for (const auto& p : snapshot.at("papers")) {
        auto paper = p.get<PaperRecord>();
        g.papers_.emplace(paper.key(), std::move(paper));
    }
    for (const auto& e : snapshot.at("entities")) {
        Entity entity{e.at("entity_id").get<std::string>(), e.at("label").get<std::string>(),
                      e.at("kind").get<std::string>() == "acronym" ? EntityKind::Acronym : EntityKind::Keyphrase};
        g.entities_.emplace(entity.entity_id, std::move(entity));
    }
    for (const auto& s : snapshot.at("snippets")) {
        g.snippets_.push_back({s.at("snippet_id").get<std::string>(), s.at("text").get<std::string>(),
                               s.at("source_paper").get<std::string>()});
    }
    for (const auto& e : snapshot.at("edges")) {
        g.edges_.insert({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                         parse_edge_kind(e.at("kind").get<std::string>())});
    }
    if (snapshot.contains("collections")) {
        for (const auto& [agent, keys] : snapshot["collections"].items()) {
            g.collections_[agent] = keys.get<std::set<std::string>>();
        }
    }
    return g;
}

GraphDelta insert_paper(KnowledgeGraph& graph, const PaperRecord& paper) { return graph.insert(paper); }

std::vector<SnippetHit> query_graph(const KnowledgeGraph& graph, const std::string& query, std::size_t k) {
    return graph.query(query, k);
}

}  // namespace agora::knowledge
