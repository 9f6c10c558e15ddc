#include "agora/agent/memory.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace agora::agent {

std::string_view to_string(SnippetKind kind) {
    switch (kind) {
    case SnippetKind::Hypothesis: return "hypothesis";
    case SnippetKind::Question: return "question";
    case SnippetKind::RationaleShift: return "rationale_shift";
    case SnippetKind::MethodologicalConsideration: return "methodological_consideration";
    }
    return "?";
}

std::optional<SnippetKind> parse_snippet_kind(std::string_view name) {
    for (auto k : {SnippetKind::Hypothesis, SnippetKind::Question, SnippetKind::RationaleShift,
                   SnippetKind::MethodologicalConsideration}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

void to_json(nlohmann::json& j, const MemorySnippet& s) {
    j = nlohmann::json{{"snippet_id", s.snippet_id},
                       {"agent_id", s.agent_id},
                       {"kind", to_string(s.kind)},
                       {"text", s.text},
                       {"refines", s.refines},
                       {"created_at", s.created_at},
                       {"source_window", {{"first", s.source_window.first}, {"last", s.source_window.last}}}};
}

void from_json(const nlohmann::json& j, MemorySnippet& s) {
    s.snippet_id = j.at("snippet_id").get<std::string>();
    s.agent_id = j.at("agent_id").get<std::string>();
    const auto kind = parse_snippet_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown snippet kind");
    s.kind = *kind;
    s.text = j.at("text").get<std::string>();
    s.refines = j.value("refines", std::vector<std::string>{});
    s.created_at = j.at("created_at").get<std::uint64_t>();
    const auto& w = j.at("source_window");
    s.source_window = {w.at("first").get<std::string>(), w.at("last").get<std::string>()};
}

const MemorySnippet* MemoryStore::find(const std::string& snippet_id) const {
    for (const auto& s : snippets_) {
        if (s.snippet_id == snippet_id) return &s;
    }
    return nullptr;
}

std::uint64_t MemoryStore::next_created_at() const { return snippets_.empty() ? 1 : snippets_.back().created_at + 1; }

std::string MemoryStore::next_snippet_id() const {
    return agent_id_ + ".s" + std::to_string(snippets_.size() + 1);
}

void MemoryStore::append(MemorySnippet snippet) {
    if (snippet.agent_id != agent_id_) {
        throw LineageViolation("snippet " + snippet.snippet_id + " belongs to " + snippet.agent_id + ", not " + agent_id_);
    }
    if (snippet.snippet_id.empty() || find(snippet.snippet_id)) {
        throw LineageViolation("snippet id '" + snippet.snippet_id + "' is empty or already used");
    }
    if (snippet.text.empty()) throw LineageViolation("snippet " + snippet.snippet_id + " has no text");
    if (!snippets_.empty() && snippet.created_at <= snippets_.back().created_at) {
        throw LineageViolation("snippet " + snippet.snippet_id + " is not newer than the latest snippet");
    }
    std::set<std::string> seen;
    for (const auto& parent : snippet.refines) {
        const MemorySnippet* p = find(parent);
        if (!p) throw LineageViolation("snippet " + snippet.snippet_id + " refines unknown or later snippet " + parent);
        if (p->created_at >= snippet.created_at) {
            throw LineageViolation("snippet " + snippet.snippet_id + " refines later snippet " + parent);
        }
        if (!seen.insert(parent).second) throw LineageViolation("duplicate refines entry " + parent);
    }
    snippets_.push_back(std::move(snippet));
}

MemoryViews memory_views(const MemoryStore& store) {
    MemoryViews views;
    views.stream.assign(store.snippets().begin(), store.snippets().end());
    std::stable_sort(views.stream.begin(), views.stream.end(),
                     [](const MemorySnippet& a, const MemorySnippet& b) { return a.created_at < b.created_at; });

    std::map<std::string, std::vector<const MemorySnippet*>> children;
    std::vector<const MemorySnippet*> roots;
    for (const auto& s : views.stream) {
        if (s.refines.empty()) roots.push_back(&s);
        else children[s.refines.front()].push_back(&s);
    }
    std::function<LineageNode(const MemorySnippet&)> build = [&](const MemorySnippet& s) {
        LineageNode node{s.snippet_id, {}, {}};
        if (s.refines.size() > 1) node.cross_links.assign(s.refines.begin() + 1, s.refines.end());
        if (auto it = children.find(s.snippet_id); it != children.end()) {
            for (const MemorySnippet* c : it->second) node.children.push_back(build(*c));
        }
        return node;
    };
    for (const MemorySnippet* r : roots) views.lineage.push_back(build(*r));
    return views;
}

std::vector<std::string> forest_ids(const std::vector<LineageNode>& forest) {
    std::vector<std::string> out;
    std::function<void(const LineageNode&)> walk = [&](const LineageNode& n) {
        out.push_back(n.snippet_id);
        for (const auto& c : n.children) walk(c);
    };
    for (const auto& n : forest) walk(n);
    return out;
}

std::vector<MemorySnippet> conditioning_memories(const MemoryStore& store, std::size_t k) {
    const auto all = store.snippets();
    std::set<std::string> chosen;
    std::vector<std::string> frontier;
    const std::size_t start = all.size() > k ? all.size() - k : 0;
    for (std::size_t i = start; i < all.size(); ++i) frontier.push_back(all[i].snippet_id);
    while (!frontier.empty()) {
        const auto id = frontier.back();
        frontier.pop_back();
        if (!chosen.insert(id).second) continue;
        if (const MemorySnippet* s = store.find(id)) {
            for (const auto& p : s->refines) frontier.push_back(p);
        }
    }
    std::vector<MemorySnippet> out;
    for (const auto& s : all) {
        if (chosen.count(s.snippet_id)) out.push_back(s);
    }
    return out;
}

bool lineage_is_dag(std::span<const MemorySnippet> snippets) {
    std::map<std::string, const MemorySnippet*> by_id;
    for (const auto& s : snippets) by_id[s.snippet_id] = &s;
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::function<bool(const std::string&)> visit = [&](const std::string& id) {
        auto it = by_id.find(id);
        if (it == by_id.end()) return false;
        auto& m = mark[id];
        if (m == Mark::Done) return true;
        if (m == Mark::Active) return false;
        m = Mark::Active;
        for (const auto& p : it->second->refines) {
            if (!visit(p)) return false;
        }
        mark[id] = Mark::Done;
        return true;
    };
    for (const auto& s : snippets) {
        if (!visit(s.snippet_id)) return false;
    }
    return true;
}

}  // namespace agora::agent
