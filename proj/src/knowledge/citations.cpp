#include "agora/knowledge/citations.hpp"

#include <cctype>
#include <map>
#include <set>

namespace agora::knowledge {

namespace {

bool is_key_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == ':' || c == '.' || c == '_' || c == '-' || c == '/' || c == '#';
}

struct Placeholder {
    std::size_t begin;
    std::size_t end;
    std::string key;
};

std::vector<Placeholder> scan(std::string_view draft) {
    std::vector<Placeholder> out;
    std::size_t i = 0;
    while ((i = draft.find("[@", i)) != std::string_view::npos) {
        std::size_t j = i + 2;
        while (j < draft.size() && is_key_char(draft[j])) ++j;
        if (j < draft.size() && draft[j] == ']' && j > i + 2) {
            out.push_back({i, j + 1, std::string(draft.substr(i + 2, j - i - 2))});
            i = j + 1;
        } else {
            i += 2;
        }
    }
    return out;
}

}  // namespace

std::string citation_placeholder(std::string_view paper_key) { return "[@" + std::string(paper_key) + "]"; }

std::vector<std::string> placeholder_keys(std::string_view draft) {
    std::vector<std::string> keys;
    for (auto& p : scan(draft)) keys.push_back(std::move(p.key));
    return keys;
}

FormattedCitations format_citations(std::string_view draft, const KnowledgeGraph& graph) {
    FormattedCitations out;
    std::map<std::string, int> index_of;
    std::size_t cursor = 0;
    for (const auto& p : scan(draft)) {
        if (!graph.contains_paper(p.key)) throw UnknownPaper(p.key);
        auto [it, inserted] = index_of.try_emplace(p.key, static_cast<int>(index_of.size()) + 1);
        if (inserted) out.cited.push_back(p.key);
        out.body.append(draft.substr(cursor, p.begin - cursor));
        const std::string marker = "[" + std::to_string(it->second) + "]";
        out.markers.push_back({it->second, p.key, out.body.size(), out.body.size() + marker.size()});
        out.body += marker;
        cursor = p.end;
    }
    out.body.append(draft.substr(cursor));
    out.bibliography = bibliography_for(out.cited, graph);
    return out;
}

std::string strip_placeholders(std::string_view draft, const std::function<bool(const std::string&)>& keep) {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& p : scan(draft)) {
        if (keep(p.key)) continue;
        std::size_t begin = p.begin;
        if (begin > cursor && draft[begin - 1] == ' ') --begin;  // no dangling space
        out.append(draft.substr(cursor, begin - cursor));
        cursor = p.end;
    }
    out.append(draft.substr(cursor));
    return out;
}

std::vector<CitationMarker> extract_markers(std::string_view body, std::span<const std::string> citations) {
    std::vector<CitationMarker> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '[') continue;
        std::size_t j = i + 1;
        while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
        if (j == i + 1 || j >= body.size() || body[j] != ']' || j - i > 6) continue;
        const int index = std::stoi(std::string(body.substr(i + 1, j - i - 1)));
        std::string key;
        if (index >= 1 && static_cast<std::size_t>(index) <= citations.size()) key = citations[index - 1];
        out.push_back({index, std::move(key), i, j + 1});
        i = j;
    }
    return out;
}

bool markers_contiguous(std::string_view body, std::span<const std::string> citations) {
    int next = 1;
    for (const auto& m : extract_markers(body, citations)) {
        if (m.index == next) ++next;
        else if (m.index < 1 || m.index >= next) return false;
    }
    return static_cast<std::size_t>(next - 1) == citations.size() &&
           std::set<std::string>(citations.begin(), citations.end()).size() == citations.size();
}

std::vector<BibliographyEntry> bibliography_for(std::span<const std::string> citations, const KnowledgeGraph& graph) {
    std::vector<BibliographyEntry> out;
    for (std::size_t i = 0; i < citations.size(); ++i) {
        const PaperRecord* p = graph.paper(citations[i]);
        if (!p) throw UnknownPaper(citations[i]);
        out.push_back({static_cast<int>(i + 1), citations[i], p->title, p->first_author(), p->year});
    }
    return out;
}

}  // namespace agora::knowledge
