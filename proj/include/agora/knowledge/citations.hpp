#pragma once

#include "agora/knowledge/graph.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Agent drafts cite papers with placeholders "[@<paper key>]". Formatting
// renumbers them as [1]..[n] in first-appearance order; the move's citation
// list then maps marker i to citations[i-1].
namespace agora::knowledge {

class UnknownPaper : public std::runtime_error {
public:
    explicit UnknownPaper(const std::string& key) : std::runtime_error("unknown paper " + key), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct CitationMarker {
    int index = 0;
    std::string paper_key;
    std::size_t begin = 0;  // byte span of "[n]" in the body
    std::size_t end = 0;
    bool operator==(const CitationMarker&) const = default;
};

struct BibliographyEntry {
    int index = 0;
    std::string paper_key;
    std::string title;
    std::string first_author;
    std::optional<int> year;
    bool operator==(const BibliographyEntry&) const = default;
};

struct FormattedCitations {
    std::string body;
    std::vector<std::string> cited;  // paper keys in index order
    std::vector<CitationMarker> markers;
    std::vector<BibliographyEntry> bibliography;
};

std::string citation_placeholder(std::string_view paper_key);

/// Placeholders in first-appearance order (with repeats).
std::vector<std::string> placeholder_keys(std::string_view draft);

/// Throws UnknownPaper if a placeholder names a paper missing from `graph`.
FormattedCitations format_citations(std::string_view draft, const KnowledgeGraph& graph);

/// Drops placeholders whose key fails `keep`, leaving the rest untouched.
std::string strip_placeholders(std::string_view draft, const std::function<bool(const std::string&)>& keep);

/// Numeric "[n]" markers of a formatted body.
std::vector<CitationMarker> extract_markers(std::string_view body, std::span<const std::string> citations);

/// Markers first appear as 1, 2, ..., n and n equals the citation count.
bool markers_contiguous(std::string_view body, std::span<const std::string> citations);

std::vector<BibliographyEntry> bibliography_for(std::span<const std::string> citations, const KnowledgeGraph& graph);

}  // namespace agora::knowledge
