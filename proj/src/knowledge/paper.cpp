#include "agora/knowledge/paper.hpp"

#include "agora/common/text.hpp"

#include <cctype>
#include <stdexcept>

namespace agora::knowledge {

std::string_view to_string(ScholarProvider provider) {
    switch (provider) {
    case ScholarProvider::SemanticScholar: return "semantic_scholar";
    case ScholarProvider::OpenAlex: return "openalex";
    case ScholarProvider::Manual: return "manual";
    }
    return "?";
}

std::optional<ScholarProvider> parse_provider(std::string_view name) {
    for (auto p : {ScholarProvider::SemanticScholar, ScholarProvider::OpenAlex, ScholarProvider::Manual}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

std::string_view key_prefix(ScholarProvider provider) {
    switch (provider) {
    case ScholarProvider::SemanticScholar: return "s2";
    case ScholarProvider::OpenAlex: return "oa";
    case ScholarProvider::Manual: return "manual";
    }
    return "?";
}

std::string PaperRecord::key() const { return std::string(key_prefix(provider)) + ":" + paper_id; }

std::optional<std::string> PaperRecord::doi() const {
    auto it = external_ids.find("DOI");
    if (it == external_ids.end() || it->second.empty()) return std::nullopt;
    return normalize_doi(it->second);
}

std::string normalize_doi(std::string_view doi) {
    std::string d = text::to_lower(text::trim(doi));
    for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "doi:"}) {
        if (d.rfind(prefix, 0) == 0) {
            d.erase(0, prefix.size());
            break;
        }
    }
    return d;
}

std::string normalize_title(std::string_view title) {
    std::string out;
    for (const auto& t : text::tokenize(title)) out += t;
    return out;
}

void to_json(nlohmann::json& j, const PaperRecord& p) {
    j = nlohmann::json{{"paper_id", p.paper_id},
                       {"title", p.title},
                       {"authors", p.authors},
                       {"year", p.year ? nlohmann::json(*p.year) : nlohmann::json()},
                       {"abstract", p.abstract},
                       {"external_ids", p.external_ids},
                       {"provider", to_string(p.provider)}};
}

void from_json(const nlohmann::json& j, PaperRecord& p) {
    p.paper_id = j.at("paper_id").get<std::string>();
    p.title = j.at("title").get<std::string>();
    p.authors = j.value("authors", std::vector<std::string>{});
    p.year.reset();
    if (j.contains("year") && !j["year"].is_null()) p.year = j["year"].get<int>();
    p.abstract = j.value("abstract", std::string{});
    p.external_ids = j.value("external_ids", std::map<std::string, std::string>{});
    const auto provider = parse_provider(j.at("provider").get<std::string>());
    if (!provider) throw std::invalid_argument("unknown paper provider");
    p.provider = *provider;
}

}  // namespace agora::knowledge
