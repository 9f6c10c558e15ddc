#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agora::knowledge {

enum class ScholarProvider { SemanticScholar, OpenAlex, Manual };

std::string_view to_string(ScholarProvider provider);
std::optional<ScholarProvider> parse_provider(std::string_view name);
/// Short prefix used in paper keys: "s2", "oa", "manual".
std::string_view key_prefix(ScholarProvider provider);

struct PaperRecord {
    std::string paper_id;  // provider-scoped
    std::string title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::string abstract;
    std::map<std::string, std::string> external_ids;  // e.g. {"DOI": "10.1/x"}
    ScholarProvider provider = ScholarProvider::Manual;

    /// Globally unique "<prefix>:<paper_id>".
    std::string key() const;
    std::optional<std::string> doi() const;
    std::string first_author() const { return authors.empty() ? std::string{} : authors.front(); }

    bool operator==(const PaperRecord&) const = default;
};

void to_json(nlohmann::json& j, const PaperRecord& p);
void from_json(const nlohmann::json& j, PaperRecord& p);

/// Lowercased DOI without resolver prefix.
std::string normalize_doi(std::string_view doi);
/// Lowercased alphanumerics only; used for title-based dedup.
std::string normalize_title(std::string_view title);

}  // namespace agora::knowledge
