#include "agora/knowledge/scholar.hpp"

#include "agora/common/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

namespace agora::knowledge {

namespace {

nlohmann::json checked_body(const net::HttpResponse& response, std::string_view who) {
    if (response.status != 200) {
        throw ScholarError(std::string(who) + " returned HTTP " + std::to_string(response.status));
    }
    try {
        return nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::exception& e) {
        throw ScholarError(std::string(who) + " returned malformed JSON: " + e.what());
    }
}

std::string strip_openalex_id(std::string id) {
    const auto slash = id.rfind('/');
    return slash == std::string::npos ? id : id.substr(slash + 1);
}

}  // namespace

SemanticScholarClient::SemanticScholarClient(std::shared_ptr<net::HttpTransport> transport, std::string api_key)
    : transport_(std::move(transport)), api_key_(std::move(api_key)) {}

std::vector<PaperRecord> SemanticScholarClient::search(const std::string& query, std::size_t limit) {
    net::HttpRequest req;
    req.path = "/graph/v1/paper/search";
    req.params = {{"query", query},
                  {"limit", std::to_string(limit)},
                  {"fields", "title,authors,year,abstract,externalIds"}};
    if (!api_key_.empty()) req.headers["x-api-key"] = api_key_;
    net::HttpResponse resp;
    try {
        resp = transport_->send(req);
    } catch (const net::TransportError& e) {
        throw ScholarError(std::string("semantic_scholar: ") + e.what());
    }
    auto papers = parse_response(checked_body(resp, "semantic_scholar"));
    if (papers.size() > limit) papers.resize(limit);
    return papers;
}

std::vector<PaperRecord> SemanticScholarClient::parse_response(const nlohmann::json& body) {
    std::vector<PaperRecord> out;
    if (!body.contains("data") || !body["data"].is_array()) return out;
    for (const auto& item : body["data"]) {
        PaperRecord p;
        p.provider = ScholarProvider::SemanticScholar;
        p.paper_id = item.value("paperId", std::string{});
        if (item.contains("title") && item["title"].is_string()) p.title = item["title"].get<std::string>();
        if (p.paper_id.empty() || p.title.empty()) continue;
        if (item.contains("authors") && item["authors"].is_array()) {
            for (const auto& a : item["authors"]) {
                if (a.contains("name") && a["name"].is_string()) p.authors.push_back(a["name"].get<std::string>());
            }
        }
        if (item.contains("year") && item["year"].is_number_integer()) p.year = item["year"].get<int>();
        if (item.contains("abstract") && item["abstract"].is_string()) p.abstract = item["abstract"].get<std::string>();
        if (item.contains("externalIds") && item["externalIds"].is_object()) {
            for (const auto& [k, v] : item["externalIds"].items()) {
                if (v.is_string()) p.external_ids[k] = v.get<std::string>();
                else if (v.is_number()) p.external_ids[k] = v.dump();
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

OpenAlexClient::OpenAlexClient(std::shared_ptr<net::HttpTransport> transport, std::string mailto)
    : transport_(std::move(transport)), mailto_(std::move(mailto)) {}

std::vector<PaperRecord> OpenAlexClient::search(const std::string& query, std::size_t limit) {
    net::HttpRequest req;
    req.path = "/works";
    req.params = {{"search", query}, {"per-page", std::to_string(limit)}};
    if (!mailto_.empty()) req.params.emplace_back("mailto", mailto_);
    net::HttpResponse resp;
    try {
        resp = transport_->send(req);
    } catch (const net::TransportError& e) {
        throw ScholarError(std::string("openalex: ") + e.what());
    }
    auto papers = parse_response(checked_body(resp, "openalex"));
    if (papers.size() > limit) papers.resize(limit);
    return papers;
}

std::string OpenAlexClient::rebuild_abstract(const nlohmann::json& inverted_index) {
    if (!inverted_index.is_object()) return {};
    std::vector<std::pair<int, std::string>> positioned;
    for (const auto& [word, positions] : inverted_index.items()) {
        for (const auto& pos : positions) positioned.emplace_back(pos.get<int>(), word);
    }
    std::sort(positioned.begin(), positioned.end());
    std::string out;
    for (const auto& [pos, word] : positioned) {
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::vector<PaperRecord> OpenAlexClient::parse_response(const nlohmann::json& body) {
    std::vector<PaperRecord> out;
    if (!body.contains("results") || !body["results"].is_array()) return out;
    for (const auto& item : body["results"]) {
        PaperRecord p;
        p.provider = ScholarProvider::OpenAlex;
        p.paper_id = strip_openalex_id(item.value("id", std::string{}));
        for (const char* field : {"title", "display_name"}) {
            if (p.title.empty() && item.contains(field) && item[field].is_string()) p.title = item[field].get<std::string>();
        }
        if (p.paper_id.empty() || p.title.empty()) continue;
        if (item.contains("authorships") && item["authorships"].is_array()) {
            for (const auto& a : item["authorships"]) {
                if (a.contains("author") && a["author"].contains("display_name")) {
                    p.authors.push_back(a["author"]["display_name"].get<std::string>());
                }
            }
        }
        if (item.contains("publication_year") && item["publication_year"].is_number_integer()) {
            p.year = item["publication_year"].get<int>();
        }
        if (item.contains("abstract_inverted_index")) p.abstract = rebuild_abstract(item["abstract_inverted_index"]);
        if (item.contains("doi") && item["doi"].is_string()) p.external_ids["DOI"] = normalize_doi(item["doi"].get<std::string>());
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<PaperRecord> search_papers(const std::string& query, std::span<ScholarClient* const> clients,
                                       std::size_t limit) {
    if (text::trim(query).empty()) throw std::invalid_argument("search query is empty");
    if (limit < 1) throw std::invalid_argument("search limit must be >= 1");

    std::vector<std::vector<PaperRecord>> per_provider;
    std::vector<std::string> failures;
    for (ScholarClient* client : clients) {
        try {
            per_provider.push_back(client->search(query, limit));
        } catch (const ScholarError& e) {
            spdlog::warn("paper search via {} failed: {}", to_string(client->provider()), e.what());
            failures.emplace_back(e.what());
        }
    }
    if (per_provider.empty()) {
        throw AllProvidersFailed("all scholarly providers failed for '" + query + "'" +
                                 (failures.empty() ? std::string{} : ": " + text::join(failures, "; ")));
    }

    std::vector<PaperRecord> merged;
    std::map<std::string, std::size_t> by_doi;
    std::map<std::string, std::size_t> by_title;
    const auto absorb = [&](PaperRecord p) {
        std::optional<std::size_t> existing;
        if (auto doi = p.doi()) {
            if (auto it = by_doi.find(*doi); it != by_doi.end()) existing = it->second;
        }
        const auto title = normalize_title(p.title);
        if (!existing) {
            if (auto it = by_title.find(title); it != by_title.end()) existing = it->second;
        }
        if (existing) {
            auto& keep = merged[*existing];
            for (const auto& [k, v] : p.external_ids) keep.external_ids.try_emplace(k, v);
            if (keep.abstract.empty()) keep.abstract = p.abstract;
            if (!keep.year) keep.year = p.year;
            if (keep.authors.empty()) keep.authors = p.authors;
            if (auto doi = keep.doi()) by_doi.try_emplace(*doi, *existing);
            return;
        }
        const std::size_t idx = merged.size();
        if (auto doi = p.doi()) by_doi.emplace(*doi, idx);
        by_title.emplace(title, idx);
        merged.push_back(std::move(p));
    };

    std::size_t longest = 0;
    for (const auto& list : per_provider) longest = std::max(longest, list.size());
    for (std::size_t rank = 0; rank < longest; ++rank) {
        for (auto& list : per_provider) {
            if (rank < list.size()) absorb(std::move(list[rank]));
        }
    }
    if (merged.size() > limit) merged.resize(limit);
    return merged;
}

}  // namespace agora::knowledge
