#pragma once

#include "agora/common/http_client.hpp"
#include "agora/knowledge/paper.hpp"

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::knowledge {

class ScholarError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AllProvidersFailed : public ScholarError {
public:
    using ScholarError::ScholarError;
};

/// A scholarly search backend. Implementations throw ScholarError on failure.
class ScholarClient {
public:
    virtual ~ScholarClient() = default;
    virtual ScholarProvider provider() const = 0;
    virtual std::vector<PaperRecord> search(const std::string& query, std::size_t limit) = 0;
};

/// Graph API paper search (`/graph/v1/paper/search`).
class SemanticScholarClient final : public ScholarClient {
public:
    SemanticScholarClient(std::shared_ptr<net::HttpTransport> transport, std::string api_key = {});
    ScholarProvider provider() const override { return ScholarProvider::SemanticScholar; }
    std::vector<PaperRecord> search(const std::string& query, std::size_t limit) override;

    static std::vector<PaperRecord> parse_response(const nlohmann::json& body);

private:
    std::shared_ptr<net::HttpTransport> transport_;
    std::string api_key_;
};

/// Works search (`/works?search=`).
class OpenAlexClient final : public ScholarClient {
public:
    OpenAlexClient(std::shared_ptr<net::HttpTransport> transport, std::string mailto = {});
    ScholarProvider provider() const override { return ScholarProvider::OpenAlex; }
    std::vector<PaperRecord> search(const std::string& query, std::size_t limit) override;

    static std::vector<PaperRecord> parse_response(const nlohmann::json& body);
    /// Rebuilds plain text from OpenAlex's word -> positions index.
    static std::string rebuild_abstract(const nlohmann::json& inverted_index);

private:
    std::shared_ptr<net::HttpTransport> transport_;
    std::string mailto_;
};

/// Queries every client, tolerates partial failure, interleaves results
/// round-robin in provider relevance order and merges duplicates (DOI first,
/// then normalized title). Throws AllProvidersFailed if no client answered.
std::vector<PaperRecord> search_papers(const std::string& query, std::span<ScholarClient* const> clients,
                                       std::size_t limit);

}  // namespace agora::knowledge
