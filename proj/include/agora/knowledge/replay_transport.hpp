#pragma once

#include "agora/common/http_client.hpp"
#include "agora/knowledge/paper.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace agora::knowledge {

/// Offline stand-in for a scholarly API built from recorded responses.
///
/// Fixture file layout:
///   {"provider": "semantic_scholar" | "openalex",
///    "responses": [{"query": "...", "response": <verbatim API body>}, ...]}
///
/// A request whose query matches a recorded one (case/space-insensitive) gets
/// that body back verbatim. Any other query is answered from the union of
/// recorded items: an item qualifies when its title and abstract contain at
/// least half of the query's keywords, ranked by matched-keyword count.
class RecordedCorpusTransport final : public net::HttpTransport {
public:
    RecordedCorpusTransport(ScholarProvider provider, nlohmann::json fixture);
    static std::shared_ptr<RecordedCorpusTransport> from_file(const std::filesystem::path& path);

    net::HttpResponse send(const net::HttpRequest& request) override;
    ScholarProvider provider() const { return provider_; }

private:
    struct Recorded {
        std::string query;
        nlohmann::json response;
    };
    struct Item {
        nlohmann::json raw;
        std::vector<std::string> tokens;  // sorted unique tokens of title + abstract
    };

    nlohmann::json respond_from_corpus(const std::string& query, std::size_t limit) const;

    ScholarProvider provider_;
    std::vector<Recorded> recorded_;
    std::vector<Item> corpus_;
};

}  // namespace agora::knowledge
