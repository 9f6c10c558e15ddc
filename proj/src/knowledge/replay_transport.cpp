#include "agora/knowledge/replay_transport.hpp"

#include "agora/common/text.hpp"
#include "agora/knowledge/scholar.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace agora::knowledge {

namespace {

std::string normalize_query(std::string_view q) { return text::join(text::tokenize(q), " "); }

const char* items_field(ScholarProvider p) { return p == ScholarProvider::OpenAlex ? "results" : "data"; }

std::string item_identity(ScholarProvider p, const nlohmann::json& item) {
    return item.value(p == ScholarProvider::OpenAlex ? "id" : "paperId", std::string{});
}

std::string item_text(ScholarProvider p, const nlohmann::json& item) {
    std::string out = item.value("title", std::string{});
    if (p == ScholarProvider::OpenAlex) {
        if (item.contains("abstract_inverted_index")) {
            out += " " + OpenAlexClient::rebuild_abstract(item["abstract_inverted_index"]);
        }
    } else if (item.contains("abstract") && item["abstract"].is_string()) {
        out += " " + item["abstract"].get<std::string>();
    }
    return out;
}

nlohmann::json wrap(ScholarProvider p, nlohmann::json items) {
    const auto n = items.size();
    if (p == ScholarProvider::OpenAlex) return {{"meta", {{"count", n}}}, {"results", std::move(items)}};
    return {{"total", n}, {"offset", 0}, {"data", std::move(items)}};
}

}  // namespace

RecordedCorpusTransport::RecordedCorpusTransport(ScholarProvider provider, nlohmann::json fixture)
    : provider_(provider) {
    std::set<std::string> seen;
    for (const auto& r : fixture.at("responses")) {
        Recorded rec{normalize_query(r.at("query").get<std::string>()), r.at("response")};
        if (rec.response.contains(items_field(provider_))) {
            for (const auto& item : rec.response[items_field(provider_)]) {
                if (!seen.insert(item_identity(provider_, item)).second) continue;
                auto tokens = text::tokenize(item_text(provider_, item));
                std::sort(tokens.begin(), tokens.end());
                tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
                corpus_.push_back({item, std::move(tokens)});
            }
        }
        recorded_.push_back(std::move(rec));
    }
}

std::shared_ptr<RecordedCorpusTransport> RecordedCorpusTransport::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture " + path.string());
    auto fixture = nlohmann::json::parse(in);
    const auto provider = parse_provider(fixture.at("provider").get<std::string>());
    if (!provider || *provider == ScholarProvider::Manual) {
        throw std::runtime_error("fixture " + path.string() + " names no scholarly provider");
    }
    return std::make_shared<RecordedCorpusTransport>(*provider, std::move(fixture));
}

nlohmann::json RecordedCorpusTransport::respond_from_corpus(const std::string& query, std::size_t limit) const {
    auto wanted = text::keywords(query, 16);
    if (wanted.empty()) wanted = text::tokenize(query);
    const std::size_t needed = (wanted.size() + 1) / 2;

    std::vector<std::pair<std::size_t, std::size_t>> scored;  // (matches, corpus index)
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
        std::size_t matches = 0;
        for (const auto& w : wanted) {
            if (std::binary_search(corpus_[i].tokens.begin(), corpus_[i].tokens.end(), w)) ++matches;
        }
        if (matches > 0 && matches >= needed) scored.emplace_back(matches, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    auto items = nlohmann::json::array();
    for (std::size_t i = 0; i < scored.size() && i < limit; ++i) items.push_back(corpus_[scored[i].second].raw);
    return wrap(provider_, std::move(items));
}

net::HttpResponse RecordedCorpusTransport::send(const net::HttpRequest& request) {
    const bool openalex = provider_ == ScholarProvider::OpenAlex;
    const std::string expected_path = openalex ? "/works" : "/graph/v1/paper/search";
    if (request.path != expected_path) return {404, R"({"error":"not recorded"})"};

    const std::string query = request.param(openalex ? "search" : "query");
    std::size_t limit = 10;
    if (auto l = request.param(openalex ? "per-page" : "limit"); !l.empty()) limit = std::stoul(l);

    const auto key = normalize_query(query);
    for (const auto& rec : recorded_) {
        if (rec.query != key) continue;
        auto body = rec.response;
        auto& items = body[items_field(provider_)];
        if (items.size() > limit) items.erase(items.begin() + static_cast<std::ptrdiff_t>(limit), items.end());
        return {200, body.dump()};
    }
    return {200, respond_from_corpus(query, limit).dump()};
}

}  // namespace agora::knowledge
