#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace agora::service {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProviderSettings {
    std::string kind = "mock";  // mock | live
    std::string base_url = "https://api.openai.com";
    std::string model = "gpt-4o-mini";
    std::string api_key;
    std::uint32_t timeout_ms = 60000;
};

struct ScholarSettings {
    std::string mode = "fixtures";  // fixtures | live
    std::string fixtures_dir;
    std::string semantic_scholar_url = "https://api.semanticscholar.org";
    std::string semantic_scholar_key;
    std::string openalex_url = "https://api.openalex.org";
    std::string openalex_mailto;
    std::uint32_t timeout_ms = 10000;
    std::uint32_t min_interval_ms = 1000;
    std::size_t search_limit = 3;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8080;
    std::string data_dir;     // event logs; empty keeps everything in memory
    std::string persona_dir;  // persona catalog
    std::string auth_token;   // bearer token; empty disables auth
    std::string log_level = "info";
    ProviderSettings provider;
    ScholarSettings scholar;
    std::size_t responder_cap = 8;
    std::size_t tool_round_cap = 2;
    std::size_t distill_window = 10;
    std::size_t memory_k = 5;
    std::size_t max_snippets = 3;
    bool follow_on_round = false;
};

/// Defaults pointing the persona catalog and fixtures at `data_root`.
ServiceConfig default_config(const std::filesystem::path& data_root);

/// Overlays a YAML document on `base`. Unknown keys are rejected.
ServiceConfig config_from_yaml(const std::string& yaml, ServiceConfig base = {});
ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// AGORA_* variables (plus S2_API_KEY, OPENALEX_MAILTO, OPENAI_API_KEY)
/// override file settings.
void apply_env_overrides(ServiceConfig& config, const EnvLookup& lookup);
EnvLookup process_env();

/// Secrets are masked.
nlohmann::json to_json(const ServiceConfig& config);

}  // namespace agora::service
