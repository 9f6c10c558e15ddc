#include "agora/service/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace agora::service {

ServiceConfig default_config(const std::filesystem::path& data_root) {
    ServiceConfig c;
    c.persona_dir = (data_root / "personas").string();
    c.scholar.fixtures_dir = (data_root / "fixtures" / "scholar").string();
    return c;
}

namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError("unknown config key " + where + key);
    }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
    if (node[key]) out = node[key].as<T>();
}

std::size_t parse_size(const std::string& name, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size() || v < 0) throw std::invalid_argument(value);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(name + " must be a non-negative integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& name, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError(name + " must be a boolean, got '" + value + "'");
}

void validate(const ServiceConfig& c) {
    if (c.provider.kind != "mock" && c.provider.kind != "live") throw ConfigError("provider.kind must be mock or live");
    if (c.scholar.mode != "fixtures" && c.scholar.mode != "live") throw ConfigError("scholar.mode must be fixtures or live");
    if (c.responder_cap == 0) throw ConfigError("responder_cap must be at least 1");
    if (c.distill_window == 0) throw ConfigError("distill_window must be at least 1");
    if (c.scholar.search_limit == 0) throw ConfigError("scholar.search_limit must be at least 1");
}

}  // namespace

ServiceConfig config_from_yaml(const std::string& yaml, ServiceConfig c) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (root.IsNull()) return c;
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");
    try {
        check_keys(root, {"host", "port", "data_dir", "persona_dir", "auth_token", "log_level", "provider", "scholar",
                          "responder_cap", "tool_round_cap", "distill_window", "memory_k", "max_snippets",
                          "follow_on_round"},
                   "");
        read(root, "host", c.host);
        read(root, "port", c.port);
        read(root, "data_dir", c.data_dir);
        read(root, "persona_dir", c.persona_dir);
        read(root, "auth_token", c.auth_token);
        read(root, "log_level", c.log_level);
        read(root, "responder_cap", c.responder_cap);
        read(root, "tool_round_cap", c.tool_round_cap);
        read(root, "distill_window", c.distill_window);
        read(root, "memory_k", c.memory_k);
        read(root, "max_snippets", c.max_snippets);
        read(root, "follow_on_round", c.follow_on_round);
        if (const auto p = root["provider"]) {
            check_keys(p, {"kind", "base_url", "model", "api_key", "timeout_ms"}, "provider.");
            read(p, "kind", c.provider.kind);
            read(p, "base_url", c.provider.base_url);
            read(p, "model", c.provider.model);
            read(p, "api_key", c.provider.api_key);
            read(p, "timeout_ms", c.provider.timeout_ms);
        }
        if (const auto s = root["scholar"]) {
            check_keys(s, {"mode", "fixtures_dir", "semantic_scholar_url", "semantic_scholar_key", "openalex_url",
                           "openalex_mailto", "timeout_ms", "min_interval_ms", "search_limit"},
                       "scholar.");
            read(s, "mode", c.scholar.mode);
            read(s, "fixtures_dir", c.scholar.fixtures_dir);
            read(s, "semantic_scholar_url", c.scholar.semantic_scholar_url);
            read(s, "semantic_scholar_key", c.scholar.semantic_scholar_key);
            read(s, "openalex_url", c.scholar.openalex_url);
            read(s, "openalex_mailto", c.scholar.openalex_mailto);
            read(s, "timeout_ms", c.scholar.timeout_ms);
            read(s, "min_interval_ms", c.scholar.min_interval_ms);
            read(s, "search_limit", c.scholar.search_limit);
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    validate(c);
    return c;
}

ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_yaml(buf.str(), std::move(base));
}

void apply_env_overrides(ServiceConfig& c, const EnvLookup& lookup) {
    const auto str = [&](const char* name, std::string& out) {
        if (auto v = lookup(name)) out = *v;
    };
    const auto size = [&](const char* name, std::size_t& out) {
        if (auto v = lookup(name)) out = parse_size(name, *v);
    };
    str("AGORA_HOST", c.host);
    if (auto v = lookup("AGORA_PORT")) {
        const auto port = parse_size("AGORA_PORT", *v);
        if (port > 65535) throw ConfigError("AGORA_PORT out of range");
        c.port = static_cast<std::uint16_t>(port);
    }
    str("AGORA_DATA_DIR", c.data_dir);
    str("AGORA_PERSONA_DIR", c.persona_dir);
    str("AGORA_AUTH_TOKEN", c.auth_token);
    str("AGORA_LOG_LEVEL", c.log_level);
    str("AGORA_PROVIDER", c.provider.kind);
    str("AGORA_LLM_BASE_URL", c.provider.base_url);
    str("AGORA_LLM_MODEL", c.provider.model);
    str("OPENAI_API_KEY", c.provider.api_key);
    str("AGORA_LLM_API_KEY", c.provider.api_key);
    str("AGORA_SCHOLAR_MODE", c.scholar.mode);
    str("AGORA_FIXTURES_DIR", c.scholar.fixtures_dir);
    str("AGORA_S2_URL", c.scholar.semantic_scholar_url);
    str("S2_API_KEY", c.scholar.semantic_scholar_key);
    str("AGORA_OPENALEX_URL", c.scholar.openalex_url);
    str("OPENALEX_MAILTO", c.scholar.openalex_mailto);
    size("AGORA_RESPONDER_CAP", c.responder_cap);
    size("AGORA_TOOL_ROUND_CAP", c.tool_round_cap);
    size("AGORA_DISTILL_WINDOW", c.distill_window);
    size("AGORA_MEMORY_K", c.memory_k);
    if (auto v = lookup("AGORA_FOLLOW_ON_ROUND")) c.follow_on_round = parse_bool("AGORA_FOLLOW_ON_ROUND", *v);
    validate(c);
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v) return std::nullopt;
        return std::string(v);
    };
}

nlohmann::json to_json(const ServiceConfig& c) {
    const auto mask = [](const std::string& s) { return s.empty() ? std::string{} : std::string("***"); };
    return {{"host", c.host},
            {"port", c.port},
            {"data_dir", c.data_dir},
            {"persona_dir", c.persona_dir},
            {"auth_token", mask(c.auth_token)},
            {"log_level", c.log_level},
            {"provider", {{"kind", c.provider.kind}, {"base_url", c.provider.base_url}, {"model", c.provider.model},
                          {"api_key", mask(c.provider.api_key)}, {"timeout_ms", c.provider.timeout_ms}}},
            {"scholar", {{"mode", c.scholar.mode}, {"fixtures_dir", c.scholar.fixtures_dir},
                         {"semantic_scholar_url", c.scholar.semantic_scholar_url},
                         {"semantic_scholar_key", mask(c.scholar.semantic_scholar_key)},
                         {"openalex_url", c.scholar.openalex_url}, {"openalex_mailto", c.scholar.openalex_mailto},
                         {"timeout_ms", c.scholar.timeout_ms}, {"min_interval_ms", c.scholar.min_interval_ms},
                         {"search_limit", c.scholar.search_limit}}},
            {"responder_cap", c.responder_cap},
            {"tool_round_cap", c.tool_round_cap},
            {"distill_window", c.distill_window},
            {"memory_k", c.memory_k},
            {"max_snippets", c.max_snippets},
            {"follow_on_round", c.follow_on_round}};
}

}  // namespace agora::service
