#include "agora/agent/persona.hpp"

#include "agora/common/digest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace agora::agent {

std::string_view to_string(AudienceExpertise level) {
    switch (level) {
    case AudienceExpertise::Novice: return "novice";
    case AudienceExpertise::Intermediate: return "intermediate";
    case AudienceExpertise::Expert: return "expert";
    }
    return "?";
}

std::optional<AudienceExpertise> parse_audience_expertise(std::string_view name) {
    for (auto l : {AudienceExpertise::Novice, AudienceExpertise::Intermediate, AudienceExpertise::Expert}) {
        if (to_string(l) == name) return l;
    }
    return std::nullopt;
}

std::string AgentPersona::display_name() const {
    std::string out = agent_id;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

namespace {

YAML::Node require_group(const YAML::Node& root, const char* name) {
    const YAML::Node group = root[name];
    if (!group || !group.IsMap()) throw PersonaError(std::string("persona is missing group '") + name + "'");
    return group;
}

std::string scalar(const YAML::Node& group, const char* field) {
    const YAML::Node n = group[field];
    if (!n || n.IsNull()) return {};
    if (n.IsSequence()) {
        std::string out;
        for (const auto& item : n) {
            if (!out.empty()) out += "; ";
            out += item.as<std::string>();
        }
        return out;
    }
    return n.as<std::string>();
}

std::vector<std::string> list(const YAML::Node& group, const char* field) {
    const YAML::Node n = group[field];
    std::vector<std::string> out;
    if (!n || n.IsNull()) return out;
    if (n.IsSequence()) {
        for (const auto& item : n) out.push_back(item.as<std::string>());
    } else {
        out.push_back(n.as<std::string>());
    }
    return out;
}

}  // namespace

AgentPersona parse_persona_yaml(const std::string& text, const std::string& fallback_id) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw PersonaError(std::string("persona is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw PersonaError("persona document must be a mapping");

    AgentPersona p;
    p.agent_id = root["agent_id"] ? root["agent_id"].as<std::string>() : fallback_id;
    if (p.agent_id.empty()) throw PersonaError("persona has no agent_id");

    const auto basic = require_group(root, "basic_info");
    p.basic_info = {scalar(basic, "research_area"), scalar(basic, "short_bio")};

    const auto focus = require_group(root, "research_and_professional_focus");
    p.research_and_professional_focus = {list(focus, "focus_areas"), scalar(focus, "methodology"),
                                         list(focus, "publication_channels")};

    const auto skills = require_group(root, "skills_and_expertise");
    p.skills_and_expertise = {list(skills, "technical_skills"), list(skills, "analytical_skills"),
                              list(skills, "domain_expertise")};

    const auto traits = require_group(root, "personalities_and_characteristics");
    p.personalities_and_characteristics.communication_style = scalar(traits, "communication_style");
    const auto level = scalar(traits, "audience_expertise_level");
    const auto parsed = parse_audience_expertise(level);
    if (!parsed) throw PersonaError("audience_expertise_level must be novice|intermediate|expert, got '" + level + "'");
    p.personalities_and_characteristics.audience_expertise_level = *parsed;
    return p;
}

std::string to_yaml(const AgentPersona& p) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "agent_id" << YAML::Value << p.agent_id;
    out << YAML::Key << "basic_info" << YAML::Value << YAML::BeginMap
        << YAML::Key << "research_area" << YAML::Value << p.basic_info.research_area
        << YAML::Key << "short_bio" << YAML::Value << p.basic_info.short_bio << YAML::EndMap;
    const auto& f = p.research_and_professional_focus;
    out << YAML::Key << "research_and_professional_focus" << YAML::Value << YAML::BeginMap
        << YAML::Key << "focus_areas" << YAML::Value << f.focus_areas
        << YAML::Key << "methodology" << YAML::Value << f.methodology
        << YAML::Key << "publication_channels" << YAML::Value << f.publication_channels << YAML::EndMap;
    const auto& s = p.skills_and_expertise;
    out << YAML::Key << "skills_and_expertise" << YAML::Value << YAML::BeginMap
        << YAML::Key << "technical_skills" << YAML::Value << s.technical_skills
        << YAML::Key << "analytical_skills" << YAML::Value << s.analytical_skills
        << YAML::Key << "domain_expertise" << YAML::Value << s.domain_expertise << YAML::EndMap;
    const auto& c = p.personalities_and_characteristics;
    out << YAML::Key << "personalities_and_characteristics" << YAML::Value << YAML::BeginMap
        << YAML::Key << "communication_style" << YAML::Value << c.communication_style
        << YAML::Key << "audience_expertise_level" << YAML::Value << std::string(to_string(c.audience_expertise_level))
        << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void to_json(nlohmann::json& j, const AgentPersona& p) {
    const auto& f = p.research_and_professional_focus;
    const auto& s = p.skills_and_expertise;
    const auto& c = p.personalities_and_characteristics;
    j = nlohmann::json{
        {"agent_id", p.agent_id},
        {"basic_info", {{"research_area", p.basic_info.research_area}, {"short_bio", p.basic_info.short_bio}}},
        {"research_and_professional_focus",
         {{"focus_areas", f.focus_areas}, {"methodology", f.methodology}, {"publication_channels", f.publication_channels}}},
        {"skills_and_expertise",
         {{"technical_skills", s.technical_skills},
          {"analytical_skills", s.analytical_skills},
          {"domain_expertise", s.domain_expertise}}},
        {"personalities_and_characteristics",
         {{"communication_style", c.communication_style},
          {"audience_expertise_level", to_string(c.audience_expertise_level)}}},
    };
}

void from_json(const nlohmann::json& j, AgentPersona& p) {
    const auto group = [&](const char* name) -> const nlohmann::json& {
        if (!j.contains(name) || !j[name].is_object()) {
            throw PersonaError(std::string("persona is missing group '") + name + "'");
        }
        return j[name];
    };
    p.agent_id = j.at("agent_id").get<std::string>();
    const auto& b = group("basic_info");
    p.basic_info = {b.value("research_area", ""), b.value("short_bio", "")};
    const auto& f = group("research_and_professional_focus");
    p.research_and_professional_focus = {f.value("focus_areas", std::vector<std::string>{}), f.value("methodology", ""),
                                         f.value("publication_channels", std::vector<std::string>{})};
    const auto& s = group("skills_and_expertise");
    p.skills_and_expertise = {s.value("technical_skills", std::vector<std::string>{}),
                              s.value("analytical_skills", std::vector<std::string>{}),
                              s.value("domain_expertise", std::vector<std::string>{})};
    const auto& c = group("personalities_and_characteristics");
    p.personalities_and_characteristics.communication_style = c.value("communication_style", "");
    const auto level = parse_audience_expertise(c.value("audience_expertise_level", ""));
    if (!level) throw PersonaError("audience_expertise_level must be novice|intermediate|expert");
    p.personalities_and_characteristics.audience_expertise_level = *level;
}

std::string persona_digest(const AgentPersona& persona) { return sha256_hex(nlohmann::json(persona).dump()); }

std::map<std::string, AgentPersona> load_persona_catalog(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw PersonaError("persona catalog " + dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, AgentPersona> catalog;
    for (const auto& path : files) {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        auto persona = parse_persona_yaml(buf.str(), path.stem().string());
        const auto id = persona.agent_id;
        if (!catalog.emplace(id, std::move(persona)).second) throw PersonaError("duplicate persona id " + id);
    }
    return catalog;
}

}  // namespace agora::agent
