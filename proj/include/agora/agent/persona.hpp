#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::agent {

enum class AudienceExpertise { Novice, Intermediate, Expert };

std::string_view to_string(AudienceExpertise level);
std::optional<AudienceExpertise> parse_audience_expertise(std::string_view name);

struct BasicInfo {
    std::string research_area;
    std::string short_bio;
    bool operator==(const BasicInfo&) const = default;
};

struct ResearchAndProfessionalFocus {
    std::vector<std::string> focus_areas;
    std::string methodology;
    std::vector<std::string> publication_channels;
    bool operator==(const ResearchAndProfessionalFocus&) const = default;
};

struct SkillsAndExpertise {
    std::vector<std::string> technical_skills;
    std::vector<std::string> analytical_skills;
    std::vector<std::string> domain_expertise;
    bool operator==(const SkillsAndExpertise&) const = default;
};

struct PersonalitiesAndCharacteristics {
    std::string communication_style;
    AudienceExpertise audience_expertise_level = AudienceExpertise::Intermediate;
    bool operator==(const PersonalitiesAndCharacteristics&) const = default;
};

/// Expert profile conditioning an agent. Group and field names follow the
/// persona file schema verbatim.
struct AgentPersona {
    std::string agent_id;  // underscore-joined handle, e.g. HCI_Researcher
    BasicInfo basic_info;
    ResearchAndProfessionalFocus research_and_professional_focus;
    SkillsAndExpertise skills_and_expertise;
    PersonalitiesAndCharacteristics personalities_and_characteristics;

    std::string display_name() const;
    bool operator==(const AgentPersona&) const = default;
};

class PersonaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a persona document. `agent_id` may come from the document or,
/// failing that, from `fallback_id` (the file stem).
AgentPersona parse_persona_yaml(const std::string& text, const std::string& fallback_id = {});
std::string to_yaml(const AgentPersona& persona);

void to_json(nlohmann::json& j, const AgentPersona& p);
void from_json(const nlohmann::json& j, AgentPersona& p);

std::string persona_digest(const AgentPersona& persona);

/// Every *.yaml / *.yml file in `dir`, keyed by agent_id. Duplicate ids throw.
std::map<std::string, AgentPersona> load_persona_catalog(const std::filesystem::path& dir);

}  // namespace agora::agent
