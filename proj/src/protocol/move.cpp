#include "agora/protocol/move.hpp"

#include <stdexcept>

namespace agora::protocol {

ParentKind parent_kind_of(const DeliberationMove& parent) {
    if (!parent.act) return ParentKind::FreeText;
    return parent_kind_of(*parent.act);
}

void to_json(nlohmann::json& j, const Participant& p) {
    j = nlohmann::json{{"id", p.id}, {"kind", p.is_agent() ? "agent" : "human"}};
}

void from_json(const nlohmann::json& j, Participant& p) {
    p.id = j.at("id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "agent") {
        p.kind = ParticipantKind::Agent;
    } else if (kind == "human") {
        p.kind = ParticipantKind::Human;
    } else {
        throw std::invalid_argument("unknown participant kind: " + kind);
    }
}

void to_json(nlohmann::json& j, const DeliberationMove& m) {
    j = nlohmann::json{
        {"move_id", m.move_id},
        {"author", m.author},
        {"act", m.act ? nlohmann::json(std::string(to_string(*m.act))) : nlohmann::json(nullptr)},
        {"target", m.target ? nlohmann::json(*m.target) : nlohmann::json(nullptr)},
        {"body", m.body},
        {"rationale", m.rationale},
        {"citations", m.citations},
        {"tool_summary", m.tool_summary ? nlohmann::json(*m.tool_summary) : nlohmann::json(nullptr)},
        {"timestamp", m.timestamp},
    };
}

void from_json(const nlohmann::json& j, DeliberationMove& m) {
    m.move_id = j.at("move_id").get<std::string>();
    m.author = j.at("author").get<Participant>();
    m.act.reset();
    if (const auto& a = j.at("act"); !a.is_null()) {
        const auto name = a.get<std::string>();
        m.act = parse_act(name);
        if (!m.act) throw std::invalid_argument("unknown act: " + name);
    }
    m.target.reset();
    if (const auto& t = j.at("target"); !t.is_null()) m.target = t.get<std::string>();
    m.body = j.at("body").get<std::string>();
    m.rationale = j.value("rationale", std::string{});
    m.citations = j.value("citations", std::vector<std::string>{});
    m.tool_summary.reset();
    if (j.contains("tool_summary") && !j["tool_summary"].is_null()) {
        m.tool_summary = j["tool_summary"].get<std::string>();
    }
    m.timestamp = j.at("timestamp").get<std::uint64_t>();
}

}  // namespace agora::protocol
