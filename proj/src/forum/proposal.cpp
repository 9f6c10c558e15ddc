#include "agora/forum/proposal.hpp"

#include "agora/common/digest.hpp"

namespace agora::forum {

std::string_view to_string(Section section) {
    switch (section) {
    case Section::Motivation: return "Motivation";
    case Section::RelatedWork: return "RelatedWork";
    case Section::Methods: return "Methods";
    case Section::PotentialOutcomes: return "PotentialOutcomes";
    case Section::Notes: return "Notes";
    }
    return "?";
}

std::optional<Section> parse_section(std::string_view name) {
    for (Section s : all_sections) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string section_digest(std::string_view text) { return sha256_hex(text); }

ProposalDocument::ProposalDocument(const std::map<Section, std::string>& initial) {
    for (Section s : all_sections) {
        auto it = initial.find(s);
        initial_[s] = it == initial.end() ? std::string{} : it->second;
    }
    current_ = initial_;
}

std::optional<Revision> ProposalDocument::edit(Section section, const std::string& new_text, std::uint64_t timestamp,
                                               const std::optional<std::string>& base_digest) {
    const std::string before = digest(section);
    if (base_digest && *base_digest != before) throw StaleEdit(section, before);
    if (new_text == current_[section]) return std::nullopt;

    Revision r{revisions_.size() + 1, section, before, section_digest(new_text), new_text, timestamp};
    current_[section] = new_text;
    revisions_.push_back(r);
    return r;
}

std::optional<Revision> record_proposal_edit(ProposalDocument& doc, std::string_view section, const std::string& new_text,
                                             std::uint64_t timestamp, const std::optional<std::string>& base_digest) {
    const auto s = parse_section(section);
    if (!s) throw SectionUnknown(std::string(section));
    return doc.edit(*s, new_text, timestamp, base_digest);
}

std::optional<Revision> append_note(ProposalDocument& doc, const std::string& note, std::uint64_t timestamp) {
    const std::string& notes = doc.text(Section::Notes);
    return doc.edit(Section::Notes, notes.empty() ? note : notes + "\n" + note, timestamp);
}

std::map<Section, std::string> replay_revisions(const std::map<Section, std::string>& initial,
                                                const std::vector<Revision>& revisions) {
    auto sections = ProposalDocument(initial).sections();
    for (const auto& r : revisions) sections[r.section] = r.after_text;
    return sections;
}

std::vector<std::string> check_revision_chain(const ProposalDocument& doc) {
    std::vector<std::string> problems;
    std::map<Section, std::string> heads;
    for (Section s : all_sections) {
        auto it = doc.initial_sections().find(s);
        heads[s] = section_digest(it == doc.initial_sections().end() ? std::string{} : it->second);
    }
    std::uint64_t expected_seq = 1;
    for (const auto& r : doc.revisions()) {
        const std::string where = "revision " + std::to_string(r.seq);
        if (r.seq != expected_seq++) problems.push_back(where + ": sequence gap");
        if (r.before_digest != heads[r.section]) problems.push_back(where + ": before-digest breaks the chain");
        if (r.after_digest != section_digest(r.after_text)) problems.push_back(where + ": after-digest mismatch");
        heads[r.section] = r.after_digest;
    }
    if (replay_revisions(doc.initial_sections(), doc.revisions()) != doc.sections()) {
        problems.push_back("replaying revisions does not reproduce the current text");
    }
    return problems;
}

nlohmann::json to_json(const Revision& r) {
    return {{"seq", r.seq},
            {"section", to_string(r.section)},
            {"before_digest", r.before_digest},
            {"after_digest", r.after_digest},
            {"after_text", r.after_text},
            {"timestamp", r.timestamp}};
}

Revision revision_from_json(const nlohmann::json& j) {
    const auto name = j.at("section").get<std::string>();
    const auto s = parse_section(name);
    if (!s) throw SectionUnknown(name);
    return {j.at("seq").get<std::uint64_t>(),      *s,
            j.at("before_digest").get<std::string>(), j.at("after_digest").get<std::string>(),
            j.at("after_text").get<std::string>(),    j.value("timestamp", std::uint64_t{0})};
}

std::map<Section, std::string> sections_from_json(const nlohmann::json& j) {
    std::map<Section, std::string> out;
    if (j.is_null()) return out;
    for (const auto& [name, text] : j.items()) {
        const auto s = parse_section(name);
        if (!s) throw SectionUnknown(name);
        out[*s] = text.get<std::string>();
    }
    return out;
}

nlohmann::json sections_to_json(const std::map<Section, std::string>& sections) {
    auto j = nlohmann::json::object();
    for (const auto& [s, text] : sections) j[std::string(to_string(s))] = text;
    return j;
}

nlohmann::json to_json(const ProposalDocument& doc) {
    auto revisions = nlohmann::json::array();
    for (const auto& r : doc.revisions()) revisions.push_back(to_json(r));
    return {{"initial", sections_to_json(doc.initial_sections())},
            {"sections", sections_to_json(doc.sections())},
            {"revisions", revisions}};
}

ProposalDocument proposal_from_json(const nlohmann::json& j) {
    ProposalDocument doc(sections_from_json(j.at("initial")));
    for (const auto& r : j.value("revisions", nlohmann::json::array())) {
        const Revision rev = revision_from_json(r);
        const auto applied = doc.edit(rev.section, rev.after_text, rev.timestamp, rev.before_digest);
        if (!applied || *applied != rev) throw std::invalid_argument("proposal revision log is inconsistent");
    }
    return doc;
}

}  // namespace agora::forum
