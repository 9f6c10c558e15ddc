#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::forum {

enum class Section { Motivation, RelatedWork, Methods, PotentialOutcomes, Notes };

inline constexpr std::array<Section, 5> all_sections{Section::Motivation, Section::RelatedWork, Section::Methods,
                                                     Section::PotentialOutcomes, Section::Notes};

std::string_view to_string(Section section);
std::optional<Section> parse_section(std::string_view name);

class SectionUnknown : public std::invalid_argument {
public:
    explicit SectionUnknown(const std::string& name) : std::invalid_argument("unknown proposal section " + name) {}
};

/// The edit was based on a digest that is no longer current; rebase and retry.
class StaleEdit : public std::runtime_error {
public:
    StaleEdit(Section section, std::string current_digest)
        : std::runtime_error("stale edit of " + std::string(to_string(section))),
          section_(section),
          current_digest_(std::move(current_digest)) {}
    Section section() const noexcept { return section_; }
    const std::string& current_digest() const noexcept { return current_digest_; }

private:
    Section section_;
    std::string current_digest_;
};

struct Revision {
    std::uint64_t seq = 0;
    Section section = Section::Motivation;
    std::string before_digest;
    std::string after_digest;
    std::string after_text;  // kept so the history can be replayed
    std::uint64_t timestamp = 0;

    bool operator==(const Revision&) const = default;
};

std::string section_digest(std::string_view text);

/// Sectioned research proposal with an append-only, per-section hash-chained
/// revision log.
class ProposalDocument {
public:
    ProposalDocument() : ProposalDocument(std::map<Section, std::string>{}) {}
    explicit ProposalDocument(const std::map<Section, std::string>& initial);

    const std::string& text(Section section) const { return current_.at(section); }
    std::string digest(Section section) const { return section_digest(text(section)); }
    const std::map<Section, std::string>& sections() const { return current_; }
    const std::map<Section, std::string>& initial_sections() const { return initial_; }
    const std::vector<Revision>& revisions() const { return revisions_; }

    /// Appends a revision; nullopt when `new_text` equals the current text.
    /// A `base_digest` that differs from the current digest throws StaleEdit.
    std::optional<Revision> edit(Section section, const std::string& new_text, std::uint64_t timestamp,
                                 const std::optional<std::string>& base_digest = std::nullopt);

    bool operator==(const ProposalDocument&) const = default;

private:
    std::map<Section, std::string> initial_;
    std::map<Section, std::string> current_;
    std::vector<Revision> revisions_;
};

/// Throws SectionUnknown for a name outside the five sections.
std::optional<Revision> record_proposal_edit(ProposalDocument& doc, std::string_view section, const std::string& new_text,
                                             std::uint64_t timestamp,
                                             const std::optional<std::string>& base_digest = std::nullopt);

/// Quick note: appended to Notes on its own line.
std::optional<Revision> append_note(ProposalDocument& doc, const std::string& note, std::uint64_t timestamp);

/// Section texts obtained by replaying `revisions` over `initial`.
std::map<Section, std::string> replay_revisions(const std::map<Section, std::string>& initial,
                                                const std::vector<Revision>& revisions);

/// Chain breaks, seq gaps and replay mismatches; empty when consistent.
std::vector<std::string> check_revision_chain(const ProposalDocument& doc);

nlohmann::json to_json(const Revision& revision);
Revision revision_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProposalDocument& doc);
ProposalDocument proposal_from_json(const nlohmann::json& j);

/// Section texts keyed by section name; unknown names throw SectionUnknown.
std::map<Section, std::string> sections_from_json(const nlohmann::json& j);
nlohmann::json sections_to_json(const std::map<Section, std::string>& sections);

}  // namespace agora::forum
