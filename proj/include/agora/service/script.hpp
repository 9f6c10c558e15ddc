#pragma once

#include "agora/service/service.hpp"

#include <filesystem>
#include <stdexcept>

// Scripted sessions. A script is a JSON object:
//
//   {"title": "...", "proposal": {"Motivation": "...", ...},
//    "roster": ["HCI_Researcher", ...], "user": "user",
//    "steps": [{"action": "create_thread", "as": "t", "title": "..."},
//              {"action": "reply", "parent": "t", "text": "@HCI_Researcher ...", "as": "r",
//               "expect": {"responders": ["HCI_Researcher"]}}, ...]}
//
// Actions: create_thread, suggest_threads, reply, what_if, branch,
// edit_proposal, quick_note, set_status. Steps may bind a name with "as";
// references name an earlier binding: a thread name means its root move, a
// reply name its human move, and "name.k" the k-th agent move it triggered.
namespace agora::service {

/// The script is malformed or references something not yet defined.
class ScriptError : public std::runtime_error {
public:
    ScriptError(std::size_t step, const std::string& what)
        : std::runtime_error("script step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// An "expect" hook did not hold.
class AssertionFailed : public std::runtime_error {
public:
    AssertionFailed(std::size_t step, const std::string& what)
        : std::runtime_error("assertion failed at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

struct ScriptResult {
    std::string project_id;
    std::string transcript;  // every thread's transcript, in thread order
    std::string digest;      // final state digest
    std::vector<Event> events;
    nlohmann::json steps = nlohmann::json::array();  // per-step record
};

struct ScriptOptions {
    ServiceConfig config;
    std::shared_ptr<agent::LanguageModelProvider> provider;  // null means mock
    std::vector<std::shared_ptr<knowledge::ScholarClient>> scholars;
    std::map<std::string, agent::AgentPersona> catalog;
};

/// Checks actions, required fields and references without running anything.
void validate_script(const nlohmann::json& script);

/// Runs on a fresh in-memory service with a logical clock.
ScriptResult run_script(const nlohmann::json& script, const ScriptOptions& options);

/// Runs `script` on `service`, which must be empty or already hold the project.
ScriptResult run_script_on(DeliberationService& service, const nlohmann::json& script);

nlohmann::json load_script(const std::filesystem::path& path);

}  // namespace agora::service
