#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agora::service {

enum class EventKind {
    ProjectCreated,
    ThreadCreated,
    MovePosted,
    ProposalEdited,
    PersonaEdited,
    MemoryDistilled,
    PaperInserted,
    CommitmentStatusChanged,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

/// One accepted state change. `seq` is gapless per project, starting at 1.
struct Event {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ProjectCreated;
    nlohmann::json payload;
    std::uint64_t at = 0;

    bool operator==(const Event&) const = default;
};

nlohmann::json to_json(const Event& event);
/// Throws CorruptPayload.
Event event_from_json(const nlohmann::json& j);

class GapInLog : public std::runtime_error {
public:
    GapInLog(std::uint64_t expected, std::uint64_t got)
        : std::runtime_error("event log gap: expected seq " + std::to_string(expected) + ", got " + std::to_string(got)) {}
};

class CorruptPayload : public std::runtime_error {
public:
    CorruptPayload(std::uint64_t seq, const std::string& what)
        : std::runtime_error("corrupt event " + std::to_string(seq) + ": " + what), seq_(seq) {}
    std::uint64_t seq() const noexcept { return seq_; }

private:
    std::uint64_t seq_;
};

/// Append-only per-project event storage.
class EventStore {
public:
    virtual ~EventStore() = default;
    virtual void append(const std::string& project_id, const Event& event) = 0;
    virtual std::vector<Event> load(const std::string& project_id) const = 0;
    virtual std::vector<std::string> projects() const = 0;
};

class MemoryEventStore final : public EventStore {
public:
    void append(const std::string& project_id, const Event& event) override;
    std::vector<Event> load(const std::string& project_id) const override;
    std::vector<std::string> projects() const override;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<Event>> logs_;
};

/// One JSONL file per project under `dir`. A trailing line without its
/// newline is a torn write and is skipped on load.
class FileEventStore final : public EventStore {
public:
    explicit FileEventStore(std::filesystem::path dir);
    void append(const std::string& project_id, const Event& event) override;
    std::vector<Event> load(const std::string& project_id) const override;
    std::vector<std::string> projects() const override;

    std::filesystem::path path_for(const std::string& project_id) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

std::string events_to_jsonl(const std::vector<Event>& events);
/// Strict: every non-empty line must be a complete event.
std::vector<Event> events_from_jsonl(std::string_view text);

}  // namespace agora::service
