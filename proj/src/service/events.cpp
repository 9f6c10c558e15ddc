#include "agora/service/events.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace agora::service {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::ProjectCreated: return "project_created";
    case EventKind::ThreadCreated: return "thread_created";
    case EventKind::MovePosted: return "move_posted";
    case EventKind::ProposalEdited: return "proposal_edited";
    case EventKind::PersonaEdited: return "persona_edited";
    case EventKind::MemoryDistilled: return "memory_distilled";
    case EventKind::PaperInserted: return "paper_inserted";
    case EventKind::CommitmentStatusChanged: return "commitment_status_changed";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
    for (auto k : {EventKind::ProjectCreated, EventKind::ThreadCreated, EventKind::MovePosted, EventKind::ProposalEdited,
                   EventKind::PersonaEdited, EventKind::MemoryDistilled, EventKind::PaperInserted,
                   EventKind::CommitmentStatusChanged}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

nlohmann::json to_json(const Event& e) {
    return {{"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}, {"at", e.at}};
}

Event event_from_json(const nlohmann::json& j) {
    const std::uint64_t seq = j.is_object() ? j.value("seq", std::uint64_t{0}) : 0;
    try {
        const auto kind = parse_event_kind(j.at("kind").get<std::string>());
        if (!kind) throw CorruptPayload(seq, "unknown event kind");
        if (!j.at("payload").is_object()) throw CorruptPayload(seq, "payload is not an object");
        return {j.at("seq").get<std::uint64_t>(), *kind, j.at("payload"), j.value("at", std::uint64_t{0})};
    } catch (const nlohmann::json::exception& e) {
        throw CorruptPayload(seq, e.what());
    }
}

void MemoryEventStore::append(const std::string& project_id, const Event& event) {
    std::lock_guard lock(mutex_);
    logs_[project_id].push_back(event);
}

std::vector<Event> MemoryEventStore::load(const std::string& project_id) const {
    std::lock_guard lock(mutex_);
    auto it = logs_.find(project_id);
    return it == logs_.end() ? std::vector<Event>{} : it->second;
}

std::vector<std::string> MemoryEventStore::projects() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : logs_) out.push_back(id);
    return out;
}

FileEventStore::FileEventStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path FileEventStore::path_for(const std::string& project_id) const {
    return dir_ / (project_id + ".jsonl");
}

void FileEventStore::append(const std::string& project_id, const Event& event) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_for(project_id), std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open event log for " + project_id);
    out << to_json(event).dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed to write event log for " + project_id);
}

std::vector<Event> FileEventStore::load(const std::string& project_id) const {
    std::lock_guard lock(mutex_);
    std::ifstream in(path_for(project_id), std::ios::binary);
    if (!in) return {};
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (!text.empty() && text.back() != '\n') {
        const auto cut = text.rfind('\n');
        spdlog::warn("event log {}: dropping torn trailing write", project_id);
        text.erase(cut == std::string::npos ? 0 : cut + 1);
    }
    return events_from_jsonl(text);
}

std::vector<std::string> FileEventStore::projects() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string events_to_jsonl(const std::vector<Event>& events) {
    std::string out;
    for (const auto& e : events) out += to_json(e).dump() + "\n";
    return out;
}

std::vector<Event> events_from_jsonl(std::string_view text) {
    std::vector<Event> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw CorruptPayload(out.empty() ? 0 : out.back().seq + 1, e.what());
        }
        out.push_back(event_from_json(j));
    }
    return out;
}

}  // namespace agora::service
