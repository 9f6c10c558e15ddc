#include "agora/protocol/transcript.hpp"

#include <sstream>

namespace agora::protocol {

namespace {

nlohmann::json status_record(const StatusChange& s) {
    return {{"type", "commitment_status"},
            {"owner", s.owner},
            {"source_move", s.source_move},
            {"status", to_string(s.status)}};
}

}  // namespace

std::string export_transcript(const ThreadState& state) {
    std::ostringstream out;
    out << nlohmann::json{{"type", "thread"}, {"thread_id", state.thread_id()}, {"format", 1}}.dump() << '\n';
    const auto& log = state.status_log();
    std::size_t next_status = 0;
    const auto flush_status = [&](std::size_t applied) {
        while (next_status < log.size() && log[next_status].after_moves == applied) {
            out << status_record(log[next_status++]).dump() << '\n';
        }
    };
    flush_status(0);
    std::size_t applied = 0;
    for (const auto& m : state.moves()) {
        nlohmann::json j = m;
        j["type"] = "move";
        out << j.dump() << '\n';
        flush_status(++applied);
    }
    return out.str();
}

ThreadState import_transcript(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::optional<ThreadState> state;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw TranscriptError(line_no, std::string("invalid JSON: ") + e.what());
        }
        const auto type = j.value("type", std::string{});
        try {
            if (type == "thread") {
                if (state) throw TranscriptError(line_no, "duplicate thread header");
                state.emplace(j.at("thread_id").get<std::string>());
                continue;
            }
            if (!state) throw TranscriptError(line_no, "missing thread header");
            if (type == "move") {
                state->apply(j.get<DeliberationMove>());
            } else if (type == "commitment_status") {
                const auto status = parse_commitment_status(j.at("status").get<std::string>());
                if (!status) throw TranscriptError(line_no, "unknown commitment status");
                state->set_commitment_status(j.at("owner").get<std::string>(),
                                             j.at("source_move").get<std::string>(), *status);
            } else {
                throw TranscriptError(line_no, "unknown record type '" + type + "'");
            }
        } catch (const ProtocolError& e) {
            throw TranscriptError(line_no, e.what());
        } catch (const nlohmann::json::exception& e) {
            throw TranscriptError(line_no, std::string("bad record: ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw TranscriptError(line_no, std::string("bad record: ") + e.what());
        }
    }
    if (!state) throw TranscriptError(line_no, "empty transcript");
    return std::move(*state);
}

}  // namespace agora::protocol
