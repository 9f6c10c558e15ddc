#pragma once

#include "agora/protocol/thread_state.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

// Line-delimited JSON transcript of one thread:
//
//   {"type":"thread","thread_id":"t1","format":1}
//   {"type":"move", ...all DeliberationMove fields...}
//   {"type":"commitment_status","owner":...,"source_move":...,"status":"conceded"}
//
// Status records appear after the move count at which they were applied, so
// replaying a transcript reproduces the exact ThreadState.
namespace agora::protocol {

class TranscriptError : public std::runtime_error {
public:
    TranscriptError(std::size_t line, const std::string& what)
        : std::runtime_error("transcript line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

std::string export_transcript(const ThreadState& state);

/// Replays through validate/apply; throws TranscriptError (wrapping protocol
/// violations with the offending line).
ThreadState import_transcript(std::string_view text);

}  // namespace agora::protocol
