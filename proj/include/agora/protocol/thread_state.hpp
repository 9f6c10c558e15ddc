#pragma once

#include "agora/protocol/move.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace agora::protocol {

enum class CommitmentStatus { Active, Conceded, Retracted };

std::string_view to_string(CommitmentStatus status);
std::optional<CommitmentStatus> parse_commitment_status(std::string_view name);

/// A proposition the owner committed to defend. Identity is the source move.
struct Commitment {
    MoveId source_move;
    std::string text;
    CommitmentStatus status = CommitmentStatus::Active;

    bool operator==(const Commitment&) const = default;
};

struct CommitmentStore {
    std::string owner;
    std::vector<Commitment> commitments;  // in source-move order

    std::size_t active_count() const;
    const Commitment* find(const MoveId& source_move) const;
    bool operator==(const CommitmentStore&) const = default;
};

/// A QUESTION or REBUT obliges the author of the challenged move to answer
/// with a SUPPORT.
struct Challenge {
    MoveId challenge_move;
    MoveId challenged_move;
    std::string burden_holder;
    std::optional<MoveId> resolved_by;

    bool operator==(const Challenge&) const = default;
};

/// Administrative concede/retract, positioned after `after_moves` moves.
struct StatusChange {
    std::size_t after_moves = 0;
    std::string owner;
    MoveId source_move;
    CommitmentStatus status = CommitmentStatus::Active;

    bool operator==(const StatusChange&) const = default;
};

enum class ProtocolErrorKind {
    UnknownTarget,
    IllegalActForTarget,
    RootMustBeIssue,
    SelfRebuttal,
    DuplicateMove,
    MalformedMove,
    UnknownCommitment,
    IllegalStatusTransition,
};

std::string_view to_string(ProtocolErrorKind kind);

struct ProtocolViolation {
    ProtocolErrorKind kind;
    std::string detail;
};

class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(ProtocolViolation violation);
    const ProtocolViolation& violation() const noexcept { return violation_; }
    ProtocolErrorKind kind() const noexcept { return violation_.kind; }

private:
    ProtocolViolation violation_;
};

class ThreadState {
public:
    ThreadState() = default;
    explicit ThreadState(std::string thread_id) : thread_id_(std::move(thread_id)) {}

    const std::string& thread_id() const { return thread_id_; }
    std::span<const DeliberationMove> moves() const { return moves_; }
    bool empty() const { return moves_.empty(); }
    const DeliberationMove* find(const MoveId& id) const;
    const DeliberationMove* root() const { return moves_.empty() ? nullptr : &moves_.front(); }

    const std::map<std::string, CommitmentStore>& stores() const { return stores_; }
    const std::vector<Challenge>& challenges() const { return challenges_; }
    std::vector<Challenge> open_challenges() const;
    const std::vector<StatusChange>& status_log() const { return status_log_; }

    /// Validates then applies; throws ProtocolError.
    void apply(const DeliberationMove& move);

    /// Moves an active commitment to conceded or retracted; never back.
    void set_commitment_status(const std::string& owner, const MoveId& source_move, CommitmentStatus status);

    bool operator==(const ThreadState& other) const;

private:
    std::string thread_id_;
    std::vector<DeliberationMove> moves_;
    std::unordered_map<MoveId, std::size_t> index_;
    std::map<std::string, CommitmentStore> stores_;
    std::vector<Challenge> challenges_;
    std::vector<StatusChange> status_log_;
};

/// ok (nullopt) or the first violated rule.
std::optional<ProtocolViolation> validate_move(const ThreadState& state, const DeliberationMove& move);

/// Returns the successor state; throws ProtocolError if the move is illegal.
ThreadState apply_move(ThreadState state, const DeliberationMove& move);

/// Empty for an unknown participant.
std::vector<Commitment> commitments_of(const ThreadState& state, const std::string& who);

/// Acts `author` could legally use replying to `parent` in `state`.
std::vector<Act> permitted_acts(const ThreadState& state, const MoveId& parent, const Participant& author);

/// True when walking up from `support`'s target through SUPPORT moves reaches
/// the challenge move or the move it challenged.
bool answers_challenge(const ThreadState& state, const DeliberationMove& support, const Challenge& challenge);

nlohmann::json to_json(const ThreadState& state);
std::string thread_digest(const ThreadState& state);

}  // namespace agora::protocol
