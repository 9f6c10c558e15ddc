#include "agora/protocol/thread_state.hpp"

#include "agora/common/digest.hpp"

#include <algorithm>

namespace agora::protocol {

std::string_view to_string(CommitmentStatus status) {
    switch (status) {
    case CommitmentStatus::Active: return "active";
    case CommitmentStatus::Conceded: return "conceded";
    case CommitmentStatus::Retracted: return "retracted";
    }
    return "?";
}

std::optional<CommitmentStatus> parse_commitment_status(std::string_view name) {
    for (auto s : {CommitmentStatus::Active, CommitmentStatus::Conceded, CommitmentStatus::Retracted}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view to_string(ProtocolErrorKind kind) {
    switch (kind) {
    case ProtocolErrorKind::UnknownTarget: return "UnknownTarget";
    case ProtocolErrorKind::IllegalActForTarget: return "IllegalActForTarget";
    case ProtocolErrorKind::RootMustBeIssue: return "RootMustBeIssue";
    case ProtocolErrorKind::SelfRebuttal: return "SelfRebuttal";
    case ProtocolErrorKind::DuplicateMove: return "DuplicateMove";
    case ProtocolErrorKind::MalformedMove: return "MalformedMove";
    case ProtocolErrorKind::UnknownCommitment: return "UnknownCommitment";
    case ProtocolErrorKind::IllegalStatusTransition: return "IllegalStatusTransition";
    }
    return "?";
}

ProtocolError::ProtocolError(ProtocolViolation violation)
    : std::runtime_error(std::string(to_string(violation.kind)) + ": " + violation.detail),
      violation_(std::move(violation)) {}

std::size_t CommitmentStore::active_count() const {
    return static_cast<std::size_t>(std::count_if(commitments.begin(), commitments.end(), [](const Commitment& c) {
        return c.status == CommitmentStatus::Active;
    }));
}

const Commitment* CommitmentStore::find(const MoveId& source_move) const {
    for (const auto& c : commitments) {
        if (c.source_move == source_move) return &c;
    }
    return nullptr;
}

const DeliberationMove* ThreadState::find(const MoveId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &moves_[it->second];
}

std::vector<Challenge> ThreadState::open_challenges() const {
    std::vector<Challenge> out;
    std::copy_if(challenges_.begin(), challenges_.end(), std::back_inserter(out),
                 [](const Challenge& c) { return !c.resolved_by; });
    return out;
}

bool ThreadState::operator==(const ThreadState& other) const {
    return thread_id_ == other.thread_id_ && moves_ == other.moves_ && stores_ == other.stores_ &&
           challenges_ == other.challenges_ && status_log_ == other.status_log_;
}

namespace {

ProtocolViolation violation(ProtocolErrorKind kind, std::string detail) { return {kind, std::move(detail)}; }

}  // namespace

std::optional<ProtocolViolation> validate_move(const ThreadState& state, const DeliberationMove& move) {
    using K = ProtocolErrorKind;
    if (move.move_id.empty()) return violation(K::MalformedMove, "move_id is empty");
    if (state.find(move.move_id)) return violation(K::DuplicateMove, "move " + move.move_id + " already in thread");
    if (move.author.id.empty()) return violation(K::MalformedMove, "author is empty");
    if (!state.empty() && move.timestamp <= state.moves().back().timestamp) {
        return violation(K::MalformedMove, "timestamp must increase within the thread");
    }
    if (move.author.is_agent()) {
        if (!move.act) return violation(K::MalformedMove, "agent moves carry an act");
        if (move.rationale.empty()) return violation(K::MalformedMove, "agent moves carry a non-empty rationale");
    } else if (move.act) {
        return violation(K::MalformedMove, "human moves carry no act");
    }

    if (move.is_root()) {
        if (!state.empty()) return violation(K::MalformedMove, "thread already has a root");
        if (move.author.is_agent() && *move.act != Act::Issue) {
            return violation(K::RootMustBeIssue, "agent-authored root must be ISSUE, got " +
                                                     std::string(to_string(*move.act)));
        }
        return std::nullopt;
    }

    const DeliberationMove* parent = state.find(*move.target);
    if (!parent) return violation(K::UnknownTarget, "target " + *move.target + " is not an earlier move of this thread");
    if (!move.author.is_agent()) return std::nullopt;

    const ParentKind pk = parent_kind_of(*parent);
    if (!is_legal_attachment(*move.act, pk)) {
        return violation(K::IllegalActForTarget, std::string(to_string(*move.act)) + " cannot target " +
                                                     std::string(to_string(pk)));
    }
    if (*move.act == Act::Rebut && parent->author == move.author) {
        auto it = state.stores().find(move.author.id);
        if (it != state.stores().end()) {
            const Commitment* c = it->second.find(parent->move_id);
            if (c && c->status == CommitmentStatus::Active) {
                return violation(K::SelfRebuttal, move.author.id + " cannot rebut its own active commitment " +
                                                      parent->move_id);
            }
        }
    }
    return std::nullopt;
}

bool answers_challenge(const ThreadState& state, const DeliberationMove& support, const Challenge& challenge) {
    if (!support.target) return false;
    const DeliberationMove* cur = state.find(*support.target);
    while (cur) {
        if (cur->move_id == challenge.challenge_move || cur->move_id == challenge.challenged_move) return true;
        if (cur->act != Act::Support || !cur->target) return false;
        cur = state.find(*cur->target);
    }
    return false;
}

void ThreadState::apply(const DeliberationMove& move) {
    if (auto v = validate_move(*this, move)) throw ProtocolError(std::move(*v));

    const DeliberationMove* parent = move.target ? find(*move.target) : nullptr;
    const std::string parent_author = parent ? parent->author.id : std::string{};
    const MoveId parent_id = parent ? parent->move_id : MoveId{};

    index_.emplace(move.move_id, moves_.size());
    moves_.push_back(move);
    if (!move.act) return;

    const Act act = *move.act;
    if (act == Act::Claim || act == Act::Rebut) {
        auto& store = stores_[move.author.id];
        store.owner = move.author.id;
        store.commitments.push_back({move.move_id, move.body, CommitmentStatus::Active});
    }
    if (act == Act::Question || act == Act::Rebut) {
        challenges_.push_back({move.move_id, parent_id, parent_author, std::nullopt});
    }
    if (act == Act::Support) {
        for (auto& ch : challenges_) {
            if (ch.resolved_by || ch.burden_holder != move.author.id) continue;
            if (answers_challenge(*this, moves_.back(), ch)) {
                ch.resolved_by = move.move_id;
                break;  // oldest matching challenge only
            }
        }
    }
}

void ThreadState::set_commitment_status(const std::string& owner, const MoveId& source_move,
                                        CommitmentStatus status) {
    auto it = stores_.find(owner);
    Commitment* target = nullptr;
    if (it != stores_.end()) {
        for (auto& c : it->second.commitments) {
            if (c.source_move == source_move) target = &c;
        }
    }
    if (!target) {
        throw ProtocolError({ProtocolErrorKind::UnknownCommitment, owner + " holds no commitment from " + source_move});
    }
    if (target->status != CommitmentStatus::Active || status == CommitmentStatus::Active) {
        throw ProtocolError({ProtocolErrorKind::IllegalStatusTransition,
                             std::string(to_string(target->status)) + " -> " + std::string(to_string(status))});
    }
    target->status = status;
    status_log_.push_back({moves_.size(), owner, source_move, status});
}

ThreadState apply_move(ThreadState state, const DeliberationMove& move) {
    state.apply(move);
    return state;
}

std::vector<Commitment> commitments_of(const ThreadState& state, const std::string& who) {
    auto it = state.stores().find(who);
    if (it == state.stores().end()) return {};
    return it->second.commitments;
}

std::vector<Act> permitted_acts(const ThreadState& state, const MoveId& parent, const Participant& author) {
    std::vector<Act> out;
    const std::uint64_t ts = state.empty() ? 1 : state.moves().back().timestamp + 1;
    for (Act a : all_acts) {
        DeliberationMove probe{"\x01probe", author, a, parent, "", "probe", {}, std::nullopt, ts};
        if (!validate_move(state, probe)) out.push_back(a);
    }
    return out;
}

nlohmann::json to_json(const ThreadState& state) {
    nlohmann::json stores = nlohmann::json::object();
    for (const auto& [owner, store] : state.stores()) {
        auto list = nlohmann::json::array();
        for (const auto& c : store.commitments) {
            list.push_back({{"source_move", c.source_move}, {"text", c.text}, {"status", to_string(c.status)}});
        }
        stores[owner] = std::move(list);
    }
    auto challenges = nlohmann::json::array();
    for (const auto& c : state.challenges()) {
        challenges.push_back({{"challenge_move", c.challenge_move},
                              {"challenged_move", c.challenged_move},
                              {"burden_holder", c.burden_holder},
                              {"resolved_by", c.resolved_by ? nlohmann::json(*c.resolved_by) : nlohmann::json()}});
    }
    auto status_log = nlohmann::json::array();
    for (const auto& s : state.status_log()) {
        status_log.push_back({{"after_moves", s.after_moves},
                              {"owner", s.owner},
                              {"source_move", s.source_move},
                              {"status", to_string(s.status)}});
    }
    auto moves = nlohmann::json::array();
    for (const auto& m : state.moves()) moves.push_back(m);
    return {{"thread_id", state.thread_id()},
            {"moves", std::move(moves)},
            {"stores", std::move(stores)},
            {"challenges", std::move(challenges)},
            {"status_log", std::move(status_log)}};
}

std::string thread_digest(const ThreadState& state) { return sha256_hex(to_json(state).dump()); }

}  // namespace agora::protocol
