#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

namespace agora::testing {

using protocol::Act;
using protocol::DeliberationMove;
using protocol::ParentKind;
using protocol::Participant;
using protocol::ProtocolErrorKind;

std::set<Act> oracle_children(ParentKind parent) {
    switch (parent) {
    case ParentKind::Root: return {Act::Issue};
    case ParentKind::Issue: return {Act::Claim};
    case ParentKind::Claim: return {Act::Support, Act::Rebut, Act::Question};
    case ParentKind::Support: return {Act::Support, Act::Rebut, Act::Question};
    case ParentKind::Rebut: return {Act::Support, Act::Question};
    case ParentKind::Question: return {Act::Claim, Act::Support};
    case ParentKind::FreeText: return {Act::Claim, Act::Support};
    }
    return {};
}

namespace {

ParentKind kind_of_parent(const DeliberationMove& m) {
    if (!m.act) return ParentKind::FreeText;
    switch (*m.act) {
    case Act::Issue: return ParentKind::Issue;
    case Act::Claim: return ParentKind::Claim;
    case Act::Support: return ParentKind::Support;
    case Act::Rebut: return ParentKind::Rebut;
    case Act::Question: return ParentKind::Question;
    }
    return ParentKind::FreeText;
}

const DeliberationMove* lookup(const std::vector<DeliberationMove>& moves, const std::string& id) {
    for (const auto& m : moves) {
        if (m.move_id == id) return &m;
    }
    return nullptr;
}

}  // namespace

std::optional<ProtocolErrorKind> oracle_verdict(const OracleThread& thread, const DeliberationMove& move) {
    const auto& moves = thread.moves;
    if (move.move_id.empty()) return ProtocolErrorKind::MalformedMove;
    if (lookup(moves, move.move_id)) return ProtocolErrorKind::DuplicateMove;
    if (move.author.id.empty()) return ProtocolErrorKind::MalformedMove;
    if (!moves.empty() && move.timestamp <= moves.back().timestamp) return ProtocolErrorKind::MalformedMove;
    const bool agent = move.author.kind == protocol::ParticipantKind::Agent;
    if (agent && (!move.act || move.rationale.empty())) return ProtocolErrorKind::MalformedMove;
    if (!agent && move.act) return ProtocolErrorKind::MalformedMove;

    if (!move.target) {
        if (!moves.empty()) return ProtocolErrorKind::MalformedMove;
        if (agent && !oracle_children(ParentKind::Root).count(*move.act)) return ProtocolErrorKind::RootMustBeIssue;
        return std::nullopt;
    }
    const DeliberationMove* parent = lookup(moves, *move.target);
    if (!parent) return ProtocolErrorKind::UnknownTarget;
    if (!agent) return std::nullopt;
    if (!oracle_children(kind_of_parent(*parent)).count(*move.act)) return ProtocolErrorKind::IllegalActForTarget;
    if (*move.act == Act::Rebut && parent->author == move.author) {
        const bool committing = parent->act == Act::Claim || parent->act == Act::Rebut;
        const bool withdrawn = thread.withdrawn.count({move.author.id, parent->move_id}) > 0;
        if (committing && !withdrawn) return ProtocolErrorKind::SelfRebuttal;
    }
    return std::nullopt;
}

std::vector<RandomThreadStep> random_thread(std::mt19937_64& rng, std::size_t max_moves) {
    const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    const Participant people[] = {Participant::agent("A"), Participant::agent("B"), Participant::human("h")};

    std::vector<RandomThreadStep> steps;
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> committing;  // (author, move id)
    std::uint64_t ts = 0;
    const std::size_t n = 1 + pick(max_moves);
    for (std::size_t i = 0; i < n; ++i) {
        if (!committing.empty() && chance(0.1)) {
            const auto& [owner, source] = committing[pick(committing.size())];
            RandomThreadStep s;
            s.kind = RandomThreadStep::Kind::Concede;
            s.owner = owner;
            s.source = source;
            steps.push_back(std::move(s));
        }
        DeliberationMove m;
        m.move_id = "m" + std::to_string(i + 1);
        if (!ids.empty() && chance(0.03)) m.move_id = ids[pick(ids.size())];
        if (chance(0.01)) m.move_id.clear();
        m.author = chance(0.45) ? people[0] : (chance(0.6) ? people[1] : people[2]);
        if (chance(0.01)) m.author.id.clear();
        if (m.author.is_agent()) {
            if (!chance(0.03)) m.act = protocol::all_acts[pick(protocol::all_acts.size())];
            m.rationale = chance(0.03) ? "" : "because";
        } else if (chance(0.03)) {
            m.act = protocol::all_acts[pick(protocol::all_acts.size())];
        }
        if (ids.empty() ? !chance(0.05) : chance(0.05)) {
            m.target.reset();
        } else {
            m.target = (ids.empty() || chance(0.04)) ? std::string("ghost") : ids[pick(ids.size())];
        }
        ts += chance(0.03) ? 0 : 1 + pick(3);
        m.timestamp = ts;
        m.body = "body of " + m.move_id;
        ids.push_back(m.move_id);
        if (m.act == Act::Claim || m.act == Act::Rebut) committing.emplace_back(m.author.id, m.move_id);
        RandomThreadStep s;
        s.move = std::move(m);
        steps.push_back(std::move(s));
    }
    return steps;
}

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool same_handle_text(const std::string& candidate, const std::string& handle) {
    if (candidate.size() != handle.size()) return false;
    for (std::size_t i = 0; i < handle.size(); ++i) {
        char c = candidate[i] == ' ' ? '_' : candidate[i];
        if (std::tolower(static_cast<unsigned char>(c)) != std::tolower(static_cast<unsigned char>(handle[i]))) {
            return false;
        }
        if (candidate[i] == ' ' && handle[i] != '_') return false;
    }
    return true;
}

}  // namespace

std::vector<forum::Mention> reference_mentions(const std::string& text, const std::vector<std::string>& roster) {
    struct Candidate {
        std::size_t begin, end;
        std::string handle;
    };
    std::vector<Candidate> all;
    for (std::size_t begin = 0; begin < text.size(); ++begin) {
        if (text[begin] != '@') continue;
        if (begin > 0 && is_word_byte(static_cast<unsigned char>(text[begin - 1]))) continue;
        for (const auto& handle : roster) {
            for (std::size_t end = begin + 2; end <= text.size(); ++end) {
                if (!same_handle_text(text.substr(begin + 1, end - begin - 1), handle)) continue;
                if (end < text.size() && is_word_byte(static_cast<unsigned char>(text[end]))) continue;
                all.push_back({begin, end, handle});
            }
        }
    }
    std::vector<forum::Mention> out;
    std::size_t covered = 0;
    for (std::size_t begin = 0; begin < text.size(); ++begin) {
        if (begin < covered) continue;
        const Candidate* best = nullptr;
        for (const auto& c : all) {
            if (c.begin == begin && (!best || c.end > best->end)) best = &c;
        }
        if (!best) continue;
        covered = best->end;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const forum::Mention& m) { return m.agent_id == best->handle; });
        if (!seen) out.push_back({best->handle, best->begin, best->end});
    }
    return out;
}

std::vector<int> renumbering_oracle(const std::vector<std::string>& keys_in_order) {
    std::map<std::string, int> assigned;
    std::vector<int> out;
    for (const auto& k : keys_in_order) {
        auto [it, fresh] = assigned.emplace(k, static_cast<int>(assigned.size()) + 1);
        out.push_back(it->second);
    }
    return out;
}

std::vector<std::string> commitment_oracle(const protocol::ThreadState& state) {
    std::vector<std::string> problems;
    const auto moves = state.moves();

    std::map<std::string, long> active;
    for (const auto& m : moves) {
        if (m.act == Act::Claim || m.act == Act::Rebut) ++active[m.author.id];
    }
    for (const auto& s : state.status_log()) {
        if (s.status != protocol::CommitmentStatus::Active) --active[s.owner];
    }
    for (const auto& [owner, n] : active) {
        const auto it = state.stores().find(owner);
        const long have = it == state.stores().end() ? 0 : static_cast<long>(it->second.active_count());
        if (have != n) {
            problems.push_back(owner + " holds " + std::to_string(have) + " active commitments, expected " + std::to_string(n));
        }
    }

    // Recompute challenges and their resolution from the move sequence.
    struct Open {
        std::string challenge, challenged, burden;
        std::optional<std::string> resolved_by;
    };
    std::vector<Open> expected;
    std::vector<DeliberationMove> seen;
    const auto reaches = [&](const DeliberationMove& support, const Open& ch) {
        const DeliberationMove* cur = support.target ? lookup(seen, *support.target) : nullptr;
        while (cur) {
            if (cur->move_id == ch.challenge || cur->move_id == ch.challenged) return true;
            if (cur->act != Act::Support || !cur->target) return false;
            cur = lookup(seen, *cur->target);
        }
        return false;
    };
    for (const auto& m : moves) {
        if ((m.act == Act::Question || m.act == Act::Rebut) && m.target) {
            const DeliberationMove* parent = lookup(seen, *m.target);
            expected.push_back({m.move_id, *m.target, parent ? parent->author.id : std::string{}, std::nullopt});
        }
        if (m.act == Act::Support) {
            for (auto& ch : expected) {
                if (ch.resolved_by || ch.burden != m.author.id) continue;
                if (reaches(m, ch)) {
                    ch.resolved_by = m.move_id;
                    break;
                }
            }
        }
        seen.push_back(m);
    }
    const auto& actual = state.challenges();
    if (actual.size() != expected.size()) {
        problems.push_back("challenge count " + std::to_string(actual.size()) + " != expected " + std::to_string(expected.size()));
        return problems;
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const auto& a = actual[i];
        const auto& e = expected[i];
        if (a.challenge_move != e.challenge || a.challenged_move != e.challenged || a.burden_holder != e.burden ||
            a.resolved_by != e.resolved_by) {
            problems.push_back("challenge " + a.challenge_move + " differs from the recomputed one");
        }
        if (a.resolved_by) {
            const DeliberationMove* r = lookup(seen, *a.resolved_by);
            if (!r || r->act != Act::Support || r->author.id != a.burden_holder) {
                problems.push_back("challenge " + a.challenge_move + " resolved by a move that is not the burden holder's SUPPORT");
            }
        }
    }
    return problems;
}

bool oracle_is_dag(const std::vector<agent::MemorySnippet>& snippets) {
    std::map<std::string, std::vector<std::string>> children;
    std::map<std::string, std::size_t> indegree;
    for (const auto& s : snippets) indegree.emplace(s.snippet_id, 0);
    for (const auto& s : snippets) {
        for (const auto& parent : s.refines) {
            if (!indegree.count(parent)) return false;
            children[parent].push_back(s.snippet_id);
            ++indegree[s.snippet_id];
        }
    }
    std::deque<std::string> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) ready.push_back(id);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto id = ready.front();
        ready.pop_front();
        ++visited;
        for (const auto& c : children[id]) {
            if (--indegree[c] == 0) ready.push_back(c);
        }
    }
    return visited == indegree.size();
}

std::vector<std::string> isomorphism_oracle(const mindmap::MindMapGraph& graph, const forum::Thread& thread) {
    std::vector<std::string> problems;
    const auto moves = thread.state.moves();
    if (graph.nodes.size() != moves.size()) {
        problems.push_back("node count " + std::to_string(graph.nodes.size()) + " != move count " + std::to_string(moves.size()));
    }
    std::set<std::string> node_ids;
    for (const auto& n : graph.nodes) node_ids.insert(n.node_id);

    std::map<std::string, std::string> parent_of;
    std::multiset<std::string> edge_acts;
    for (const auto& e : graph.edges) {
        if (e.cls != mindmap::EdgeClass::Reply) continue;
        if (!parent_of.emplace(e.from, e.to).second) problems.push_back("node " + e.from + " has two parents");
        edge_acts.insert(e.act);
    }
    std::multiset<std::string> move_acts;
    for (const auto& m : moves) {
        if (!node_ids.count(m.move_id)) problems.push_back("move " + m.move_id + " has no node");
        if (m.is_root()) {
            if (parent_of.count(m.move_id)) problems.push_back("root " + m.move_id + " has a parent edge");
            continue;
        }
        move_acts.insert(m.act ? std::string(protocol::to_string(*m.act)) : std::string(mindmap::reply_marker));
        const auto it = parent_of.find(m.move_id);
        if (it == parent_of.end() || it->second != *m.target) problems.push_back("parent of " + m.move_id + " differs");
    }
    if (edge_acts != move_acts) problems.push_back("edge act multiset differs from move act multiset");
    return problems;
}

}  // namespace agora::testing
