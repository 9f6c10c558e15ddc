#include "agora/agent/provider.hpp"

#include "agora/common/digest.hpp"
#include "agora/common/text.hpp"

#include <random>

namespace agora::agent {

namespace {

using json = nlohmann::json;

class Dice {
public:
    explicit Dice(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) {
        if (n == 0) return 0;
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }
    bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

    template <class T>
    const T& pick(const std::vector<T>& items) { return items[below(items.size())]; }

private:
    std::mt19937_64 rng_;
};

std::string str(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) return {};
    return j[key].get<std::string>();
}

std::vector<std::string> strings(const json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) return out;
    for (const auto& v : j[key]) {
        if (v.is_string()) out.push_back(v.get<std::string>());
    }
    return out;
}

std::string focus_of(const json& persona) {
    auto areas = strings(persona, "focus_areas");
    if (!areas.empty()) return areas.front();
    auto area = str(persona, "research_area");
    return area.empty() ? std::string("the problem at hand") : area;
}

std::string area_of(const json& persona) {
    auto area = str(persona, "research_area");
    return area.empty() ? std::string("my field") : area;
}

std::string keyword_query(const std::string& body, std::size_t n) {
    return text::join(text::keywords(body, n), " ");
}

json plan(const json& ctx, Dice& dice) {
    const auto& parent = ctx.contains("parent") ? ctx["parent"] : json::object();
    std::string act = str(ctx, "forced_act");
    if (act.empty()) {
        auto allowed = strings(ctx, "allowed_acts");
        act = allowed.empty() ? "CLAIM" : dice.pick(allowed);
    }
    const auto focus = focus_of(ctx.value("persona", json::object()));
    std::string query = keyword_query(str(parent, "body"), 4);
    if (query.empty()) query = focus;

    json out{{"intended_act", act},
             {"draft_points", {"respond to " + str(parent, "author") + " from the angle of " + focus}}};
    if (dice.below(3) < 2) {
        const auto roll = dice.below(10);
        out["mode"] = "use_tool";
        out["tool"] = roll < 6 ? "paper_search" : roll < 9 ? "graph_query" : "add_paper";
        out["query"] = query;
    } else {
        out["mode"] = "respond_directly";
    }
    return out;
}

json reflect(const json& ctx, Dice& dice) {
    json p = ctx.value("plan", json::object());
    const auto outcome = str(ctx, "outcome");
    if (outcome == "ok") return p;

    if (outcome == "unavailable" || str(p, "mode") != "use_tool") {
        p["mode"] = "respond_directly";
        p.erase("tool");
        p.erase("query");
        return p;
    }
    // Empty result: pivot tool and query, and maybe reconsider the act.
    p["tool"] = str(p, "tool") == "graph_query" ? "paper_search" : "graph_query";
    const auto& persona = ctx.value("persona", json::object());
    auto pivot = keyword_query(focus_of(persona) + " " + area_of(persona), 3);
    p["query"] = pivot == str(p, "query") ? keyword_query(area_of(persona), 2) : pivot;
    if (str(ctx, "forced_act").empty()) {
        auto allowed = strings(ctx, "allowed_acts");
        if (!allowed.empty()) p["intended_act"] = dice.pick(allowed);
    }
    return p;
}

std::string evidence_sentence(const json& evidence, std::size_t max_cites, std::string& cited_keys) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < evidence.size() && i < max_cites; ++i) {
        const auto& e = evidence[i];
        std::string who = str(e, "first_author");
        std::string ref = "\"" + str(e, "title") + "\"";
        if (!who.empty()) ref = who + "'s " + ref;
        parts.push_back(ref + " [@" + str(e, "key") + "]");
        cited_keys += str(e, "key") + " ";
    }
    if (parts.empty()) return {};
    return " The literature bears on this: " + text::join(parts, " and ") + ".";
}

json compose(const json& ctx, Dice& dice) {
    const auto& persona = ctx.value("persona", json::object());
    const auto& parent = ctx.value("parent", json::object());
    const auto act = str(ctx.value("plan", json::object()), "intended_act");
    const auto focus = focus_of(persona);
    const auto area = area_of(persona);
    auto topic = keyword_query(str(parent, "body"), 3);
    if (topic.empty()) topic = focus;

    std::string body;
    if (act == "ISSUE") {
        body = "How should we approach " + topic + "? From " + area + ", the open issue is " + focus + ".";
    } else if (act == "CLAIM") {
        static const std::vector<std::string> leads{"I propose that", "My position is that", "I would argue that"};
        body = dice.pick(leads) + " progress on " + topic + " depends on " + focus + ".";
    } else if (act == "SUPPORT") {
        static const std::vector<std::string> leads{"This holds up", "I agree and would add", "There is good reason to accept this"};
        body = dice.pick(leads) + ": " + focus + " gives concrete grounds for " + topic + ".";
    } else if (act == "REBUT") {
        static const std::vector<std::string> leads{"I disagree", "This overlooks something", "I am not convinced"};
        body = dice.pick(leads) + ": the argument about " + topic + " ignores " + focus + ".";
    } else if (act == "QUESTION") {
        static const std::vector<std::string> leads{"What evidence shows", "How would we test whether", "Can we be sure"};
        body = dice.pick(leads) + " " + topic + " still holds once " + focus + " is taken into account?";
    } else {
        body = "On " + topic + ", " + focus + " matters.";
    }

    std::string cited;
    body += evidence_sentence(ctx.value("evidence", json::array()), 2, cited);
    std::string rationale = "As a specialist in " + area + ", I chose " + (act.empty() ? std::string("to reply") : act) +
                            " because the parent move touches " + topic + ".";
    if (!cited.empty()) rationale += " Grounded in " + text::trim(cited) + ".";
    return {{"body", body}, {"rationale", rationale}};
}

json distill(const json& ctx, Dice& dice) {
    const auto window = ctx.value("window", json::array());
    const auto existing = ctx.value("existing", json::array());
    const std::size_t cap = ctx.value("max_snippets", std::size_t{3});
    json out{{"snippets", json::array()}};
    if (window.empty() || cap == 0) return out;

    static const std::vector<std::string> kinds{"hypothesis", "question", "rationale_shift", "methodological_consideration"};
    const auto focus = focus_of(ctx.value("persona", json::object()));
    const std::size_t n = 1 + dice.below(cap);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = window[window.size() - 1 - (i % window.size())];
        auto topic = keyword_query(str(m, "body"), 3);
        if (topic.empty()) topic = focus;
        const auto& kind = dice.pick(kinds);
        std::string text;
        if (kind == "hypothesis") text = "Hypothesis: " + topic + " could be explained through " + focus + ".";
        else if (kind == "question") text = "Open question: does " + topic + " generalize beyond " + focus + "?";
        else if (kind == "rationale_shift") text = "Shift: after " + str(m, "author") + "'s point, " + topic + " now looks central.";
        else text = "Method: study " + topic + " with a design suited to " + focus + ".";

        json refines = json::array();
        if (!existing.empty() && dice.chance(0.5)) {
            refines.push_back(existing.back()["snippet_id"]);
            if (existing.size() > 1 && dice.chance(0.25)) refines.push_back(existing[existing.size() - 2]["snippet_id"]);
        }
        out["snippets"].push_back({{"kind", kind}, {"text", text}, {"refines", refines}});
    }
    return out;
}

json suggest_threads(const json& ctx, Dice& dice) {
    std::string all;
    const auto proposal = ctx.value("proposal", json::object());
    for (const auto& [section, body] : proposal.items()) {
        if (body.is_string()) all += body.get<std::string>() + " ";
    }
    auto keys = text::keywords(all, 8);
    if (keys.empty()) keys = {"the research question"};
    static const std::vector<std::string> frames{
        "What would falsify the claim about %?",
        "Which methods best measure %?",
        "Who is most affected by %?",
        "What prior work already addresses %?",
    };
    const std::size_t n = 2 + dice.below(3);
    json out{{"suggestions", json::array()}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& key = keys[i % keys.size()];
        std::string title = frames[(i + dice.below(frames.size())) % frames.size()];
        title.replace(title.find('%'), 1, key);
        out["suggestions"].push_back(
            {{"title", title}, {"description", "Opens a discussion of " + key + " grounded in the current proposal."}});
    }
    return out;
}

json label(const json& ctx) {
    const auto body = str(ctx, "body");
    auto keys = text::keywords(body, 4);
    std::string keyword = keys.empty() ? text::clip_words(body, 4) : text::join(keys, " ");
    const auto sentences = text::split_sentences(body);
    std::string summary;
    for (std::size_t i = 0; i < sentences.size() && i < 2; ++i) summary += (i ? " " : "") + sentences[i];
    if (summary.empty()) summary = body;
    return {{"keyword", text::clip_words(keyword, 6)}, {"summary", summary}};
}

}  // namespace

nlohmann::json MockProvider::complete(const ProviderRequest& request) {
    const std::string seed_material =
        request.persona_digest + "|" + request.context_digest() + "|" + std::string(to_string(request.kind));
    Dice dice(sha256_u64(seed_material));
    const auto& ctx = request.context;
    switch (request.kind) {
    case RequestKind::Plan: return plan(ctx, dice);
    case RequestKind::Reflect: return reflect(ctx, dice);
    case RequestKind::Compose: return compose(ctx, dice);
    case RequestKind::Distill: return distill(ctx, dice);
    case RequestKind::SuggestThreads: return suggest_threads(ctx, dice);
    case RequestKind::Label: return label(ctx);
    }
    throw ProviderUnavailable("mock provider: unsupported request kind");
}

}  // namespace agora::agent
