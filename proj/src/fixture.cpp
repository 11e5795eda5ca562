#include "trailkit/fixture.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"

namespace trailkit::env {

using nlohmann::json;

bool ActionMatcher::matches(const std::string& current_page, const Action& action) const {
    if (page_id != current_page) return false;
    if (verb != action_verb(action)) return false;
    if (bid && *bid != action_bid(action)) return false;
    if (text) {
        const std::string* payload = nullptr;
        if (const auto* a = std::get_if<FillAction>(&action)) payload = &a->text;
        else if (const auto* a = std::get_if<TypeAction>(&action)) payload = &a->text;
        else if (const auto* a = std::get_if<SelectOptionAction>(&action)) payload = &a->value;
        if (!payload || *payload != *text) return false;
    }
    if (key) {
        const auto* a = std::get_if<PressAction>(&action);
        if (!a || a->key_combo != *key) return false;
    }
    return true;
}

const Page* SiteFixture::page_by_id(const std::string& page_id) const {
    for (const Page& p : pages)
        if (p.page_id == page_id) return &p;
    return nullptr;
}

const Page* SiteFixture::page_by_url(const std::string& url) const {
    for (const Page& p : pages)
        if (p.url == url) return &p;
    return nullptr;
}

void SiteFixture::validate() const {
    if (site_id.empty()) throw FixtureError("fixture needs a site_id");
    if (pages.empty()) throw FixtureError("fixture has no pages");
    std::set<std::string> ids;
    for (const Page& p : pages) {
        if (!ids.insert(p.page_id).second)
            throw FixtureError("duplicate page_id: " + p.page_id);
        std::set<int> bids;
        for (int bid : collect_bids(p.root))
            if (bid <= 0 || !bids.insert(bid).second)
                throw FixtureError("page " + p.page_id + ": bids must be unique positive integers");
    }
    if (!page_by_url(initial_url))
        throw FixtureError("initial_url does not route to any page: " + initial_url);

    auto need_page = [&](const std::string& page_id, const char* what) -> const Page& {
        const Page* p = page_by_id(page_id);
        if (!p) throw FixtureError(std::string(what) + " references unknown page: " + page_id);
        return *p;
    };
    auto need_bid = [&](const Page& page, int bid, const char* what) {
        if (!find_bid(page.root, bid))
            throw FixtureError(std::string(what) + " references unknown bid " +
                               std::to_string(bid) + " on page " + page.page_id);
    };

    for (const Transition& t : transitions) {
        const Page& page = need_page(t.when.page_id, "transition matcher");
        if (t.when.bid) need_bid(page, *t.when.bid, "transition matcher");
        switch (t.effect.kind) {
            case TransitionEffect::Kind::goto_page:
                need_page(t.effect.page_id, "transition effect");
                break;
            case TransitionEffect::Kind::set_value:
            case TransitionEffect::Kind::toggle_state: {
                const Page& target =
                    t.effect.page_id.empty() ? page : need_page(t.effect.page_id, "transition effect");
                need_bid(target, t.effect.bid, "transition effect");
                break;
            }
            case TransitionEffect::Kind::no_op: break;
        }
    }
    for (const OutcomeClause& c : outcome) {
        const Page& page = need_page(c.page_id, "outcome clause");
        if (c.kind == OutcomeClause::Kind::element_value_is)
            need_bid(page, c.bid, "outcome clause");
    }
}

namespace {

TransitionEffect effect_from_json(const json& j) {
    TransitionEffect e;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "goto_page") {
        e.kind = TransitionEffect::Kind::goto_page;
        e.page_id = j.at("page_id").get<std::string>();
    } else if (kind == "set_value") {
        e.kind = TransitionEffect::Kind::set_value;
        e.page_id = j.value("page_id", "");
        e.bid = j.at("bid").get<int>();
        e.value = j.at("value").get<std::string>();
    } else if (kind == "toggle_state") {
        e.kind = TransitionEffect::Kind::toggle_state;
        e.page_id = j.value("page_id", "");
        e.bid = j.at("bid").get<int>();
        e.value = j.at("value").get<std::string>();
    } else if (kind == "no_op") {
        e.kind = TransitionEffect::Kind::no_op;
    } else {
        throw FixtureError("unknown transition effect kind: " + kind);
    }
    return e;
}

json effect_to_json(const TransitionEffect& e) {
    switch (e.kind) {
        case TransitionEffect::Kind::goto_page:
            return json{{"kind", "goto_page"}, {"page_id", e.page_id}};
        case TransitionEffect::Kind::set_value:
            return json{{"kind", "set_value"}, {"page_id", e.page_id}, {"bid", e.bid},
                        {"value", e.value}};
        case TransitionEffect::Kind::toggle_state:
            return json{{"kind", "toggle_state"}, {"page_id", e.page_id}, {"bid", e.bid},
                        {"value", e.value}};
        case TransitionEffect::Kind::no_op: break;
    }
    return json{{"kind", "no_op"}};
}

}  // namespace

SiteFixture SiteFixture::from_json(const json& j) {
    const int version = j.value("version", 1);
    if (version != 1) throw FixtureError("unsupported fixture version " + std::to_string(version));
    SiteFixture f;
    f.site_id = j.at("site_id").get<std::string>();
    f.initial_url = j.at("initial_url").get<std::string>();
    for (const auto& pj : j.at("pages")) {
        Page page;
        page.page_id = pj.at("page_id").get<std::string>();
        page.url = pj.at("url").get<std::string>();
        page.root = axnode_from_json(pj.at("root"));
        assign_layout(page.root);
        f.pages.push_back(std::move(page));
    }
    if (j.contains("transitions")) {
        for (const auto& tj : j["transitions"]) {
            Transition t;
            const json& when = tj.at("when");
            t.when.page_id = tj.at("page_id").get<std::string>();
            t.when.verb = when.at("action").get<std::string>();
            if (when.contains("bid")) t.when.bid = when["bid"].get<int>();
            if (when.contains("text")) t.when.text = when["text"].get<std::string>();
            if (when.contains("key")) t.when.key = when["key"].get<std::string>();
            t.effect = effect_from_json(tj.at("effect"));
            f.transitions.push_back(std::move(t));
        }
    }
    if (j.contains("outcome")) {
        for (const auto& cj : j["outcome"]) {
            OutcomeClause c;
            const std::string kind = cj.at("clause").get<std::string>();
            if (kind == "current_page_is") {
                c.kind = OutcomeClause::Kind::current_page_is;
                c.page_id = cj.at("page_id").get<std::string>();
            } else if (kind == "element_value_is") {
                c.kind = OutcomeClause::Kind::element_value_is;
                c.page_id = cj.at("page_id").get<std::string>();
                c.bid = cj.at("bid").get<int>();
                c.value = cj.at("value").get<std::string>();
            } else {
                throw FixtureError("unknown outcome clause: " + kind);
            }
            f.outcome.push_back(std::move(c));
        }
    }
    f.validate();
    return f;
}

SiteFixture SiteFixture::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FixtureError("cannot open fixture: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw FixtureError("malformed fixture " + path + ": " + e.what());
    }
    return from_json(j);
}

json SiteFixture::to_json() const {
    json pages_json = json::array();
    for (const Page& p : pages)
        pages_json.push_back(
            json{{"page_id", p.page_id}, {"url", p.url}, {"root", axnode_to_json(p.root)}});
    json transitions_json = json::array();
    for (const Transition& t : transitions) {
        json when{{"action", t.when.verb}};
        if (t.when.bid) when["bid"] = *t.when.bid;
        if (t.when.text) when["text"] = *t.when.text;
        if (t.when.key) when["key"] = *t.when.key;
        transitions_json.push_back(
            json{{"page_id", t.when.page_id}, {"when", when}, {"effect", effect_to_json(t.effect)}});
    }
    json outcome_json = json::array();
    for (const OutcomeClause& c : outcome) {
        if (c.kind == OutcomeClause::Kind::current_page_is)
            outcome_json.push_back(json{{"clause", "current_page_is"}, {"page_id", c.page_id}});
        else
            outcome_json.push_back(json{{"clause", "element_value_is"},
                                        {"page_id", c.page_id},
                                        {"bid", c.bid},
                                        {"value", c.value}});
    }
    return json{{"version", 1},
                {"site_id", site_id},
                {"initial_url", initial_url},
                {"pages", pages_json},
                {"transitions", transitions_json},
                {"outcome", outcome_json}};
}

}  // namespace trailkit::env
