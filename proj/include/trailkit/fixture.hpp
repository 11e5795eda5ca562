#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/actions.hpp"
#include "trailkit/axtree.hpp"

namespace trailkit::env {

/// Matches an executed action on a given page. Unset fields match anything.
struct ActionMatcher {
    std::string page_id;
    std::string verb;
    std::optional<int> bid;
    std::optional<std::string> text;  // fill/type/select_option payload
    std::optional<std::string> key;   // press combo

    bool matches(const std::string& current_page, const Action& action) const;
};

struct TransitionEffect {
    enum class Kind { goto_page, set_value, toggle_state, no_op };
    Kind kind = Kind::no_op;
    std::string page_id;  // goto_page target; value-effect page ("" = current)
    int bid = 0;
    std::string value;
};

struct Transition {
    ActionMatcher when;
    TransitionEffect effect;
};

struct OutcomeClause {
    enum class Kind { current_page_is, element_value_is };
    Kind kind = Kind::current_page_is;
    std::string page_id;
    int bid = 0;
    std::string value;
};

struct Page {
    std::string page_id;
    std::string url;
    AXNode root;
};

/// A fixture-defined site: immutable pages, scripted transitions, and the
/// outcome predicate for its task. Loaded from a versioned JSON document.
struct SiteFixture {
    std::string site_id;
    std::string initial_url;
    std::vector<Page> pages;
    std::vector<Transition> transitions;
    std::vector<OutcomeClause> outcome;

    const Page* page_by_id(const std::string& page_id) const;
    const Page* page_by_url(const std::string& url) const;

    void validate() const;  // throws FixtureError

    static SiteFixture from_json(const nlohmann::json& j);
    static SiteFixture from_file(const std::string& path);
    nlohmann::json to_json() const;
};

}  // namespace trailkit::env
