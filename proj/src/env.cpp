#include "trailkit/env.hpp"

#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"

namespace trailkit::env {

namespace {

const Page& current_page(const EnvState& state) {
    const Page* p = state.fixture->page_by_id(state.current_page_id);
    if (!p) throw FixtureError("state references unknown page: " + state.current_page_id);
    return *p;
}

void apply_values(AXNode& node, const EnvState& state, const std::string& page_id) {
    auto it = state.values.find({page_id, node.bid});
    if (it != state.values.end()) {
        if (it->second.empty()) node.value.reset();
        else node.value = it->second;
    }
    for (AXNode& child : node.children) apply_values(child, state, page_id);
}

}  // namespace

AXNode effective_tree(const EnvState& state) {
    const Page& page = current_page(state);
    AXNode tree = page.root;  // boxes already assigned at fixture load
    apply_values(tree, state, page.page_id);
    return tree;
}

std::string element_value(const EnvState& state, const std::string& page_id, int bid) {
    auto it = state.values.find({page_id, bid});
    if (it != state.values.end()) return it->second;
    const Page* page = state.fixture->page_by_id(page_id);
    if (!page) return "";
    const AXNode* node = find_bid(page->root, bid);
    return node && node->value ? *node->value : "";
}

Observation observe(const EnvState& state) {
    const Page& page = current_page(state);
    Observation obs;
    obs.url = page.url;
    obs.axtree_text = serialize_axtree(effective_tree(state));

    // Screenshot placeholder: hash of (page, element values, scroll offset).
    uint64_t h = fnv1a64(state.fixture->site_id);
    h = fnv1a64(page.page_id, h);
    for (const auto& [key, value] : state.values) {
        if (key.first != page.page_id) continue;
        h = fnv1a64(std::to_string(key.second), h);
        h = fnv1a64("=", h);
        h = fnv1a64(value, h);
        h = fnv1a64(";", h);
    }
    h = fnv1a64(std::to_string(state.scroll_x) + "," + std::to_string(state.scroll_y), h);
    obs.screenshot_ref = "shot-" + to_hex(h);
    return obs;
}

std::pair<EnvState, Observation> reset(const SiteFixture& fixture) {
    return reset_at(fixture, std::nullopt);
}

std::pair<EnvState, Observation> reset_at(const SiteFixture& fixture,
                                          const std::optional<std::string>& start_url) {
    const Page* page = nullptr;
    if (start_url) page = fixture.page_by_url(*start_url);
    if (!page) page = fixture.page_by_url(fixture.initial_url);
    if (!page) throw FixtureError("initial_url does not route to any page: " + fixture.initial_url);
    EnvState state;
    state.fixture = &fixture;
    state.current_page_id = page->page_id;
    return {state, observe(state)};
}

std::pair<EnvState, Observation> step(EnvState state, const Action& action) {
    const SiteFixture& fixture = *state.fixture;
    const Page& page = current_page(state);
    std::optional<std::string> error;

    const int bid = action_bid(action);
    const AXNode* target = nullptr;
    if (bid > 0) {
        target = find_bid(page.root, bid);
        if (!target) {
            error = "unknown bid " + std::to_string(bid);
        } else if (!target->interactable) {
            error = "element " + std::to_string(bid) + " is not interactable";
        }
    }

    if (!error) {
        if (const auto* a = std::get_if<GotoAction>(&action)) {
            if (const Page* dest = fixture.page_by_url(a->url))
                state.current_page_id = dest->page_id;
            else
                error = "no page routes from url " + a->url;
        } else if (const auto* a = std::get_if<FillAction>(&action)) {
            state.values[{page.page_id, a->bid}] = a->text;
        } else if (const auto* a = std::get_if<TypeAction>(&action)) {
            // type() appends to the current content; fill() replaces it.
            state.values[{page.page_id, a->bid}] =
                element_value(state, page.page_id, a->bid) + a->text;
        } else if (const auto* a = std::get_if<ClearAction>(&action)) {
            state.values[{page.page_id, a->bid}] = "";
        } else if (const auto* a = std::get_if<SelectOptionAction>(&action)) {
            state.values[{page.page_id, a->bid}] = a->value;
        } else if (const auto* a = std::get_if<ScrollAction>(&action)) {
            state.scroll_x += a->dx;
            state.scroll_y += a->dy;
        } else if (std::holds_alternative<DoneAction>(action)) {
            state.finished = true;
        }

        // Scripted transitions fire only for actions that executed cleanly.
        for (const Transition& t : fixture.transitions) {
            if (!t.when.matches(page.page_id, action)) continue;
            const TransitionEffect& e = t.effect;
            switch (e.kind) {
                case TransitionEffect::Kind::goto_page:
                    state.current_page_id = e.page_id;
                    break;
                case TransitionEffect::Kind::set_value: {
                    const std::string target_page = e.page_id.empty() ? page.page_id : e.page_id;
                    state.values[{target_page, e.bid}] = e.value;
                    break;
                }
                case TransitionEffect::Kind::toggle_state: {
                    const std::string target_page = e.page_id.empty() ? page.page_id : e.page_id;
                    const std::string current = element_value(state, target_page, e.bid);
                    state.values[{target_page, e.bid}] = current == e.value ? "" : e.value;
                    break;
                }
                case TransitionEffect::Kind::no_op: break;
            }
            break;
        }
    }

    ++state.step_count;
    state.action_log.push_back(action);
    Observation obs = observe(state);
    obs.last_action_error = error;
    return {std::move(state), std::move(obs)};
}

bool check_outcome(const EnvState& state, const SiteFixture& fixture) {
    for (const OutcomeClause& c : fixture.outcome) {
        switch (c.kind) {
            case OutcomeClause::Kind::current_page_is:
                if (state.current_page_id != c.page_id) return false;
                break;
            case OutcomeClause::Kind::element_value_is:
                if (element_value(state, c.page_id, c.bid) != c.value) return false;
                break;
        }
    }
    return true;
}

}  // namespace trailkit::env
