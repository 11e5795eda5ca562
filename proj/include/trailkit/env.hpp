#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trailkit/fixture.hpp"

namespace trailkit::env {

struct Observation {
    std::string url;
    std::string axtree_text;
    std::string screenshot_ref;  // content hash placeholder, no renderer
    std::optional<std::string> last_action_error;
};

/// Environment state is a value: copy it to fork a session. It is fully
/// reconstructable from (fixture, action_log).
struct EnvState {
    const SiteFixture* fixture = nullptr;
    std::string current_page_id;
    std::map<std::pair<std::string, int>, std::string> values;  // (page_id, bid) -> value
    int scroll_x = 0;
    int scroll_y = 0;
    uint64_t step_count = 0;
    bool finished = false;
    std::vector<Action> action_log;
};

/// Routes initial_url; identical observations on every call.
std::pair<EnvState, Observation> reset(const SiteFixture& fixture);

/// Like reset, but navigates directly to `start_url` when it routes to a
/// page (the tutorial's target_web_url); falls back to initial_url.
std::pair<EnvState, Observation> reset_at(const SiteFixture& fixture,
                                          const std::optional<std::string>& start_url);

/// Executes one action. Never throws: failures (unknown bid, non-interactable
/// element, unroutable goto) surface as observation.last_action_error.
std::pair<EnvState, Observation> step(EnvState state, const Action& action);

bool check_outcome(const EnvState& state, const SiteFixture& fixture);

/// The effective current value of an element (state override, else fixture).
std::string element_value(const EnvState& state, const std::string& page_id, int bid);

Observation observe(const EnvState& state);

/// The current page with state value overrides applied and layout assigned.
AXNode effective_tree(const EnvState& state);

}  // namespace trailkit::env
