#pragma once

#include <string>
#include <variant>

namespace trailkit::env {

// The browser-native action dialect: one struct per verb.
struct GotoAction {
    std::string url;
    bool operator==(const GotoAction&) const = default;
};
struct ClickAction {
    int bid = 0;
    bool operator==(const ClickAction&) const = default;
};
struct DblClickAction {
    int bid = 0;
    bool operator==(const DblClickAction&) const = default;
};
struct FillAction {
    int bid = 0;
    std::string text;
    bool operator==(const FillAction&) const = default;
};
struct TypeAction {
    int bid = 0;
    std::string text;
    bool operator==(const TypeAction&) const = default;
};
struct PressAction {
    std::string key_combo;
    bool operator==(const PressAction&) const = default;
};
struct HoverAction {
    int bid = 0;
    bool operator==(const HoverAction&) const = default;
};
struct ScrollAction {
    int dx = 0;
    int dy = 0;
    bool operator==(const ScrollAction&) const = default;
};
struct SelectOptionAction {
    int bid = 0;
    std::string value;
    bool operator==(const SelectOptionAction&) const = default;
};
struct ClearAction {
    int bid = 0;
    bool operator==(const ClearAction&) const = default;
};
struct DoneAction {
    std::string message;  // empty when done() carries no message
    bool operator==(const DoneAction&) const = default;
};

using Action = std::variant<GotoAction, ClickAction, DblClickAction, FillAction, TypeAction,
                            PressAction, HoverAction, ScrollAction, SelectOptionAction,
                            ClearAction, DoneAction>;

/// Parses `verb(args)`; bids may be quoted or bare, string literals are
/// single- or double-quoted with backslash escapes, whitespace is tolerated.
/// Throws ActionParseError with the offending position.
Action parse_action(const std::string& text);

/// Canonical textual form; parse_action(render_action(a)) == a.
std::string render_action(const Action& action);

const char* action_verb(const Action& action);

/// The element bid an action addresses, or 0 for goto/press/scroll/done.
int action_bid(const Action& action);

bool is_done(const Action& action);

}  // namespace trailkit::env
