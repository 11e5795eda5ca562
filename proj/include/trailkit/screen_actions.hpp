#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/replay.hpp"

namespace trailkit::store {

// Screen-coordinate gesture dialect (the pyautogui side of the mapping).
struct ScreenClick {
    int x = 0, y = 0;
    bool operator==(const ScreenClick&) const = default;
};
struct ScreenDoubleClick {
    int x = 0, y = 0;
    bool operator==(const ScreenDoubleClick&) const = default;
};
struct ScreenWrite {
    std::string text;
    bool clearing = false;
    bool operator==(const ScreenWrite&) const = default;
};
struct ScreenPress {
    std::string key;
    bool operator==(const ScreenPress&) const = default;
};
struct ScreenHotkey {
    std::vector<std::string> keys;
    bool operator==(const ScreenHotkey&) const = default;
};
struct ScreenMoveTo {
    int x = 0, y = 0;
    bool operator==(const ScreenMoveTo&) const = default;
};
struct ScreenScroll {
    int amount = 0;
    bool operator==(const ScreenScroll&) const = default;
};
struct ScreenDragTo {
    int x = 0, y = 0;
    bool operator==(const ScreenDragTo&) const = default;
};
/// The plugin row of the mapping table: select_option keeps its selector.
struct PluginSelect {
    int bid = 0;
    std::string value;
    bool operator==(const PluginSelect&) const = default;
};

using ScreenAction = std::variant<ScreenClick, ScreenDoubleClick, ScreenWrite, ScreenPress,
                                  ScreenHotkey, ScreenMoveTo, ScreenScroll, ScreenDragTo,
                                  PluginSelect>;

nlohmann::json screen_action_to_json(const ScreenAction& a);
ScreenAction screen_action_from_json(const nlohmann::json& j);

/// Maps one browser-dialect action to its screen-gesture list:
///   click -> click(center)            fill  -> write(text, clearing)
///   type  -> write(text)              press -> press(key)
///   hover -> moveTo(center)           scroll-> scroll(dy)
///   dblclick -> doubleClick(center)   clear -> click, hotkey(ctrl,A), press(delete)
///   select_option -> plugin select    goto/done -> (no gestures)
/// Bid-bearing actions require element_detail; otherwise MappingError.
std::vector<ScreenAction> map_action(const env::Action& action,
                                     const std::optional<replay::ElementDetail>& element_detail);

}  // namespace trailkit::store
