#include "trailkit/screen_actions.hpp"

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"

namespace trailkit::store {

using nlohmann::json;

json screen_action_to_json(const ScreenAction& a) {
    struct Dump {
        json operator()(const ScreenClick& s) const {
            return json{{"gesture", "click"}, {"x", s.x}, {"y", s.y}};
        }
        json operator()(const ScreenDoubleClick& s) const {
            return json{{"gesture", "doubleClick"}, {"x", s.x}, {"y", s.y}};
        }
        json operator()(const ScreenWrite& s) const {
            return json{{"gesture", "write"}, {"text", s.text}, {"clearing", s.clearing}};
        }
        json operator()(const ScreenPress& s) const {
            return json{{"gesture", "press"}, {"key", s.key}};
        }
        json operator()(const ScreenHotkey& s) const {
            return json{{"gesture", "hotkey"}, {"keys", s.keys}};
        }
        json operator()(const ScreenMoveTo& s) const {
            return json{{"gesture", "moveTo"}, {"x", s.x}, {"y", s.y}};
        }
        json operator()(const ScreenScroll& s) const {
            return json{{"gesture", "scroll"}, {"amount", s.amount}};
        }
        json operator()(const ScreenDragTo& s) const {
            return json{{"gesture", "dragTo"}, {"x", s.x}, {"y", s.y}};
        }
        json operator()(const PluginSelect& s) const {
            return json{{"gesture", "plugin_select"}, {"bid", s.bid}, {"value", s.value}};
        }
    };
    return std::visit(Dump{}, a);
}

ScreenAction screen_action_from_json(const json& j) {
    const std::string gesture = j.at("gesture").get<std::string>();
    if (gesture == "click") return ScreenClick{j.at("x").get<int>(), j.at("y").get<int>()};
    if (gesture == "doubleClick")
        return ScreenDoubleClick{j.at("x").get<int>(), j.at("y").get<int>()};
    if (gesture == "write")
        return ScreenWrite{j.at("text").get<std::string>(), j.at("clearing").get<bool>()};
    if (gesture == "press") return ScreenPress{j.at("key").get<std::string>()};
    if (gesture == "hotkey") return ScreenHotkey{j.at("keys").get<std::vector<std::string>>()};
    if (gesture == "moveTo") return ScreenMoveTo{j.at("x").get<int>(), j.at("y").get<int>()};
    if (gesture == "scroll") return ScreenScroll{j.at("amount").get<int>()};
    if (gesture == "dragTo") return ScreenDragTo{j.at("x").get<int>(), j.at("y").get<int>()};
    if (gesture == "plugin_select")
        return PluginSelect{j.at("bid").get<int>(), j.at("value").get<std::string>()};
    throw MappingError("unknown screen gesture: " + gesture);
}

std::vector<ScreenAction> map_action(const env::Action& action,
                                     const std::optional<replay::ElementDetail>& element_detail) {
    const int bid = env::action_bid(action);
    if (bid > 0 && !element_detail)
        throw MappingError(std::string("bid-bearing action '") + env::action_verb(action) +
                           "' has no element detail");
    const int cx = element_detail ? element_detail->center_x : 0;
    const int cy = element_detail ? element_detail->center_y : 0;

    struct Mapper {
        int cx, cy;
        const std::optional<replay::ElementDetail>& detail;

        std::vector<ScreenAction> operator()(const env::GotoAction&) const { return {}; }
        std::vector<ScreenAction> operator()(const env::DoneAction&) const { return {}; }
        std::vector<ScreenAction> operator()(const env::ClickAction&) const {
            return {ScreenClick{cx, cy}};
        }
        std::vector<ScreenAction> operator()(const env::DblClickAction&) const {
            return {ScreenDoubleClick{cx, cy}};
        }
        std::vector<ScreenAction> operator()(const env::FillAction& a) const {
            return {ScreenWrite{a.text, true}};
        }
        std::vector<ScreenAction> operator()(const env::TypeAction& a) const {
            return {ScreenWrite{a.text, false}};
        }
        std::vector<ScreenAction> operator()(const env::PressAction& a) const {
            return {ScreenPress{a.key_combo}};
        }
        std::vector<ScreenAction> operator()(const env::HoverAction&) const {
            return {ScreenMoveTo{cx, cy}};
        }
        std::vector<ScreenAction> operator()(const env::ScrollAction& a) const {
            return {ScreenScroll{a.dy}};
        }
        std::vector<ScreenAction> operator()(const env::SelectOptionAction& a) const {
            return {PluginSelect{a.bid, a.value}};
        }
        std::vector<ScreenAction> operator()(const env::ClearAction&) const {
            // The table's three-gesture row: select all, then delete.
            return {ScreenClick{cx, cy}, ScreenHotkey{{"ctrl", "A"}}, ScreenPress{"delete"}};
        }
    };
    return std::visit(Mapper{cx, cy, element_detail}, action);
}

}  // namespace trailkit::store
