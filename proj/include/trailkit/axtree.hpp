#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trailkit::env {

struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int center_x() const { return x + w / 2; }
    int center_y() const { return y + h / 2; }
};

/// One accessibility-tree element. `interactable` defaults from the role
/// table below; fixtures may override it per node.
struct AXNode {
    int bid = 0;
    std::string role;
    std::string name;
    std::optional<std::string> value;
    std::vector<AXNode> children;
    bool interactable = false;
    Box box;
};

bool role_interactable_by_default(const std::string& role);

/// Assigns the synthetic layout: depth-first, one row per node.
/// box = {x: depth*16, y: row*24, w: 240, h: 20}.
void assign_layout(AXNode& root);

/// Depth-first serialization, two-space indent per level, each line
/// `[<bid>] <role> '<name>'` with a ` value='<v>'` suffix when present.
std::string serialize_axtree(const AXNode& root);

AXNode axnode_from_json(const nlohmann::json& j);
nlohmann::json axnode_to_json(const AXNode& node);

/// Pointer to the node with this bid, or nullptr.
const AXNode* find_bid(const AXNode& root, int bid);
AXNode* find_bid(AXNode& root, int bid);

/// All bids in depth-first order.
std::vector<int> collect_bids(const AXNode& root);

}  // namespace trailkit::env
