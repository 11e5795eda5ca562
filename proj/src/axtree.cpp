#include "trailkit/axtree.hpp"

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"

namespace trailkit::env {

using nlohmann::json;

bool role_interactable_by_default(const std::string& role) {
    static const char* kRoles[] = {"link",     "button",   "textbox", "menubar", "menuitem",
                                   "tab",      "combobox", "checkbox", "searchbox", "option",
                                   "radio",    "switch",   "slider",  "spinbutton"};
    for (const char* r : kRoles)
        if (role == r) return true;
    return false;
}

namespace {

void layout_walk(AXNode& node, int depth, int& row) {
    node.box = Box{depth * 16, row * 24, 240, 20};
    ++row;
    for (AXNode& child : node.children) layout_walk(child, depth + 1, row);
}

void serialize_walk(const AXNode& node, int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += '[';
    out += std::to_string(node.bid);
    out += "] ";
    out += node.role;
    out += " '";
    out += node.name;
    out += '\'';
    if (node.value) {
        out += " value='";
        out += *node.value;
        out += '\'';
    }
    out += '\n';
    for (const AXNode& child : node.children) serialize_walk(child, depth + 1, out);
}

}  // namespace

void assign_layout(AXNode& root) {
    int row = 0;
    layout_walk(root, 0, row);
}

std::string serialize_axtree(const AXNode& root) {
    std::string out;
    serialize_walk(root, 0, out);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

AXNode axnode_from_json(const json& j) {
    AXNode node;
    node.bid = j.at("bid").get<int>();
    node.role = j.at("role").get<std::string>();
    node.name = j.value("name", "");
    if (j.contains("value") && !j["value"].is_null())
        node.value = j["value"].get<std::string>();
    node.interactable = j.contains("interactable")
                            ? j["interactable"].get<bool>()
                            : role_interactable_by_default(node.role);
    if (j.contains("children"))
        for (const auto& c : j["children"]) node.children.push_back(axnode_from_json(c));
    if (node.bid <= 0) throw FixtureError("bid must be a positive integer");
    return node;
}

json axnode_to_json(const AXNode& node) {
    json j{{"bid", node.bid},
           {"role", node.role},
           {"name", node.name},
           {"interactable", node.interactable}};
    if (node.value) j["value"] = *node.value;
    if (!node.children.empty()) {
        json kids = json::array();
        for (const AXNode& c : node.children) kids.push_back(axnode_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

const AXNode* find_bid(const AXNode& root, int bid) {
    if (root.bid == bid) return &root;
    for (const AXNode& child : root.children)
        if (const AXNode* hit = find_bid(child, bid)) return hit;
    return nullptr;
}

AXNode* find_bid(AXNode& root, int bid) {
    return const_cast<AXNode*>(find_bid(static_cast<const AXNode&>(root), bid));
}

std::vector<int> collect_bids(const AXNode& root) {
    std::vector<int> bids;
    bids.push_back(root.bid);
    for (const AXNode& child : root.children) {
        std::vector<int> sub = collect_bids(child);
        bids.insert(bids.end(), sub.begin(), sub.end());
    }
    return bids;
}

}  // namespace trailkit::env
