#include "gridlayers/menu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "gridlayers/error.hpp"
#include "gridlayers/formula.hpp"
#include "gridlayers/scene.hpp"

namespace gridlayers {
namespace {

MenuNode leaf(std::string id, std::string label, std::string action) {
  return MenuNode{std::move(id), std::move(label), std::move(action), {}};
}

MenuNode node_from_json(const nlohmann::json& j, bool is_root) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
    throw Error(ErrorCode::Format, "menu node needs a string id");
  MenuNode n;
  n.id = j["id"].get<std::string>();
  n.label = j.value("label", n.id);
  if (j.contains("action")) {
    if (!j["action"].is_string()) throw Error(ErrorCode::Format, "menu action must be a string");
    n.action = j["action"].get<std::string>();
  }
  std::set<std::string> seen;
  for (const auto& c : j.value("children", nlohmann::json::array())) {
    n.children.push_back(node_from_json(c, false));
    if (!seen.insert(n.children.back().id).second)
      throw Error(ErrorCode::Format, "duplicate menu id '" + n.children.back().id + "'");
  }
  if (!is_root && n.children.empty() && !n.action)
    throw Error(ErrorCode::Format, "menu leaf '" + n.id + "' has no action");
  return n;
}

nlohmann::json node_to_json(const MenuNode& n) {
  nlohmann::json j{{"id", n.id}, {"label", n.label}};
  if (n.action) j["action"] = *n.action;
  if (!n.children.empty()) {
    j["children"] = nlohmann::json::array();
    for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  }
  return j;
}

int node_depth(const MenuNode& n) {
  int d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(c));
  return d;
}

}  // namespace

MenuTree MenuTree::defaults() {
  MenuNode functions{"function", "Function", std::nullopt, {}};
  for (const auto& name : supported_functions()) functions.children.push_back(leaf(name, name, "function:" + name));
  MenuNode charts{"chart", "Chart", std::nullopt, {leaf("bar", "Bar", "chart:bar")}};
  MenuNode clusters{"cluster", "Cluster", std::nullopt, {leaf("create", "Create", "cluster:create")}};
  return MenuTree{MenuNode{"root", "", std::nullopt, {functions, charts, clusters}}};
}

MenuTree MenuTree::from_json(const nlohmann::json& doc) { return MenuTree{node_from_json(doc, true)}; }

nlohmann::json MenuTree::to_json() const { return node_to_json(root); }

const MenuNode* MenuTree::node_at(const std::vector<std::string>& path) const {
  const MenuNode* n = &root;
  for (const auto& id : path) {
    auto it = std::find_if(n->children.begin(), n->children.end(), [&](const MenuNode& c) { return c.id == id; });
    if (it == n->children.end()) return nullptr;
    n = &*it;
  }
  return n;
}

int MenuTree::depth() const { return node_depth(root); }

int menu_level_for_height(double height, int depth) {
  const int level = static_cast<int>(std::floor(height / kLayerSpacing + 0.5));
  return std::clamp(level, 0, std::max(depth, 0));
}

double ring_angle(double cx, double cy, double x, double y) {
  double deg = std::atan2(y - cy, x - cx) * 180.0 / std::numbers::pi;
  if (deg < 0) deg += 360.0;
  return deg >= 360.0 ? 0.0 : deg;
}

std::optional<int> menu_sector(int count, double cx, double cy, double x, double y, double inner, double outer) {
  if (count <= 0) return std::nullopt;
  const double r = std::hypot(x - cx, y - cy);
  if (r < inner || r > outer) return std::nullopt;
  const int sector = static_cast<int>(std::floor(ring_angle(cx, cy, x, y) / (360.0 / count)));
  return std::min(sector, count - 1);
}

std::optional<std::string> menu_entry_at(const MenuTree& menu, const std::vector<std::string>& path, int level,
                                         double cx, double cy, double x, double y) {
  if (level < 1 || static_cast<std::size_t>(level - 1) > path.size()) return std::nullopt;
  const MenuNode* owner = menu.node_at({path.begin(), path.begin() + (level - 1)});
  if (!owner) return std::nullopt;
  auto sector = menu_sector(static_cast<int>(owner->children.size()), cx, cy, x, y);
  if (!sector) return std::nullopt;
  return owner->children[static_cast<std::size_t>(*sector)].id;
}

}  // namespace gridlayers
