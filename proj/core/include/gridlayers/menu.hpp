#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gridlayers {

inline constexpr double kMenuRingRadius = 0.08;
inline constexpr double kMenuDeadZone = 0.15 * kMenuRingRadius;

/// One entry of the hierarchical pie menu. Leaves carry an action string
/// such as "function:SUM", "chart:bar" or "cluster:create".
struct MenuNode {
  std::string id;
  std::string label;
  std::optional<std::string> action;
  std::vector<MenuNode> children;
  friend bool operator==(const MenuNode&, const MenuNode&) = default;
};

/// Menu hierarchy. The root is level 0; the ring shown at hover level L
/// holds the children of the entry chosen at level L-1.
struct MenuTree {
  MenuNode root;

  /// Function / Chart / Cluster with the supported functions and a bar chart.
  static MenuTree defaults();
  /// Reads {"id","label","action"?,"children"?} nodes. Throws Error(Format)
  /// on leaves without actions or duplicate sibling ids.
  static MenuTree from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  /// Node reached by following entry ids from the root; nullptr if the path
  /// does not exist.
  const MenuNode* node_at(const std::vector<std::string>& path) const;
  /// Length of the longest root-to-leaf path.
  int depth() const;
  friend bool operator==(const MenuTree&, const MenuTree&) = default;
};

/// Hover level for a pen height: clamp(floor(h / layerSpacing + 0.5), 0, depth).
int menu_level_for_height(double height, int depth);

/// Angle of (x,y) around (cx,cy) in degrees within [0,360), measured with
/// atan2(y - cy, x - cx).
double ring_angle(double cx, double cy, double x, double y);

/// Sector index among `count` equal sectors starting at 0 degrees, or
/// nullopt inside the dead zone or beyond the ring radius.
std::optional<int> menu_sector(int count, double cx, double cy, double x, double y,
                               double inner = kMenuDeadZone, double outer = kMenuRingRadius);

/// Entry id under (x,y) on the ring for hover level `level` (>= 1), given the
/// entries already chosen on lower levels.
std::optional<std::string> menu_entry_at(const MenuTree& menu, const std::vector<std::string>& path, int level,
                                         double cx, double cy, double x, double y);

}  // namespace gridlayers
