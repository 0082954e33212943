#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridlayers/address.hpp"
#include "gridlayers/chart.hpp"
#include "gridlayers/value.hpp"

namespace gridlayers {

class Workbook;

/// Height between consecutive hover layers, in meters.
inline constexpr double kLayerSpacing = 0.025;
inline constexpr int kMaxLevels = 4;
inline constexpr double kSlideDurationMs = 300.0;
inline constexpr double kOverviewDistance = 0.3;
inline constexpr double kOverviewWidth = 2.0;
inline constexpr double kDefaultTabGap = 0.1;
inline constexpr int kDefaultDependencyDepth = 2;

enum class ViewportMode { Aligned, Fixed, Vertical };

/// The part of a sheet mapped onto the physical screen. Screen coordinates
/// are normalized to [0,1] on both axes; each visible cell is 1/cols wide and
/// 1/rows tall.
struct Viewport {
  int sheet = 0;
  CellAddress origin{0, 0, 0};
  int cols = 10;
  int rows = 10;
  ViewportMode mode = ViewportMode::Aligned;
  int extended_margin = 10;

  /// Viewport with the margin set to one screen extent.
  static Viewport make(int sheet, CellAddress origin, int cols, int rows);
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool contains(const Rect& r) const { return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Point3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Display toggles of the arc menu (overview, dependencies, nested functions,
/// clusters, sheets) plus the used-cell mask and per-function link switches.
struct ArcToggles {
  bool overview = false;
  bool dependencies = false;
  bool functions = false;
  bool clusters = false;
  bool sheets = false;
  bool mask = true;
  int dependency_depth = kDefaultDependencyDepth;
  std::set<CellAddress> hidden_links;
  friend bool operator==(const ArcToggles&, const ArcToggles&) = default;
};

/// The arc menu letters in sector order.
inline constexpr char kArcKeys[] = {'O', 'D', 'F', 'C', 'S'};
bool arc_toggle(const ArcToggles& t, char key);
void set_arc_toggle(ArcToggles& t, char key, bool on);

Rect cell_rect(const Viewport& vp, const CellAddress& cell);
Point3 cell_center(const Viewport& vp, const CellAddress& cell, double height = 0.0);
/// Screen rect plus the extended margin on every side.
Rect extended_canvas(const Viewport& vp);
/// Cell under a screen point, or nullopt outside the extended canvas.
std::optional<CellAddress> cell_at(const Viewport& vp, double x, double y);
bool on_screen(const Viewport& vp, const CellAddress& cell);

struct SlideAnimation {
  double duration_ms = 0;
  CellAddress from;
  CellAddress to;
  friend bool operator==(const SlideAnimation&, const SlideAnimation&) = default;
};

struct SlideResult {
  Viewport viewport;
  SlideAnimation animation;
};

/// Page-snaps the origin on every axis where the target lies off screen so
/// the target ends up on the physical screen.
SlideResult slide_to_align(const Viewport& vp, const CellAddress& target);

/// Empty cells inside the bounding box of the populated cells of a sheet.
std::set<CellAddress> used_mask(const Workbook& wb, int sheet);
/// Bounding box of the populated cells of a sheet, if any.
std::optional<CellRange> used_region(const Workbook& wb, int sheet);

struct StackLayer {
  std::string function;
  Value value;
  double height = 0;
  friend bool operator==(const StackLayer&, const StackLayer&) = default;
};

/// One layer per call on the deepest call path, outermost lowest. The
/// lowest layer carries the cell's value; higher layers carry their
/// subexpression evaluated on its own. Throws NotAFunction for formulas
/// without calls and for non-formula cells.
std::vector<StackLayer> nested_stack(const Workbook& wb, const CellAddress& cell);

struct OverviewScene {
  Rect bounds;
  double scale = 1.0;
  CellRange used_region;
  Rect viewport_indicator;
  double distance = kOverviewDistance;
  friend bool operator==(const OverviewScene&, const OverviewScene&) = default;
};

std::optional<OverviewScene> overview_scene(const Workbook& wb, const Viewport& vp);
/// Cell under a point given relative to the overview bounds ([0,1]^2).
CellAddress overview_pick(const OverviewScene& overview, double x, double y);

struct TabOffset {
  int sheet = 0;
  double offset = 0;
  friend bool operator==(const TabOffset&, const TabOffset&) = default;
};

/// Horizontal offsets of every sheet in screen widths. While sliding from
/// `previous_sheet` the fractional active index interpolates linearly.
std::vector<TabOffset> tab_geometry(int sheet_count, int active_sheet, double slide_phase, int previous_sheet,
                                    double tab_gap = kDefaultTabGap);

struct GridCell {
  CellAddress cell;
  std::string text;
  Rect rect;
  bool masked = false;
  bool highlighted = false;
  bool cluster_anchor = false;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct TabScene {
  int sheet = 0;
  std::string name;
  double offset = 0;
  bool highlighted = false;
  friend bool operator==(const TabScene&, const TabScene&) = default;
};

struct OverlayCell {
  CellAddress anchor;
  std::string label;
  std::string value_text;
  bool transparent = true;
  friend bool operator==(const OverlayCell&, const OverlayCell&) = default;
};

struct OverlayLayer {
  int level = 1;
  double height = kLayerSpacing;
  std::vector<OverlayCell> cells;
  friend bool operator==(const OverlayLayer&, const OverlayLayer&) = default;
};

struct StackScene {
  CellAddress cell;
  std::vector<StackLayer> layers;
  friend bool operator==(const StackScene&, const StackScene&) = default;
};

struct Link {
  Point3 from;
  Point3 to;
  std::string tag;  // "dep-L<i>", "cluster" or "source"
  friend bool operator==(const Link&, const Link&) = default;
};

struct MenuEntryScene {
  std::string id;
  std::string label;
  double start_deg = 0;
  double end_deg = 0;
  bool on_path = false;
  friend bool operator==(const MenuEntryScene&, const MenuEntryScene&) = default;
};

struct MenuRingScene {
  int level = 1;
  double height = kLayerSpacing;
  std::vector<MenuEntryScene> entries;
  friend bool operator==(const MenuRingScene&, const MenuRingScene&) = default;
};

struct MenuScene {
  double cx = 0, cy = 0;
  double inner_radius = 0, outer_radius = 0;
  std::vector<std::string> path;
  std::vector<MenuRingScene> rings;
  friend bool operator==(const MenuScene&, const MenuScene&) = default;
};

struct ArcEntryScene {
  char key = 'O';
  bool on = false;
  double start_deg = 0;
  double end_deg = 0;
  friend bool operator==(const ArcEntryScene&, const ArcEntryScene&) = default;
};

struct ChartScene {
  int id = 0;
  Rect rect;
  std::vector<BarGeometry> bars;
  std::optional<Trend> trend;
  friend bool operator==(const ChartScene&, const ChartScene&) = default;
};

/// 3D placement of the display plane. VERTICAL tilts the plane upright in
/// front of the user; the 2D cell mapping is unaffected.
struct Placement {
  ViewportMode mode = ViewportMode::Aligned;
  double tilt_deg = 0;
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct KeyScene {
  std::string label;
  Rect rect;
  friend bool operator==(const KeyScene&, const KeyScene&) = default;
};

struct TextEntryScene {
  CellAddress target;
  std::string text;
  int cursor = 0;
  std::vector<KeyScene> keys;
  friend bool operator==(const TextEntryScene&, const TextEntryScene&) = default;
};

/// Everything a client needs to draw one state of the session.
struct SceneFrame {
  std::uint64_t revision = 0;
  Viewport viewport;
  Placement placement;
  std::string mode;
  std::vector<std::string> selection;
  std::vector<GridCell> grid_cells;
  std::vector<TabScene> tabs;
  std::vector<OverlayLayer> layers;
  std::vector<StackScene> stacks;
  std::vector<Link> links;
  std::vector<ChartScene> charts;
  std::optional<OverviewScene> overview;
  std::optional<MenuScene> menu;
  std::optional<TextEntryScene> text_entry;
  std::optional<SlideAnimation> slide;
  Rect trash;
  std::vector<ArcEntryScene> arc_menu;
  friend bool operator==(const SceneFrame&, const SceneFrame&) = default;
};

}  // namespace gridlayers
