#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gridlayers/address.hpp"
#include "gridlayers/chart.hpp"
#include "gridlayers/menu.hpp"
#include "gridlayers/scene.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers {

// ---------------------------------------------------------------------------
// Input events. Coordinates are normalized to the tablet screen; x < 0 or
// x > 1 points in the air beyond the bezel.

enum class PenButtonId { Primary, Secondary };

struct PenDown {
  double x = 0, y = 0;
  friend bool operator==(const PenDown&, const PenDown&) = default;
};
struct PenMove {
  double x = 0, y = 0;
  friend bool operator==(const PenMove&, const PenMove&) = default;
};
struct PenUp {
  double x = 0, y = 0;
  friend bool operator==(const PenUp&, const PenUp&) = default;
};
struct PenHover {
  double x = 0, y = 0, h = 0;
  friend bool operator==(const PenHover&, const PenHover&) = default;
};
struct PenButton {
  PenButtonId button = PenButtonId::Primary;
  bool pressed = false;
  friend bool operator==(const PenButton&, const PenButton&) = default;
};
struct BezelTap {
  friend bool operator==(const BezelTap&, const BezelTap&) = default;
};
struct GazeAt {
  std::optional<int> tab;
  friend bool operator==(const GazeAt&, const GazeAt&) = default;
};
struct Tick {
  double dt_ms = 0;
  friend bool operator==(const Tick&, const Tick&) = default;
};

using InputEvent = std::variant<PenDown, PenMove, PenUp, PenHover, PenButton, BezelTap, GazeAt, Tick>;

// ---------------------------------------------------------------------------
// Effects

struct SetCellText {
  CellAddress cell;
  std::string text;
  friend bool operator==(const SetCellText&, const SetCellText&) = default;
};
struct DefineClusterCmd {
  std::string label;
  CellAddress anchor;
  int level = 1;
  std::vector<RefSpec> members;
  friend bool operator==(const DefineClusterCmd&, const DefineClusterCmd&) = default;
};
struct ModifyClusterCmd {
  int cluster_id = 0;
  std::vector<RefSpec> add;
  std::vector<RefSpec> remove;
  friend bool operator==(const ModifyClusterCmd&, const ModifyClusterCmd&) = default;
};
struct RenameClusterCmd {
  std::string from;
  std::string to;
  friend bool operator==(const RenameClusterCmd&, const RenameClusterCmd&) = default;
};
struct AddSourceCmd {
  CellAddress cell;
  std::vector<RefSpec> refs;
  friend bool operator==(const AddSourceCmd&, const AddSourceCmd&) = default;
};
struct RemoveSourceCmd {
  CellAddress cell;
  CellAddress victim;
  friend bool operator==(const RemoveSourceCmd&, const RemoveSourceCmd&) = default;
};
struct CreateChartCmd {
  RefSpec series;
  CellAddress anchor;
  int width_cells = 1;
  int height_cells = 1;
  friend bool operator==(const CreateChartCmd&, const CreateChartCmd&) = default;
};
struct SetChartTrendCmd {
  int chart_id = 0;
  TrendKind kind = TrendKind::Linear;
  friend bool operator==(const SetChartTrendCmd&, const SetChartTrendCmd&) = default;
};

/// A request for exactly one sheet-engine operation.
using EngineMutation = std::variant<SetCellText, DefineClusterCmd, ModifyClusterCmd, RenameClusterCmd, AddSourceCmd,
                                    RemoveSourceCmd, CreateChartCmd, SetChartTrendCmd>;

struct ViewportCommand {
  enum class Kind { SwitchSheet, Slide, SetMode };
  Kind kind = Kind::Slide;
  int sheet = 0;
  SlideAnimation animation;
  ViewportMode mode = ViewportMode::Aligned;
  friend bool operator==(const ViewportCommand&, const ViewportCommand&) = default;
};
struct SceneDirty {
  friend bool operator==(const SceneDirty&, const SceneDirty&) = default;
};
/// Asks the client for a label for a freshly created cluster.
struct LabelPrompt {
  std::string label;
  CellAddress anchor;
  friend bool operator==(const LabelPrompt&, const LabelPrompt&) = default;
};
/// An absorbed gesture or a rejected mutation.
struct Diagnostic {
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Effect = std::variant<EngineMutation, ViewportCommand, SceneDirty, LabelPrompt, Diagnostic>;

/// Applies a mutation to the workbook. Throws gridlayers::Error when the
/// engine rejects it.
RecalcResult apply_mutation(Workbook& wb, const EngineMutation& m);
/// One-line human-readable rendering, e.g. "set_cell A4 =SUM(A1)".
std::string describe(const EngineMutation& m, const SheetNames& names);

// ---------------------------------------------------------------------------
// State

enum class Mode {
  Idle,
  SelectingCells,
  MenuOpen,
  CollectingSources,  // function/cluster chosen for a target, gathering sources
  PlacingFunction,    // function/cluster chosen for selected sources, awaiting a target
  DraggingLink,       // selection lifted above the surface, awaiting a drop target
  DraggingToTrash,
  SizingChart,
  TextEntry,
};

std::string_view mode_name(Mode m);

struct TrashPayload {
  CellAddress owner;  // function cell or cluster anchor
  CellAddress victim;
  std::optional<int> cluster_id;
  friend bool operator==(const TrashPayload&, const TrashPayload&) = default;
};

struct InteractionState {
  Mode mode = Mode::Idle;
  Viewport viewport;
  ArcToggles toggles;
  double tab_gap = kDefaultTabGap;
  std::shared_ptr<const MenuTree> menu = std::make_shared<const MenuTree>(MenuTree::defaults());

  std::vector<RefSpec> selection;

  double pen_x = 0.5, pen_y = 0.5, pen_h = 0;
  bool pen_down = false;
  bool primary_held = false;
  bool taps_during_primary = false;
  bool secondary_held = false;

  // Contact in progress.
  std::optional<CellAddress> contact_start;
  std::optional<CellAddress> contact_cell;
  bool absorb_up = false;
  std::optional<char> arc_press;
  std::optional<std::pair<double, double>> down_point;

  // Menu.
  std::vector<std::string> menu_path;
  double menu_cx = 0, menu_cy = 0;
  std::optional<CellAddress> menu_target;  // set when invoked on a single empty cell

  // Chosen menu action waiting for its target or sources.
  std::string pending_action;
  std::optional<CellAddress> target;

  std::optional<TrashPayload> trash;

  std::optional<RefSpec> chart_series;
  std::optional<CellAddress> chart_anchor;
  std::optional<CellAddress> chart_corner;

  std::vector<Point2> stroke;
  std::optional<int> stroke_chart;

  std::optional<std::string> pending_label;

  std::optional<int> gazed_tab;
  int previous_sheet = 0;
  double slide_remaining_ms = 0;
  std::optional<SlideAnimation> slide;
  std::vector<InputEvent> deferred;

  std::optional<CellAddress> text_target;
  std::string text;
  int text_cursor = 0;
};

struct Transition {
  InteractionState state;
  std::vector<Effect> effects;
};

/// Deterministic transition function. Reads the workbook, never mutates it.
/// Button events that arrive while a slide animation runs are queued in
/// `deferred` (along with everything after them) until the slide ends.
Transition handle_event(const InteractionState& state, const InputEvent& event, const Workbook& wb);

/// Owns a state and applies the engine mutations it emits. Rejected
/// mutations turn into Diagnostic effects. Deferred events are replayed as
/// soon as the slide that held them finishes.
class Machine {
 public:
  struct StepResult {
    std::vector<Effect> effects;
    std::vector<RecalcResult> recalcs;
    int mutations = 0;
  };

  explicit Machine(InteractionState state = {}) : state_(std::move(state)) {}
  StepResult step(const InputEvent& event, Workbook& wb);
  const InteractionState& state() const { return state_; }
  InteractionState& state() { return state_; }

 private:
  void run(const InputEvent& event, Workbook& wb, StepResult& out);
  InteractionState state_;
};

// ---------------------------------------------------------------------------
// Gesture geometry

enum class StrokeKind { None, Linear, Poly2 };
std::string_view stroke_kind_name(StrokeKind k);

/// straightness = max perpendicular deviation / chord length: < 0.1 Linear,
/// < 0.5 Poly2, otherwise None. Chords under 10% of the chart width are None.
StrokeKind classify_stroke(const std::vector<Point2>& points, double chart_width = 1.0);

/// Sheet and cell addressed by an in-air point beyond the bezel. Neighbors
/// sit one screen width plus tab gap apart and share the viewport's origin.
/// Throws Error(NoSheet) when no sheet exists there.
std::pair<int, CellAddress> map_in_air(double x, double y, int active_sheet, int sheet_count, const Viewport& vp,
                                       double tab_gap = kDefaultTabGap);

/// Trash bin widget in the lower-left corner of the screen.
inline constexpr Rect kTrashRect{0.0, 0.88, 0.1, 1.0};

/// Drop of a trash payload: removal when inside the bin, nothing otherwise.
std::vector<Effect> trash_drop(const TrashPayload& payload, double x, double y);

/// Quarter-ring arc menu at the lower-right screen corner.
inline constexpr double kArcInner = 0.06;
inline constexpr double kArcOuter = 0.12;
std::optional<char> arc_entry_at(double x, double y);
std::vector<ArcEntryScene> arc_menu_scene(const ArcToggles& t);

/// Virtual keyboard of the text-entry mode, in the lower half of the screen.
const std::vector<KeyScene>& virtual_keyboard();
std::optional<std::string> key_at(double x, double y);

/// Screen rect of a chart on the current viewport.
Rect chart_rect(const Viewport& vp, const ChartSpec& chart);

/// Rings shown for the current menu path (at least 1).
int open_ring_count(const InteractionState& s);
MenuScene menu_scene(const InteractionState& s);

}  // namespace gridlayers
