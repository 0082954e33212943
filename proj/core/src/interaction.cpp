#include "gridlayers/interaction.hpp"

#include <algorithm>
#include <cmath>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool function_root(const Workbook& wb, const CellAddress& cell) {
  const auto* f = std::get_if<FormulaCell>(&wb.content(cell));
  return f && std::holds_alternative<FuncCall>(f->ast.node);
}

bool covers(const RefSpec& ref, const CellAddress& cell) {
  if (const auto* c = std::get_if<CellAddress>(&ref)) return *c == cell;
  if (const auto* r = std::get_if<CellRange>(&ref)) return r->contains(cell);
  return false;
}

std::string build_formula(const std::string& function, const std::vector<RefSpec>& refs, const Workbook& wb,
                          int sheet) {
  std::vector<Expr> args;
  for (const auto& r : refs) args.push_back(ref(r));
  return print_formula(call(function, std::move(args)), wb.context(sheet));
}

class Handler {
 public:
  Handler(InteractionState& s, const Workbook& wb, std::vector<Effect>& fx) : s_(s), wb_(wb), fx_(fx) {}

  void operator()(const PenHover& e) {
    s_.pen_x = e.x;
    s_.pen_y = e.y;
    s_.pen_h = std::max(0.0, e.h);
    s_.pen_down = false;
    switch (s_.mode) {
      case Mode::MenuOpen:
        hover_menu();
        break;
      case Mode::Idle:
      case Mode::SelectingCells:
        if (!s_.selection.empty() && !s_.primary_held && menu_level_for_height(s_.pen_h, kMaxLevels) >= 1) {
          s_.mode = Mode::DraggingLink;
          dirty();
        } else if (s_.selection.empty()) {
          track_stroke(e.x, e.y);
        }
        break;
      default:
        break;
    }
  }

  void operator()(const PenDown& e) {
    finish_stroke();
    s_.pen_x = e.x;
    s_.pen_y = e.y;
    s_.pen_h = 0;
    s_.pen_down = true;
    s_.absorb_up = false;
    s_.arc_press.reset();
    s_.contact_start.reset();
    s_.contact_cell.reset();
    s_.down_point = std::make_pair(e.x, e.y);

    if (s_.mode == Mode::TextEntry) return;
    if (s_.mode == Mode::MenuOpen) {
      close_menu();
      s_.absorb_up = true;
      return;
    }
    if (auto key = arc_entry_at(e.x, e.y); key && s_.mode != Mode::DraggingLink) {
      s_.arc_press = key;
      return;
    }
    auto cell = point_cell(e.x, e.y);

    if (s_.mode == Mode::DraggingLink) {
      if (cell && function_root(wb_, *cell)) {
        mutate(AddSourceCmd{*cell, s_.selection});
        focus(*cell);
        s_.absorb_up = true;
        return;
      }
      if (const ClusterCell* c = cell ? wb_.cluster_at(*cell) : nullptr) {
        mutate(ModifyClusterCmd{c->id, s_.selection, {}});
        focus(*cell);
        s_.absorb_up = true;
        return;
      }
      diagnose("link dropped outside a function or cluster");
      s_.mode = Mode::SelectingCells;
    }

    if (!cell) {
      s_.absorb_up = true;
      return;
    }
    if (s_.mode == Mode::SizingChart) {
      s_.chart_anchor = cell;
      s_.chart_corner = cell;
      return;
    }
    if (s_.mode == Mode::SelectingCells && s_.selection.size() == 1 && !s_.primary_held) {
      if (const auto* owner = std::get_if<CellAddress>(&s_.selection.front())) {
        if (auto payload = trash_payload(*owner, *cell)) {
          s_.trash = payload;
          s_.mode = Mode::DraggingToTrash;
          dirty();
          return;
        }
      }
    }
    s_.contact_start = cell;
    s_.contact_cell = cell;
  }

  void operator()(const PenMove& e) {
    s_.pen_x = e.x;
    s_.pen_y = e.y;
    s_.pen_h = 0;
    if (s_.mode == Mode::SizingChart && s_.chart_anchor) {
      if (auto cell = point_cell(e.x, e.y, true)) s_.chart_corner = cell;
      return;
    }
    if (s_.contact_start) {
      if (auto cell = point_cell(e.x, e.y, true); cell && cell->sheet == s_.contact_start->sheet)
        s_.contact_cell = cell;
    }
  }

  void operator()(const PenUp& e) {
    s_.pen_x = e.x;
    s_.pen_y = e.y;
    s_.pen_down = false;
    const auto down = s_.down_point;
    s_.down_point.reset();
    if (s_.absorb_up) {
      s_.absorb_up = false;
      return;
    }
    if (s_.mode == Mode::TextEntry) {
      if (down) text_tap(e.x, e.y);
      return;
    }
    if (s_.arc_press) {
      const char key = *s_.arc_press;
      s_.arc_press.reset();
      if (arc_entry_at(e.x, e.y) == key) {
        set_arc_toggle(s_.toggles, key, !arc_toggle(s_.toggles, key));
        dirty();
      }
      return;
    }
    if (s_.mode == Mode::DraggingToTrash) {
      const TrashPayload payload = *s_.trash;
      s_.trash.reset();
      s_.mode = Mode::SelectingCells;
      auto drop = trash_drop(payload, e.x, e.y);
      if (!drop.empty()) {
        fx_.insert(fx_.end(), drop.begin(), drop.end());
        dirty();
      } else if (point_cell(e.x, e.y, true) == payload.victim) {
        pick(payload.victim);
      } else {
        diagnose("dropped outside the trash bin");
        dirty();
      }
      return;
    }
    if (s_.mode == Mode::SizingChart) {
      if (!s_.chart_anchor) return;
      if (auto cell = point_cell(e.x, e.y, true); cell && cell->sheet == s_.chart_anchor->sheet) s_.chart_corner = cell;
      const CellRange r = CellRange::normalized(*s_.chart_anchor, *s_.chart_corner);
      mutate(CreateChartCmd{*s_.chart_series, r.start, r.cols(), r.rows()});
      s_.chart_series.reset();
      s_.chart_anchor.reset();
      s_.chart_corner.reset();
      s_.selection.clear();
      s_.mode = Mode::Idle;
      return;
    }
    if (!s_.contact_start) return;
    const CellAddress start = *s_.contact_start;
    CellAddress end = s_.contact_cell.value_or(start);
    if (auto cell = point_cell(e.x, e.y, true); cell && cell->sheet == start.sheet) end = *cell;
    s_.contact_start.reset();
    s_.contact_cell.reset();
    if (start == end) pick(start);
    else pick(CellRange::normalized(start, end));
  }

  void operator()(const PenButton& e) {
    if (e.button == PenButtonId::Primary) {
      if (e.pressed) {
        s_.primary_held = true;
        s_.taps_during_primary = false;
        return;
      }
      if (!s_.primary_held) return;
      s_.primary_held = false;
      if (s_.taps_during_primary) {
        s_.taps_during_primary = false;
        return;
      }
      primary_click();
      return;
    }
    if (e.pressed) {
      s_.secondary_held = true;
      return;
    }
    if (!s_.secondary_held) return;
    s_.secondary_held = false;
    secondary_click();
  }

  void operator()(const BezelTap&) {
    if (!s_.gazed_tab || *s_.gazed_tab == s_.viewport.sheet) return;
    const int to = *s_.gazed_tab;
    if (to < 0 || to >= wb_.sheet_count()) return;
    s_.previous_sheet = s_.viewport.sheet;
    s_.viewport.sheet = to;
    s_.viewport.origin.sheet = to;
    start_slide({kSlideDurationMs, s_.viewport.origin, s_.viewport.origin});
    ViewportCommand cmd;
    cmd.kind = ViewportCommand::Kind::SwitchSheet;
    cmd.sheet = to;
    cmd.animation = *s_.slide;
    cmd.mode = s_.viewport.mode;
    fx_.emplace_back(cmd);
    dirty();
  }

  void operator()(const GazeAt& e) {
    if (s_.gazed_tab == e.tab) return;
    s_.gazed_tab = e.tab;
    dirty();
  }

  void operator()(const Tick& e) {
    if (s_.slide_remaining_ms <= 0) return;
    s_.slide_remaining_ms = std::max(0.0, s_.slide_remaining_ms - std::max(0.0, e.dt_ms));
    if (s_.slide_remaining_ms == 0) {
      s_.slide.reset();
      s_.previous_sheet = s_.viewport.sheet;
    }
    dirty();
  }

 private:
  void dirty() {
    if (fx_.empty() || !std::holds_alternative<SceneDirty>(fx_.back())) fx_.emplace_back(SceneDirty{});
  }
  void diagnose(std::string message) { fx_.emplace_back(Diagnostic{std::move(message)}); }
  void mutate(EngineMutation m) {
    fx_.emplace_back(std::move(m));
    dirty();
  }

  void start_slide(SlideAnimation anim) {
    s_.slide = anim;
    s_.slide_remaining_ms = anim.duration_ms;
  }

  void focus(const CellAddress& cell) {
    s_.selection = {cell};
    s_.mode = Mode::SelectingCells;
  }

  // Cell addressed by a screen point, honoring in-air sheet access and the
  // extended margin rules of the viewport mode.
  std::optional<CellAddress> point_cell(double x, double y, bool quiet = false) {
    if (x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0) return cell_at(s_.viewport, x, y);
    if (s_.toggles.sheets && (x < 0.0 || x >= 1.0)) {
      try {
        return map_in_air(x, y, s_.viewport.sheet, wb_.sheet_count(), s_.viewport, s_.tab_gap).second;
      } catch (const Error& err) {
        if (!quiet) diagnose(err.what());
        return std::nullopt;
      }
    }
    if (s_.viewport.mode == ViewportMode::Fixed) {
      if (!quiet) diagnose("the extended margin is read-only in FIXED mode");
      return std::nullopt;
    }
    return cell_at(s_.viewport, x, y);
  }

  std::optional<TrashPayload> trash_payload(const CellAddress& owner, const CellAddress& cell) const {
    if (owner == cell) return std::nullopt;
    if (const auto* f = std::get_if<FormulaCell>(&wb_.content(owner))) {
      const auto* root = std::get_if<FuncCall>(&f->ast.node);
      if (!root) return std::nullopt;
      for (const auto& arg : root->args)
        if (const auto* r = std::get_if<RefNode>(&arg.node); r && covers(r->ref, cell))
          return TrashPayload{owner, cell, std::nullopt};
      return std::nullopt;
    }
    if (const ClusterCell* c = wb_.cluster_at(owner)) {
      for (const auto& m : c->members)
        if (covers(m, cell)) return TrashPayload{owner, cell, c->id};
    }
    return std::nullopt;
  }

  void pick(const RefSpec& ref) {
    const CellAddress first = std::holds_alternative<CellAddress>(ref) ? std::get<CellAddress>(ref)
                                                                        : std::get<CellRange>(ref).start;
    if (first.sheet == s_.viewport.sheet && !on_screen(s_.viewport, first)) {
      SlideResult slid = slide_to_align(s_.viewport, first);
      s_.viewport = slid.viewport;
      start_slide(slid.animation);
      ViewportCommand cmd;
      cmd.kind = ViewportCommand::Kind::Slide;
      cmd.sheet = s_.viewport.sheet;
      cmd.animation = slid.animation;
      cmd.mode = s_.viewport.mode;
      fx_.emplace_back(cmd);
    }
    switch (s_.mode) {
      case Mode::CollectingSources:
        s_.selection.push_back(ref);
        if (s_.primary_held) s_.taps_during_primary = true;
        break;
      case Mode::PlacingFunction:
        place(first);
        break;
      default:
        if (s_.primary_held) {
          s_.selection.push_back(ref);
          s_.taps_during_primary = true;
        } else {
          s_.selection = {ref};
        }
        s_.mode = Mode::SelectingCells;
        break;
    }
    dirty();
  }

  void create_cluster(const CellAddress& anchor, int level, std::vector<RefSpec> members) {
    const std::string label = wb_.fresh_cluster_label();
    mutate(DefineClusterCmd{label, anchor, level, std::move(members)});
    fx_.emplace_back(LabelPrompt{label, anchor});
    s_.pending_label = label;
  }

  void place(const CellAddress& target) {
    const std::string action = s_.pending_action;
    s_.pending_action.clear();
    if (action.rfind("function:", 0) == 0) {
      mutate(SetCellText{target, build_formula(action.substr(9), s_.selection, wb_, target.sheet)});
    } else if (action == "cluster:create") {
      create_cluster(target, 1, s_.selection);
    }
    focus(target);
  }

  void commit_sources() {
    if (s_.selection.empty()) {
      diagnose("no sources selected");
      return;
    }
    const CellAddress target = *s_.target;
    s_.target.reset();
    const std::string action = s_.pending_action;
    s_.pending_action.clear();
    if (action.rfind("function:", 0) == 0) {
      mutate(SetCellText{target, build_formula(action.substr(9), s_.selection, wb_, target.sheet)});
    } else {
      create_cluster(target, 1, s_.selection);
    }
    focus(target);
  }

  void primary_click() {
    switch (s_.mode) {
      case Mode::SelectingCells:
      case Mode::DraggingLink:
        if (!s_.selection.empty()) {
          open_menu();
          return;
        }
        break;
      case Mode::MenuOpen:
        confirm_menu();
        return;
      case Mode::CollectingSources:
        commit_sources();
        return;
      default:
        break;
    }
    diagnose("click ignored in mode " + std::string(mode_name(s_.mode)));
  }

  void secondary_click() {
    const int level = menu_level_for_height(s_.pen_h, kMaxLevels);
    const bool selecting = s_.mode == Mode::SelectingCells || s_.mode == Mode::DraggingLink;
    if (selecting && !s_.selection.empty() && level >= 1) {
      auto anchor = cell_at(s_.viewport, s_.pen_x, s_.pen_y);
      if (!anchor) {
        diagnose("no anchor cell under the pen");
        return;
      }
      create_cluster(*anchor, std::clamp(level, 1, kMaxLevels), s_.selection);
      focus(*anchor);
      return;
    }
    if (s_.mode == Mode::SelectingCells && level == 0 && s_.selection.size() == 1 &&
        std::holds_alternative<CellAddress>(s_.selection.front())) {
      const CellAddress cell = std::get<CellAddress>(s_.selection.front());
      if (wb_.cluster_at(cell)) {
        diagnose("cluster anchors cannot be edited as text");
        return;
      }
      s_.mode = Mode::TextEntry;
      s_.text_target = cell;
      s_.text = wb_.input_text(cell);
      s_.text_cursor = static_cast<int>(s_.text.size());
      dirty();
      return;
    }
    diagnose("secondary click ignored in mode " + std::string(mode_name(s_.mode)));
  }

  void open_menu() {
    s_.mode = Mode::MenuOpen;
    s_.menu_path.clear();
    s_.menu_cx = s_.pen_x;
    s_.menu_cy = s_.pen_y;
    s_.menu_target.reset();
    if (s_.selection.size() == 1) {
      if (const auto* c = std::get_if<CellAddress>(&s_.selection.front());
          c && std::holds_alternative<EmptyCell>(wb_.content(*c)) && !wb_.cluster_at(*c))
        s_.menu_target = *c;
    }
    dirty();
  }

  void close_menu() {
    s_.menu_path.clear();
    s_.menu_target.reset();
    s_.mode = s_.selection.empty() ? Mode::Idle : Mode::SelectingCells;
    dirty();
  }

  void hover_menu() {
    const int rings = open_ring_count(s_);
    const int level = menu_level_for_height(s_.pen_h, rings);
    const auto before = s_.menu_path;
    if (level == 0) {
      s_.menu_path.clear();
    } else if (auto entry = menu_entry_at(*s_.menu, s_.menu_path, level, s_.menu_cx, s_.menu_cy, s_.pen_x, s_.pen_y)) {
      s_.menu_path.resize(static_cast<std::size_t>(level - 1));
      s_.menu_path.push_back(*entry);
    } else if (s_.menu_path.size() > static_cast<std::size_t>(level)) {
      s_.menu_path.resize(static_cast<std::size_t>(level));
    }
    if (s_.menu_path != before) dirty();
  }

  void confirm_menu() {
    const MenuNode* node = s_.menu->node_at(s_.menu_path);
    if (!node || !node->action) {
      diagnose("no menu command under the pen");
      return;
    }
    const std::string action = *node->action;
    const auto target = s_.menu_target;
    s_.menu_path.clear();
    s_.menu_target.reset();
    if (action.rfind("function:", 0) == 0 || action == "cluster:create") {
      s_.pending_action = action;
      if (target) {
        s_.target = target;
        s_.selection.clear();
        s_.mode = Mode::CollectingSources;
      } else {
        s_.mode = Mode::PlacingFunction;
      }
    } else if (action == "chart:bar") {
      if (target || s_.selection.size() != 1) {
        diagnose("a chart needs exactly one selected series");
        s_.mode = Mode::SelectingCells;
      } else {
        s_.chart_series = s_.selection.front();
        s_.mode = Mode::SizingChart;
      }
    } else {
      diagnose("unknown menu action '" + action + "'");
      s_.mode = Mode::SelectingCells;
    }
    dirty();
  }

  void track_stroke(double x, double y) {
    std::optional<int> hit;
    for (const auto& chart : wb_.charts()) {
      if (chart.anchor.sheet != s_.viewport.sheet) continue;
      if (chart_rect(s_.viewport, chart).contains(x, y)) {
        hit = chart.id;
        break;
      }
    }
    if (hit != s_.stroke_chart) finish_stroke();
    if (!hit) return;
    s_.stroke_chart = hit;
    s_.stroke.push_back({x, y});
  }

  void finish_stroke() {
    if (!s_.stroke_chart) return;
    const int id = *s_.stroke_chart;
    auto points = std::move(s_.stroke);
    s_.stroke.clear();
    s_.stroke_chart.reset();
    const ChartSpec* chart = wb_.find_chart(id);
    if (!chart || points.size() < 2) return;
    const Rect r = chart_rect(s_.viewport, *chart);
    switch (classify_stroke(points, r.x1 - r.x0)) {
      case StrokeKind::Linear: mutate(SetChartTrendCmd{id, TrendKind::Linear}); break;
      case StrokeKind::Poly2: mutate(SetChartTrendCmd{id, TrendKind::Poly2}); break;
      case StrokeKind::None: diagnose("stroke not recognized as a trendline"); break;
    }
  }

  void text_tap(double x, double y) {
    auto key = key_at(x, y);
    const auto at = static_cast<std::size_t>(s_.text_cursor);
    if (!key) {
      if (auto cell = point_cell(x, y)) {
        const std::string addr = address_text(*cell, s_.text_target->sheet, wb_.names());
        s_.text.insert(at, addr);
        s_.text_cursor += static_cast<int>(addr.size());
        dirty();
      }
      return;
    }
    const std::string& k = *key;
    if (k == "LEFT") {
      s_.text_cursor = std::max(0, s_.text_cursor - 1);
    } else if (k == "RIGHT") {
      s_.text_cursor = std::min(static_cast<int>(s_.text.size()), s_.text_cursor + 1);
    } else if (k == "BKSP") {
      if (at > 0) {
        s_.text.erase(at - 1, 1);
        --s_.text_cursor;
      }
    } else if (k == "ESC") {
      end_text_entry();
    } else if (k == "ENTER") {
      mutate(SetCellText{*s_.text_target, s_.text});
      end_text_entry();
    } else {
      const std::string ins = k == "SPACE" ? " " : k;
      s_.text.insert(at, ins);
      s_.text_cursor += static_cast<int>(ins.size());
    }
    dirty();
  }

  void end_text_entry() {
    const CellAddress target = *s_.text_target;
    s_.text_target.reset();
    s_.text.clear();
    s_.text_cursor = 0;
    focus(target);
  }

  InteractionState& s_;
  const Workbook& wb_;
  std::vector<Effect>& fx_;
};

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Idle: return "Idle";
    case Mode::SelectingCells: return "SelectingCells";
    case Mode::MenuOpen: return "MenuOpen";
    case Mode::CollectingSources: return "CollectingSources";
    case Mode::PlacingFunction: return "PlacingFunction";
    case Mode::DraggingLink: return "DraggingLink";
    case Mode::DraggingToTrash: return "DraggingToTrash";
    case Mode::SizingChart: return "SizingChart";
    case Mode::TextEntry: return "TextEntry";
  }
  return "?";
}

Transition handle_event(const InteractionState& state, const InputEvent& event, const Workbook& wb) {
  Transition t{state, {}};
  const bool sliding = t.state.slide_remaining_ms > 0;
  const bool is_tick = std::holds_alternative<Tick>(event);
  if (sliding && !is_tick && (std::holds_alternative<PenButton>(event) || !t.state.deferred.empty())) {
    t.state.deferred.push_back(event);
    return t;
  }
  Handler h(t.state, wb, t.effects);
  std::visit(h, event);
  return t;
}

RecalcResult apply_mutation(Workbook& wb, const EngineMutation& m) {
  return std::visit(
      overloaded{
          [&](const SetCellText& c) { return wb.set_cell_text(c.cell, c.text); },
          [&](const DefineClusterCmd& c) {
            wb.define_cluster(c.label, c.anchor, c.level, c.members);
            return RecalcResult{};
          },
          [&](const ModifyClusterCmd& c) { return wb.modify_cluster(c.cluster_id, c.add, c.remove); },
          [&](const RenameClusterCmd& c) {
            const ClusterCell* cl = wb.find_cluster(c.from);
            if (!cl) throw Error(ErrorCode::UnknownCluster, "no cluster '" + c.from + "'");
            return wb.rename_cluster(cl->id, c.to);
          },
          [&](const AddSourceCmd& c) { return wb.add_source(c.cell, c.refs); },
          [&](const RemoveSourceCmd& c) { return wb.remove_source(c.cell, c.victim); },
          [&](const CreateChartCmd& c) {
            create_chart(wb, c.series, c.anchor, c.width_cells, c.height_cells);
            return RecalcResult{};
          },
          [&](const SetChartTrendCmd& c) {
            wb.set_chart_trend(c.chart_id, c.kind);
            return RecalcResult{};
          },
      },
      m);
}

std::string describe(const EngineMutation& m, const SheetNames& names) {
  auto refs = [&](const std::vector<RefSpec>& list, int sheet) {
    std::string out;
    for (const auto& r : list) out += (out.empty() ? "" : ",") + ref_text(r, sheet, names);
    return out;
  };
  return std::visit(
      overloaded{
          [&](const SetCellText& c) { return "set_cell " + address_text(c.cell, -1, names) + " " + c.text; },
          [&](const DefineClusterCmd& c) {
            return "define_cluster " + c.label + " " + address_text(c.anchor, -1, names) + " level " +
                   std::to_string(c.level) + " [" + refs(c.members, -1) + "]";
          },
          [&](const ModifyClusterCmd& c) {
            return "modify_cluster #" + std::to_string(c.cluster_id) + " add [" + refs(c.add, -1) + "] remove [" +
                   refs(c.remove, -1) + "]";
          },
          [&](const RenameClusterCmd& c) { return "rename_cluster " + c.from + " " + c.to; },
          [&](const AddSourceCmd& c) {
            return "add_source " + address_text(c.cell, -1, names) + " [" + refs(c.refs, -1) + "]";
          },
          [&](const RemoveSourceCmd& c) {
            return "remove_source " + address_text(c.cell, -1, names) + " " + address_text(c.victim, -1, names);
          },
          [&](const CreateChartCmd& c) {
            return "create_chart " + ref_text(c.series, -1, names) + " at " + address_text(c.anchor, -1, names) + " " +
                   std::to_string(c.width_cells) + "x" + std::to_string(c.height_cells);
          },
          [&](const SetChartTrendCmd& c) {
            return "set_chart_trend #" + std::to_string(c.chart_id) +
                   (c.kind == TrendKind::Linear ? " linear" : " poly2");
          },
      },
      m);
}

Machine::StepResult Machine::step(const InputEvent& event, Workbook& wb) {
  StepResult out;
  run(event, wb, out);
  while (state_.slide_remaining_ms <= 0 && !state_.deferred.empty()) {
    auto queued = std::move(state_.deferred);
    state_.deferred.clear();
    for (std::size_t i = 0; i < queued.size(); ++i) {
      if (state_.slide_remaining_ms > 0) {
        state_.deferred.insert(state_.deferred.end(), queued.begin() + static_cast<std::ptrdiff_t>(i), queued.end());
        break;
      }
      run(queued[i], wb, out);
    }
  }
  return out;
}

void Machine::run(const InputEvent& event, Workbook& wb, StepResult& out) {
  Transition t = handle_event(state_, event, wb);
  state_ = std::move(t.state);
  for (auto& effect : t.effects) {
    if (const auto* m = std::get_if<EngineMutation>(&effect)) {
      try {
        out.recalcs.push_back(apply_mutation(wb, *m));
        ++out.mutations;
        out.effects.push_back(std::move(effect));
      } catch (const Error& err) {
        out.effects.emplace_back(Diagnostic{std::string(error_code_name(err.code())) + ": " + err.what()});
      }
    } else {
      out.effects.push_back(std::move(effect));
    }
  }
}

std::string_view stroke_kind_name(StrokeKind k) {
  switch (k) {
    case StrokeKind::Linear: return "linear";
    case StrokeKind::Poly2: return "poly2";
    case StrokeKind::None: return "none";
  }
  return "none";
}

StrokeKind classify_stroke(const std::vector<Point2>& points, double chart_width) {
  if (points.size() < 2) return StrokeKind::None;
  const Point2 a = points.front(), b = points.back();
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double chord = std::hypot(dx, dy);
  if (chord == 0.0 || chord < 0.1 * chart_width) return StrokeKind::None;
  double deviation = 0;
  for (const auto& p : points) deviation = std::max(deviation, std::abs(dx * (p.y - a.y) - dy * (p.x - a.x)) / chord);
  const double straightness = deviation / chord;
  if (straightness < 0.10) return StrokeKind::Linear;
  if (straightness < 0.5) return StrokeKind::Poly2;
  return StrokeKind::None;
}

std::pair<int, CellAddress> map_in_air(double x, double y, int active_sheet, int sheet_count, const Viewport& vp,
                                       double tab_gap) {
  const double pitch = 1.0 + tab_gap;
  int sheet = active_sheet;
  double local = x;
  if (x >= 1.0 || x < 0.0) {
    const double past = x >= 1.0 ? x - 1.0 : -x;
    const int k = std::max(1, static_cast<int>(std::ceil(past / pitch)));
    sheet = active_sheet + (x >= 1.0 ? k : -k);
    local = x >= 1.0 ? x - k * pitch : x + k * pitch;
  }
  if (sheet < 0 || sheet >= sheet_count) throw Error(ErrorCode::NoSheet, "no sheet beyond the bezel there");
  local = std::clamp(local, 0.0, std::nextafter(1.0, 0.0));
  const double ly = std::clamp(y, 0.0, std::nextafter(1.0, 0.0));
  const int col = vp.origin.col + static_cast<int>(std::floor(local * vp.cols));
  const int row = vp.origin.row + static_cast<int>(std::floor(ly * vp.rows));
  return {sheet, CellAddress{sheet, row, col}};
}

std::vector<Effect> trash_drop(const TrashPayload& payload, double x, double y) {
  std::vector<Effect> out;
  if (!kTrashRect.contains(x, y)) return out;
  if (payload.cluster_id) out.emplace_back(EngineMutation{ModifyClusterCmd{*payload.cluster_id, {}, {payload.victim}}});
  else out.emplace_back(EngineMutation{RemoveSourceCmd{payload.owner, payload.victim}});
  return out;
}

std::optional<char> arc_entry_at(double x, double y) {
  const double dx = x - 1.0, dy = y - 1.0;
  const double r = std::hypot(dx, dy);
  if (r < kArcInner || r > kArcOuter || dx > 0 || dy > 0) return std::nullopt;
  const double deg = std::atan2(-dy, -dx) * 180.0 / 3.14159265358979323846;
  const int sector = std::clamp(static_cast<int>(std::floor(deg / 18.0)), 0, 4);
  return kArcKeys[sector];
}

std::vector<ArcEntryScene> arc_menu_scene(const ArcToggles& t) {
  std::vector<ArcEntryScene> out;
  for (int i = 0; i < 5; ++i) out.push_back({kArcKeys[i], arc_toggle(t, kArcKeys[i]), i * 18.0, (i + 1) * 18.0});
  return out;
}

const std::vector<KeyScene>& virtual_keyboard() {
  static const std::vector<KeyScene> keys = [] {
    const std::vector<std::vector<std::string>> rows = {
        {"1", "2", "3", "4", "5", "6", "7", "8", "9", "0"},
        {"Q", "W", "E", "R", "T", "Y", "U", "I", "O", "P"},
        {"A", "S", "D", "F", "G", "H", "J", "K", "L", "="},
        {"Z", "X", "C", "V", "B", "N", "M", "(", ")", ","},
        {":", "+", "-", "*", "/", ".", "@", "!", "\"", "SPACE"},
        {"LEFT", "RIGHT", "BKSP", "ENTER", "ESC"},
    };
    std::vector<KeyScene> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double y0 = 0.52 + 0.08 * static_cast<double>(r);
      const double w = 1.0 / static_cast<double>(rows[r].size());
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        out.push_back({rows[r][c], {w * static_cast<double>(c), y0, w * static_cast<double>(c + 1), y0 + 0.08}});
    }
    return out;
  }();
  return keys;
}

std::optional<std::string> key_at(double x, double y) {
  for (const auto& k : virtual_keyboard())
    if (k.rect.contains(x, y)) return k.label;
  if (y >= 0.52 && y <= 1.0 && x >= 0.0 && x <= 1.0) {
    // Right and bottom edges belong to the last key of the row.
    const auto& keys = virtual_keyboard();
    const KeyScene* best = nullptr;
    for (const auto& k : keys)
      if (y >= k.rect.y0 && (y < k.rect.y1 || k.rect.y1 >= 1.0) && x >= k.rect.x0) best = &k;
    if (best) return best->label;
  }
  return std::nullopt;
}

Rect chart_rect(const Viewport& vp, const ChartSpec& chart) {
  Rect top = cell_rect(vp, chart.anchor);
  return {top.x0, top.y0, top.x0 + chart.width_cells * (top.x1 - top.x0),
          top.y0 + chart.height_cells * (top.y1 - top.y0)};
}

int open_ring_count(const InteractionState& s) {
  const MenuNode* node = s.menu->node_at(s.menu_path);
  const int base = static_cast<int>(s.menu_path.size());
  return std::max(1, node && !node->children.empty() ? base + 1 : base);
}

MenuScene menu_scene(const InteractionState& s) {
  MenuScene scene;
  scene.cx = s.menu_cx;
  scene.cy = s.menu_cy;
  scene.inner_radius = kMenuDeadZone;
  scene.outer_radius = kMenuRingRadius;
  scene.path = s.menu_path;
  const int rings = open_ring_count(s);
  for (int level = 1; level <= rings; ++level) {
    const std::vector<std::string> prefix(s.menu_path.begin(),
                                          s.menu_path.begin() + std::min<std::ptrdiff_t>(level - 1, static_cast<std::ptrdiff_t>(s.menu_path.size())));
    const MenuNode* owner = s.menu->node_at(prefix);
    if (!owner) break;
    MenuRingScene ring{level, level * kLayerSpacing, {}};
    const double span = owner->children.empty() ? 0.0 : 360.0 / static_cast<double>(owner->children.size());
    for (std::size_t i = 0; i < owner->children.size(); ++i) {
      const auto& child = owner->children[i];
      const bool on_path = s.menu_path.size() >= static_cast<std::size_t>(level) &&
                           s.menu_path[static_cast<std::size_t>(level - 1)] == child.id;
      ring.entries.push_back({child.id, child.label, span * static_cast<double>(i),
                              span * static_cast<double>(i + 1), on_path});
    }
    scene.rings.push_back(std::move(ring));
  }
  return scene;
}

}  // namespace gridlayers
