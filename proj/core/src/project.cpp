#include "gridlayers/project.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

void cover(const Workbook& wb, const RefSpec& ref, std::set<CellAddress>& out) {
  Expansion ex = wb.expand(ref);
  out.insert(ex.cells.begin(), ex.cells.end());
  if (const auto* c = std::get_if<CellAddress>(&ref)) out.insert(*c);
}

std::string overlay_text(const ClusterCell& c, const SheetNames& names) {
  std::string out;
  for (const auto& m : c.members) out += (out.empty() ? "" : ",") + ref_text(m, c.anchor.sheet, names);
  return out;
}

Point3 sheet_point(const Viewport& vp, const std::vector<TabOffset>& tabs, const CellAddress& cell, double z) {
  Point3 p = cell_center(vp, cell, z);
  for (const auto& t : tabs)
    if (t.sheet == cell.sheet && cell.sheet != vp.sheet) p.x += t.offset;
  return p;
}

}  // namespace

SceneFrame project(const Workbook& wb, const InteractionState& state) {
  return project(wb, state.viewport, state, state.toggles);
}

SceneFrame project(const Workbook& wb, const Viewport& vp, const InteractionState& state,
                   const ArcToggles& toggles) {
  SceneFrame frame;
  frame.revision = wb.revision();
  frame.viewport = vp;
  frame.placement = {vp.mode, vp.mode == ViewportMode::Vertical ? 90.0 : 0.0};
  frame.mode = std::string(mode_name(state.mode));
  const SheetNames names = wb.names();
  for (const auto& r : state.selection) frame.selection.push_back(ref_text(r, vp.sheet, names));

  // Highlights: the selection, a pending target and the cell being edited.
  std::set<CellAddress> highlighted;
  for (const auto& r : state.selection) cover(wb, r, highlighted);
  if (state.target) highlighted.insert(*state.target);
  if (state.text_target) highlighted.insert(*state.text_target);
  if (state.chart_anchor && state.chart_corner) cover(wb, CellRange::normalized(*state.chart_anchor, *state.chart_corner), highlighted);

  const std::set<CellAddress> mask = toggles.mask ? used_mask(wb, vp.sheet) : std::set<CellAddress>{};
  const Rect canvas = extended_canvas(vp);
  const CellAddress lo{vp.sheet, std::max(0, vp.origin.row - vp.extended_margin),
                       std::max(0, vp.origin.col - vp.extended_margin)};
  const CellAddress hi{vp.sheet, vp.origin.row + vp.rows + vp.extended_margin - 1,
                       vp.origin.col + vp.cols + vp.extended_margin - 1};
  auto in_canvas = [&](const CellAddress& c) {
    return c.sheet == vp.sheet && c.row >= lo.row && c.row <= hi.row && c.col >= lo.col && c.col <= hi.col &&
           canvas.contains(cell_rect(vp, c));
  };
  std::set<CellAddress> shown;
  for (const auto& c : wb.used_cells(vp.sheet)) shown.insert(c);
  shown.insert(mask.begin(), mask.end());
  for (const auto& c : highlighted) shown.insert(c);
  for (const auto& c : shown) {
    if (!in_canvas(c)) continue;
    GridCell g;
    g.cell = c;
    g.text = value_text(wb.get_value(c));
    g.rect = cell_rect(vp, c);
    g.masked = mask.contains(c);
    g.highlighted = highlighted.contains(c);
    g.cluster_anchor = wb.cluster_at(c) != nullptr;
    frame.grid_cells.push_back(std::move(g));
  }

  const double phase = state.slide && state.slide->duration_ms > 0
                           ? 1.0 - state.slide_remaining_ms / state.slide->duration_ms
                           : 1.0;
  const auto offsets = tab_geometry(wb.sheet_count(), vp.sheet, phase, state.previous_sheet, state.tab_gap);
  for (const auto& t : offsets)
    frame.tabs.push_back({t.sheet, wb.sheet_name(t.sheet), t.offset, state.gazed_tab == t.sheet});

  // Focus cells for dependency links and nested stacks: formula cells in the
  // selection.
  std::vector<CellAddress> focus;
  for (const auto& r : state.selection)
    if (const auto* c = std::get_if<CellAddress>(&r); c && std::holds_alternative<FormulaCell>(wb.content(*c)))
      focus.push_back(*c);

  if (toggles.dependencies) {
    const int depth = std::clamp(toggles.dependency_depth, 1, kMaxLevels);
    for (const auto& f : focus) {
      if (toggles.hidden_links.contains(f)) continue;
      const EdgeLevels levels = wb.precedents_closure(f, depth);
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const double top = static_cast<double>(depth - static_cast<int>(i)) * kLayerSpacing;
        for (const auto& [from, to] : levels[i])
          frame.links.push_back({sheet_point(vp, offsets, from, top), sheet_point(vp, offsets, to, top - kLayerSpacing),
                                 "dep-L" + std::to_string(i + 1)});
      }
    }
  }

  if (toggles.functions) {
    for (const auto& f : focus) {
      try {
        frame.stacks.push_back({f, nested_stack(wb, f)});
      } catch (const Error&) {
      }
    }
  }

  if (toggles.clusters) {
    std::map<int, std::vector<const ClusterCell*>> by_level;
    for (const auto& [id, c] : wb.clusters())
      if (c.anchor.sheet == vp.sheet) by_level[std::min(c.level, kMaxLevels)].push_back(&c);
    for (const auto& [level, clusters] : by_level) {
      OverlayLayer layer{level, level * kLayerSpacing, {}};
      std::map<CellAddress, const ClusterCell*> at;
      for (const auto* c : clusters) at[c->anchor] = c;
      for (int row = vp.origin.row; row < vp.origin.row + vp.rows; ++row) {
        for (int col = vp.origin.col; col < vp.origin.col + vp.cols; ++col) {
          const CellAddress cell{vp.sheet, row, col};
          auto it = at.find(cell);
          if (it == at.end()) layer.cells.push_back({cell, "", "", true});
          else layer.cells.push_back({cell, it->second->label, overlay_text(*it->second, names), false});
        }
      }
      frame.layers.push_back(std::move(layer));
      for (const auto* c : clusters) {
        const Point3 from = sheet_point(vp, offsets, c->anchor, level * kLayerSpacing);
        for (const auto& m : c->members) {
          if (const auto* name = std::get_if<ClusterName>(&m)) {
            if (const ClusterCell* sub = wb.find_cluster(name->label))
              frame.links.push_back(
                  {from, sheet_point(vp, offsets, sub->anchor, std::min(sub->level, kMaxLevels) * kLayerSpacing),
                   "cluster"});
          } else {
            std::set<CellAddress> cells;
            cover(wb, m, cells);
            for (const auto& cell : cells) frame.links.push_back({from, sheet_point(vp, offsets, cell, 0.0), "cluster"});
          }
        }
      }
    }
  }

  if (state.mode == Mode::DraggingLink) {
    const Point3 pen{state.pen_x, state.pen_y, state.pen_h};
    std::set<CellAddress> cells;
    for (const auto& r : state.selection) cover(wb, r, cells);
    for (const auto& c : cells) frame.links.push_back({sheet_point(vp, offsets, c, 0.0), pen, "source"});
  }

  for (const auto& chart : wb.charts()) {
    if (chart.anchor.sheet != vp.sheet) continue;
    frame.charts.push_back({chart.id, chart_rect(vp, chart), bar_geometry(chart, series_values(wb, chart.series)),
                            chart.trend});
  }

  if (toggles.overview) frame.overview = overview_scene(wb, vp);
  if (state.mode == Mode::MenuOpen) frame.menu = menu_scene(state);
  if (state.mode == Mode::TextEntry && state.text_target)
    frame.text_entry = TextEntryScene{*state.text_target, state.text, state.text_cursor, virtual_keyboard()};
  frame.slide = state.slide;
  frame.trash = kTrashRect;
  frame.arc_menu = arc_menu_scene(toggles);
  return frame;
}

}  // namespace gridlayers
