#include "gridlayers/scene.hpp"

#include <algorithm>
#include <cmath>

#include "gridlayers/error.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers {

Viewport Viewport::make(int sheet, CellAddress origin, int cols, int rows) {
  Viewport vp;
  vp.sheet = sheet;
  vp.origin = origin;
  vp.origin.sheet = sheet;
  vp.cols = cols;
  vp.rows = rows;
  vp.extended_margin = std::max(cols, rows);
  return vp;
}

bool arc_toggle(const ArcToggles& t, char key) {
  switch (key) {
    case 'O': return t.overview;
    case 'D': return t.dependencies;
    case 'F': return t.functions;
    case 'C': return t.clusters;
    case 'S': return t.sheets;
    default: return false;
  }
}

void set_arc_toggle(ArcToggles& t, char key, bool on) {
  switch (key) {
    case 'O': t.overview = on; break;
    case 'D': t.dependencies = on; break;
    case 'F': t.functions = on; break;
    case 'C': t.clusters = on; break;
    case 'S': t.sheets = on; break;
    default: break;
  }
}

Rect cell_rect(const Viewport& vp, const CellAddress& cell) {
  const double w = 1.0 / vp.cols, h = 1.0 / vp.rows;
  const double x0 = (cell.col - vp.origin.col) * w;
  const double y0 = (cell.row - vp.origin.row) * h;
  return {x0, y0, x0 + w, y0 + h};
}

Point3 cell_center(const Viewport& vp, const CellAddress& cell, double height) {
  Rect r = cell_rect(vp, cell);
  return {(r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0, height};
}

Rect extended_canvas(const Viewport& vp) {
  const double mx = static_cast<double>(vp.extended_margin) / vp.cols;
  const double my = static_cast<double>(vp.extended_margin) / vp.rows;
  return {-mx, -my, 1.0 + mx, 1.0 + my};
}

std::optional<CellAddress> cell_at(const Viewport& vp, double x, double y) {
  if (!extended_canvas(vp).contains(x, y)) return std::nullopt;
  const int col = vp.origin.col + static_cast<int>(std::floor(x * vp.cols));
  const int row = vp.origin.row + static_cast<int>(std::floor(y * vp.rows));
  if (col < 0 || col > kMaxColumn || row < 0 || row > kMaxRow) return std::nullopt;
  return CellAddress{vp.sheet, row, col};
}

bool on_screen(const Viewport& vp, const CellAddress& cell) {
  return cell.sheet == vp.sheet && cell.col >= vp.origin.col && cell.col < vp.origin.col + vp.cols &&
         cell.row >= vp.origin.row && cell.row < vp.origin.row + vp.rows;
}

SlideResult slide_to_align(const Viewport& vp, const CellAddress& target) {
  SlideResult out{vp, {0.0, vp.origin, vp.origin}};
  if (on_screen(vp, target)) return out;
  CellAddress origin = vp.origin;
  if (target.col < vp.origin.col || target.col >= vp.origin.col + vp.cols) origin.col = target.col / vp.cols * vp.cols;
  if (target.row < vp.origin.row || target.row >= vp.origin.row + vp.rows) origin.row = target.row / vp.rows * vp.rows;
  out.viewport.origin = origin;
  out.animation = {kSlideDurationMs, vp.origin, origin};
  return out;
}

std::optional<CellRange> used_region(const Workbook& wb, int sheet) {
  auto used = wb.used_cells(sheet);
  if (used.empty()) return std::nullopt;
  CellRange r{used.front(), used.front()};
  for (const auto& c : used) {
    r.start.row = std::min(r.start.row, c.row);
    r.start.col = std::min(r.start.col, c.col);
    r.end.row = std::max(r.end.row, c.row);
    r.end.col = std::max(r.end.col, c.col);
  }
  return r;
}

std::set<CellAddress> used_mask(const Workbook& wb, int sheet) {
  std::set<CellAddress> mask;
  auto region = used_region(wb, sheet);
  if (!region) return mask;
  auto used = wb.used_cells(sheet);
  std::set<CellAddress> populated(used.begin(), used.end());
  for (int row = region->start.row; row <= region->end.row; ++row)
    for (int col = region->start.col; col <= region->end.col; ++col)
      if (!populated.contains({sheet, row, col})) mask.insert({sheet, row, col});
  return mask;
}

std::vector<StackLayer> nested_stack(const Workbook& wb, const CellAddress& cell) {
  const auto* f = std::get_if<FormulaCell>(&wb.content(cell));
  if (!f) throw Error(ErrorCode::NotAFunction, a1(cell) + " does not hold a formula");
  auto path = deepest_call_path(f->ast);
  if (path.empty()) throw Error(ErrorCode::NotAFunction, a1(cell) + " contains no function call");
  const bool tainted = wb.cycle_tainted(cell);
  std::vector<StackLayer> layers;
  for (std::size_t i = 0; i < path.size(); ++i) {
    Value v;
    if (tainted) v = ErrorValue{ErrorKind::Cycle};
    else if (i == 0) v = wb.get_value(cell);
    else v = wb.evaluate_now(Expr{*path[i]});
    layers.push_back({path[i]->name, std::move(v), static_cast<double>(i + 1) * kLayerSpacing});
  }
  return layers;
}

std::optional<OverviewScene> overview_scene(const Workbook& wb, const Viewport& vp) {
  auto region = used_region(wb, vp.sheet);
  if (!region) return std::nullopt;
  OverviewScene ov;
  ov.used_region = *region;
  const double w = static_cast<double>(region->cols()) / vp.cols;
  const double h = static_cast<double>(region->rows()) / vp.rows;
  ov.scale = std::min({1.0, kOverviewWidth / w, kOverviewWidth / h});
  const double bw = w * ov.scale, bh = h * ov.scale;
  ov.bounds = {0.5 - bw / 2.0, 0.5 - bh / 2.0, 0.5 + bw / 2.0, 0.5 + bh / 2.0};
  const double cw = bw / region->cols(), ch = bh / region->rows();
  auto clamp_x = [&](double x) { return std::clamp(x, ov.bounds.x0, ov.bounds.x1); };
  auto clamp_y = [&](double y) { return std::clamp(y, ov.bounds.y0, ov.bounds.y1); };
  const double vx0 = ov.bounds.x0 + (vp.origin.col - region->start.col) * cw;
  const double vy0 = ov.bounds.y0 + (vp.origin.row - region->start.row) * ch;
  ov.viewport_indicator = {clamp_x(vx0), clamp_y(vy0), clamp_x(vx0 + vp.cols * cw), clamp_y(vy0 + vp.rows * ch)};
  return ov;
}

CellAddress overview_pick(const OverviewScene& overview, double x, double y) {
  const CellRange& r = overview.used_region;
  const int col = r.start.col + static_cast<int>(std::floor(x * r.cols()));
  const int row = r.start.row + static_cast<int>(std::floor(y * r.rows()));
  return {r.start.sheet, std::clamp(row, r.start.row, r.end.row), std::clamp(col, r.start.col, r.end.col)};
}

std::vector<TabOffset> tab_geometry(int sheet_count, int active_sheet, double slide_phase, int previous_sheet,
                                    double tab_gap) {
  const double phase = std::clamp(slide_phase, 0.0, 1.0);
  const double active = phase >= 1.0 || previous_sheet == active_sheet
                            ? static_cast<double>(active_sheet)
                            : previous_sheet + (active_sheet - previous_sheet) * phase;
  std::vector<TabOffset> out;
  for (int i = 0; i < sheet_count; ++i) out.push_back({i, (i - active) * (1.0 + tab_gap)});
  return out;
}

}  // namespace gridlayers
