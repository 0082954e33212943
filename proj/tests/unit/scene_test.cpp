#include <gtest/gtest.h>

#include "gridlayers/error.hpp"
#include "gridlayers/project.hpp"
#include "gridlayers/scene.hpp"
#include "gridlayers/workbook.hpp"

namespace gl = gridlayers;
using gl::CellAddress;

namespace {

CellAddress at(const char* a1) { return *gl::parse_a1(a1); }

gl::Workbook fixture() {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 1.0);
  wb.set_cell(at("B1"), 2.0);
  wb.set_cell(at("B2"), 3.0);
  wb.set_cell(at("B3"), 4.0);
  wb.set_cell_text(at("A4"), "=SUM(A1,B1:B3)");
  return wb;
}

gl::InteractionState selecting(const char* cell) {
  gl::InteractionState s;
  s.mode = gl::Mode::SelectingCells;
  s.selection = {at(cell)};
  return s;
}

}  // namespace

TEST(UsedMask, EmptySheet) {
  gl::Workbook wb;
  EXPECT_TRUE(gl::used_mask(wb, 0).empty());
  EXPECT_FALSE(gl::used_region(wb, 0));
}

TEST(UsedMask, ComplementInBoundingBox) {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 1.0);
  wb.set_cell(at("B2"), 1.0);
  EXPECT_EQ(gl::used_mask(wb, 0), (std::set<CellAddress>{at("A2"), at("B1")}));
}

TEST(UsedMask, DenseBlock) {
  gl::Workbook wb;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) wb.set_cell({0, r, c}, 1.0);
  EXPECT_TRUE(gl::used_mask(wb, 0).empty());
}

TEST(NestedStack, RoundOfSum) {
  gl::Workbook wb;
  for (const char* c : {"A1", "A2", "A3"}) wb.set_cell(at(c), 1.4);
  wb.set_cell_text(at("B1"), "=ROUND(SUM(A1:A3),0)");
  const auto layers = gl::nested_stack(wb, at("B1"));
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_EQ(layers[0].function, "ROUND");
  EXPECT_EQ(layers[0].value, gl::Value(4.0));
  EXPECT_DOUBLE_EQ(layers[0].height, gl::kLayerSpacing);
  EXPECT_EQ(layers[1].function, "SUM");
  EXPECT_NEAR(std::get<double>(layers[1].value), 4.2, 1e-12);
  EXPECT_DOUBLE_EQ(layers[1].height, 2 * gl::kLayerSpacing);
}

TEST(NestedStack, SingleLayer) {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 6.0);
  wb.set_cell_text(at("B1"), "=SUM(A1)");
  const auto layers = gl::nested_stack(wb, at("B1"));
  ASSERT_EQ(layers.size(), 1u);
  EXPECT_EQ(layers[0].value, gl::Value(6.0));
}

TEST(NestedStack, NoFunction) {
  gl::Workbook wb;
  wb.set_cell_text(at("B1"), "=A1+1");
  try {
    gl::nested_stack(wb, at("B1"));
    FAIL();
  } catch (const gl::Error& e) {
    EXPECT_EQ(e.code(), gl::ErrorCode::NotAFunction);
  }
}

TEST(SlideToAlign, TargetOnScreen) {
  const auto vp = gl::Viewport::make(0, at("A1"), 10, 10);
  const auto r = gl::slide_to_align(vp, at("C3"));
  EXPECT_EQ(r.viewport, vp);
  EXPECT_EQ(r.animation.duration_ms, 0);
}

TEST(SlideToAlign, PageSnap) {
  const auto vp = gl::Viewport::make(0, at("A1"), 10, 10);
  const auto r = gl::slide_to_align(vp, at("M20"));
  EXPECT_EQ(r.viewport.origin, at("K11"));
  EXPECT_EQ(r.animation.duration_ms, gl::kSlideDurationMs);
  EXPECT_EQ(r.animation.from, at("A1"));
  EXPECT_EQ(r.animation.to, at("K11"));
  EXPECT_TRUE(gl::on_screen(r.viewport, at("M20")));
}

TEST(SlideToAlign, OneColumnRight) {
  const auto vp = gl::Viewport::make(0, at("A1"), 10, 10);
  const auto r = gl::slide_to_align(vp, at("K5"));
  EXPECT_EQ(r.viewport.origin, at("K1"));
}

TEST(SlideToAlign, TargetAlwaysLandsOnScreen) {
  const auto vp = gl::Viewport::make(0, at("A1"), 10, 10);
  for (int row = 0; row < 40; ++row)
    for (int col = 0; col < 40; ++col) {
      const auto r = gl::slide_to_align(vp, {0, row, col});
      const auto rect = gl::cell_rect(r.viewport, {0, row, col});
      EXPECT_TRUE((gl::Rect{0, 0, 1, 1}.contains(rect)));
    }
}

TEST(CellGeometry, ScreenAndMargin) {
  const auto vp = gl::Viewport::make(0, at("A1"), 10, 10);
  EXPECT_EQ(gl::cell_at(vp, 0.05, 0.35), at("A4"));
  EXPECT_EQ(gl::cell_at(vp, 1.05, 0.05), at("K1"));
  EXPECT_FALSE(gl::cell_at(vp, -0.05, 0.05));
  EXPECT_EQ(gl::extended_canvas(vp), (gl::Rect{-1, -1, 2, 2}));
  const auto rect = gl::cell_rect(vp, at("B3"));
  EXPECT_NEAR(rect.x0, 0.1, 1e-12);
  EXPECT_NEAR(rect.y1, 0.3, 1e-12);
}

TEST(Overview, PickCorners) {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 1.0);
  wb.set_cell(at("T20"), 1.0);
  const auto ov = gl::overview_scene(wb, gl::Viewport::make(0, at("A1"), 10, 10));
  ASSERT_TRUE(ov);
  EXPECT_EQ(gl::overview_pick(*ov, 0, 0), at("A1"));
  EXPECT_EQ(gl::overview_pick(*ov, 1, 1), at("T20"));
  EXPECT_EQ(gl::overview_pick(*ov, 0.5, 0.5), at("K11"));
  EXPECT_TRUE(ov->bounds.contains(ov->viewport_indicator));
  EXPECT_GT(ov->scale, 0);
  EXPECT_LE(ov->scale, 1);
  EXPECT_DOUBLE_EQ(ov->distance, gl::kOverviewDistance);
}

TEST(TabGeometry, IdleAndSliding) {
  const double p = 1 + gl::kDefaultTabGap;
  auto offsets = [](const std::vector<gl::TabOffset>& tabs) {
    std::vector<double> out;
    for (const auto& t : tabs) out.push_back(t.offset);
    return out;
  };
  EXPECT_EQ(offsets(gl::tab_geometry(3, 0, 1, 0)), (std::vector<double>{0, p, 2 * p}));
  EXPECT_EQ(offsets(gl::tab_geometry(3, 1, 1, 0)), (std::vector<double>{-p, 0, p}));
  const auto mid = offsets(gl::tab_geometry(3, 1, 0.5, 0));
  EXPECT_NEAR(mid[0], -0.5 * p, 1e-12);
  EXPECT_NEAR(mid[1], 0.5 * p, 1e-12);
  EXPECT_NEAR(mid[2], 1.5 * p, 1e-12);
}

TEST(Project, AllTogglesOff) {
  const auto wb = fixture();
  gl::InteractionState s;
  gl::ArcToggles t;
  const auto f = gl::project(wb, s.viewport, s, t);
  EXPECT_FALSE(f.grid_cells.empty());
  EXPECT_EQ(f.tabs.size(), 1u);
  EXPECT_TRUE(f.layers.empty());
  EXPECT_TRUE(f.links.empty());
  EXPECT_TRUE(f.stacks.empty());
  EXPECT_FALSE(f.overview);
  EXPECT_EQ(f.arc_menu.size(), 5u);
  EXPECT_EQ(f.trash, gl::kTrashRect);
}

TEST(Project, DependencyLinks) {
  const auto wb = fixture();
  auto s = selecting("A4");
  gl::ArcToggles t;
  t.dependencies = true;
  t.dependency_depth = 1;
  const auto f = gl::project(wb, s.viewport, s, t);
  EXPECT_EQ(f.links.size(), 4u);
  for (const auto& l : f.links) EXPECT_EQ(l.tag, "dep-L1");
  t.hidden_links.insert(at("A4"));
  EXPECT_TRUE(gl::project(wb, s.viewport, s, t).links.empty());
}

TEST(Project, ClusterLayer) {
  auto wb = fixture();
  wb.define_cluster("costs", at("D1"), 1, {gl::CellRange::normalized(at("B1"), at("B3"))});
  gl::InteractionState s;
  gl::ArcToggles t;
  t.clusters = true;
  const auto f = gl::project(wb, s.viewport, s, t);
  ASSERT_EQ(f.layers.size(), 1u);
  EXPECT_EQ(f.layers[0].level, 1);
  EXPECT_DOUBLE_EQ(f.layers[0].height, gl::kLayerSpacing);
  int opaque = 0;
  for (const auto& c : f.layers[0].cells) {
    if (c.transparent) continue;
    ++opaque;
    EXPECT_EQ(c.anchor, at("D1"));
    EXPECT_EQ(c.label, "costs");
  }
  EXPECT_EQ(opaque, 1);
}

TEST(Project, NestedStacksAndOverview) {
  auto wb = fixture();
  wb.set_cell_text(at("C1"), "=ROUND(SUM(A1:B3),0)");
  auto s = selecting("C1");
  gl::ArcToggles t;
  t.functions = true;
  t.overview = true;
  const auto f = gl::project(wb, s.viewport, s, t);
  ASSERT_FALSE(f.stacks.empty());
  EXPECT_TRUE(f.overview);
}

TEST(Project, MaskFlagsMatchUsedMask) {
  const auto wb = fixture();
  gl::InteractionState s;
  const auto f = gl::project(wb, s.viewport, s, {});
  std::set<CellAddress> masked;
  for (const auto& c : f.grid_cells)
    if (c.masked) masked.insert(c.cell);
  EXPECT_EQ(masked, gl::used_mask(wb, 0));
}

TEST(Project, IsPure) {
  const auto wb = fixture();
  auto s = selecting("A4");
  gl::ArcToggles t{true, true, true, true, true, true, 2, {}};
  EXPECT_EQ(gl::project(wb, s.viewport, s, t), gl::project(wb, s.viewport, s, t));
}

TEST(Project, VerticalModeOnlyChangesPlacement) {
  const auto wb = fixture();
  auto s = selecting("A4");
  auto aligned = gl::project(wb, s.viewport, s, {});
  auto vp = s.viewport;
  vp.mode = gl::ViewportMode::Vertical;
  auto vertical = gl::project(wb, vp, s, {});
  EXPECT_EQ(vertical.placement.mode, gl::ViewportMode::Vertical);
  EXPECT_NE(vertical.placement.tilt_deg, aligned.placement.tilt_deg);
  EXPECT_EQ(vertical.grid_cells, aligned.grid_cells);
  EXPECT_EQ(vertical.links, aligned.links);
}

TEST(Project, ScreenRectsInsideExtendedCanvas) {
  auto wb = fixture();
  wb.set_cell({0, 30, 30}, 1.0);
  gl::InteractionState s;
  const auto f = gl::project(wb, s.viewport, s, {});
  const auto canvas = gl::extended_canvas(s.viewport);
  for (const auto& c : f.grid_cells) EXPECT_TRUE(canvas.contains(c.rect));
}
