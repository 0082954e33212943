#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "gridlayers/chart.hpp"
#include "gridlayers/error.hpp"
#include "gridlayers/workbook.hpp"

namespace gl = gridlayers;
using gl::Point2;

namespace {

gl::CellAddress at(const char* a1) { return *gl::parse_a1(a1); }

gl::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const gl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return gl::ErrorCode::Format;
}

}  // namespace

TEST(LinearTrend, Collinear) {
  const auto [slope, intercept] = gl::linear_trend({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_DOUBLE_EQ(slope, 1);
  EXPECT_NEAR(intercept, 0, 1e-15);
}

TEST(LinearTrend, Constant) {
  const auto [slope, intercept] = gl::linear_trend({{0, 1}, {1, 1}, {2, 1}});
  EXPECT_DOUBLE_EQ(slope, 0);
  EXPECT_DOUBLE_EQ(intercept, 1);
}

TEST(LinearTrend, ClosedFormOls) {
  const auto [slope, intercept] = gl::linear_trend({{0, 0}, {1, 2}, {2, 3}});
  EXPECT_NEAR(slope, 1.5, 1e-12);
  EXPECT_NEAR(intercept, 1.0 / 6.0, 1e-12);
}

TEST(LinearTrend, DegenerateX) {
  EXPECT_EQ(code_of([] { gl::linear_trend({{1, 0}, {1, 2}}); }), gl::ErrorCode::DegenerateX);
  EXPECT_EQ(code_of([] { gl::linear_trend({{1, 0}}); }), gl::ErrorCode::DegenerateX);
}

TEST(PolyTrend, ExactParabola) {
  const auto c = gl::poly_trend({{0, 0}, {1, 1}, {2, 4}});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(c[0], 1, 1e-12);
  EXPECT_NEAR(c[1], 0, 1e-12);
  EXPECT_NEAR(c[2], 0, 1e-12);
}

TEST(PolyTrend, CollinearGivesZeroCurvature) {
  const auto c = gl::poly_trend({{0, 1}, {1, 3}, {2, 5}});
  EXPECT_NEAR(c[0], 0, 1e-12);
  EXPECT_NEAR(c[1], 2, 1e-12);
  EXPECT_NEAR(c[2], 1, 1e-12);
}

TEST(PolyTrend, RecoversPlantedQuadratic) {
  std::vector<Point2> pts;
  for (int x = 0; x <= 4; ++x) pts.push_back({double(x), 2.0 * x * x - x + 3});
  const auto c = gl::poly_trend(pts);
  EXPECT_NEAR(c[0], 2, 1e-9);
  EXPECT_NEAR(c[1], -1, 1e-9);
  EXPECT_NEAR(c[2], 3, 1e-9);
}

TEST(PolyTrend, SingularWhenTooFewDistinctX) {
  EXPECT_EQ(code_of([] { gl::poly_trend({{0, 0}, {1, 1}}); }), gl::ErrorCode::Singular);
  EXPECT_EQ(code_of([] { gl::poly_trend({{1, 0}, {1, 1}, {1, 2}}); }), gl::ErrorCode::Singular);
}

TEST(PolyTrend, DegreeOneMatchesLinear) {
  const std::vector<Point2> pts{{0, 0}, {1, 2}, {2, 3}, {5, 4}};
  const auto c = gl::poly_trend(pts, 1);
  const auto [slope, intercept] = gl::linear_trend(pts);
  EXPECT_NEAR(c[0], slope, 1e-12);
  EXPECT_NEAR(c[1], intercept, 1e-12);
}

TEST(TrendProperty, ResidualOrthogonality) {
  gl::testing::Rng rng(3);
  for (int n = 0; n < 50; ++n) {
    std::vector<Point2> pts;
    const int count = gl::testing::uniform(rng, 2, 30);
    for (int i = 0; i < count; ++i)
      pts.push_back({gl::testing::uniform_real(rng, -10, 10), gl::testing::uniform_real(rng, -100, 100)});
    const auto [slope, intercept] = gl::linear_trend(pts);
    double sr = 0, sxr = 0;
    for (const auto& p : pts) {
      const double r = p.y - (slope * p.x + intercept);
      sr += r;
      sxr += p.x * r;
    }
    EXPECT_NEAR(sr, 0, 1e-9);
    EXPECT_NEAR(sxr, 0, 1e-9);
  }
}

class ChartFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    wb.set_cell(at("B1"), 2.0);
    wb.set_cell(at("B2"), 30.0);
    wb.set_cell(at("B3"), 4.0);
  }
  gl::Workbook wb;
};

TEST_F(ChartFixture, BarsProportionalToValues) {
  const auto& chart = gl::create_chart(wb, gl::CellRange::normalized(at("B1"), at("B3")), at("D5"), 4, 3);
  const auto bars = gl::bar_geometry(chart, gl::series_values(wb, chart.series));
  ASSERT_EQ(bars.size(), 3u);
  const double h0 = bars[0].y1 - bars[0].y0, h1 = bars[1].y1 - bars[1].y0, h2 = bars[2].y1 - bars[2].y0;
  EXPECT_NEAR(h0 / h1, 2.0 / 30.0, 1e-12);
  EXPECT_NEAR(h2 / h1, 4.0 / 30.0, 1e-12);
  EXPECT_NEAR(h1, 1.5, 1e-12);
  for (const auto& b : bars) {
    EXPECT_DOUBLE_EQ(b.y1, 1.5);
    EXPECT_GE(b.x0, 0);
    EXPECT_LE(b.x1, 4);
  }
}

TEST_F(ChartFixture, NegativeBarsHangBelowBaseline) {
  wb.set_cell(at("B2"), -30.0);
  const auto& chart = gl::create_chart(wb, gl::CellRange::normalized(at("B1"), at("B3")), at("D5"), 4, 2);
  const auto bars = gl::bar_geometry(chart, gl::series_values(wb, chart.series));
  EXPECT_DOUBLE_EQ(bars[1].y0, 1.0);
  EXPECT_DOUBLE_EQ(bars[1].y1, 2.0);
}

TEST_F(ChartFixture, ClusterSeriesEqualsRangeSeries) {
  wb.define_cluster("costs", at("D1"), 1, {gl::CellRange::normalized(at("B1"), at("B3"))});
  EXPECT_EQ(gl::series_values(wb, gl::ClusterName{"costs"}),
            gl::series_values(wb, gl::CellRange::normalized(at("B1"), at("B3"))));
}

TEST_F(ChartFixture, EmptySeries) {
  EXPECT_EQ(code_of([&] { gl::create_chart(wb, gl::CellRange::normalized(at("F1"), at("F3")), at("D5"), 2, 2); }),
            gl::ErrorCode::EmptySeries);
}

TEST_F(ChartFixture, TrendIsRefitOnEdit) {
  const int id = gl::create_chart(wb, gl::CellRange::normalized(at("B1"), at("B3")), at("D5"), 3, 3).id;
  wb.set_chart_trend(id, gl::TrendKind::Linear);
  wb.set_cell(at("B2"), 3.0);
  const auto* chart = wb.find_chart(id);
  ASSERT_TRUE(chart->trend);
  EXPECT_NEAR(chart->trend->coeffs[0], 1, 1e-12);
  EXPECT_NEAR(chart->trend->coeffs[1], 2, 1e-12);
}
