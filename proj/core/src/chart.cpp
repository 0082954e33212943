#include "gridlayers/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gridlayers/error.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers {

std::pair<double, double> linear_trend(const std::vector<Point2>& points) {
  if (points.size() < 2) throw Error(ErrorCode::DegenerateX, "a linear trend needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateX, "all x values are equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<double> poly_trend(const std::vector<Point2>& points, int degree) {
  if (degree < 1 || degree > 2) throw std::invalid_argument("poly_trend supports degree 1 or 2");
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (points.size() < m) throw Error(ErrorCode::Singular, "not enough points for the requested degree");

  // Fit in t = (x - center) / scale so the normal matrix stays well conditioned.
  double lo = points.front().x, hi = points.front().x, center = 0;
  for (const auto& p : points) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
    center += p.x;
  }
  center /= static_cast<double>(points.size());
  const double scale = (hi - lo) / 2.0;
  if (scale == 0.0) throw Error(ErrorCode::Singular, "all x values are equal");

  std::array<std::array<double, 4>, 3> a{};  // augmented normal matrix, power-ascending
  for (const auto& p : points) {
    const double t = (p.x - center) / scale;
    std::array<double, 3> pw{1.0, t, t * t};
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) a[i][j] += pw[i] * pw[j];
      a[i][m] += pw[i] * p.y;
    }
  }
  const double norm = a[0][0];
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-12 * norm) throw Error(ErrorCode::Singular, "normal matrix is rank-deficient");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= m; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::array<double, 3> b{};
  for (std::size_t i = 0; i < m; ++i) b[i] = a[i][m] / a[i][i];

  // Expand b0 + b1 t + b2 t^2 back into powers of x.
  const double c = center, s = scale;
  const double x2 = b[2] / (s * s);
  const double x1 = b[1] / s - 2.0 * b[2] * c / (s * s);
  const double x0 = b[0] - b[1] * c / s + b[2] * c * c / (s * s);
  if (degree == 1) return {x1, x0};
  return {x2, x1, x0};
}

std::vector<double> series_values(const Workbook& wb, const RefSpec& series) {
  Expansion ex = wb.expand(series);
  std::vector<double> out;
  if (ex.error) return out;
  for (const auto& cell : ex.cells) {
    Value v = wb.get_value(cell);
    if (const auto* d = std::get_if<double>(&v)) out.push_back(*d);
  }
  return out;
}

Trend fit_trend(TrendKind kind, const std::vector<double>& values) {
  std::vector<Point2> points;
  points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) points.push_back({static_cast<double>(i), values[i]});
  if (kind == TrendKind::Linear) {
    auto [slope, intercept] = linear_trend(points);
    return Trend{kind, {slope, intercept}};
  }
  return Trend{kind, poly_trend(points, 2)};
}

const ChartSpec& create_chart(Workbook& wb, const RefSpec& series, CellAddress anchor, int width_cells,
                              int height_cells) {
  if (series_values(wb, series).empty()) throw Error(ErrorCode::EmptySeries, "the series has no numeric values");
  ChartSpec spec;
  spec.anchor = anchor;
  spec.width_cells = width_cells;
  spec.height_cells = height_cells;
  spec.series = series;
  return wb.add_chart(std::move(spec));
}

std::vector<BarGeometry> bar_geometry(const ChartSpec& chart, const std::vector<double>& values) {
  std::vector<BarGeometry> bars;
  if (values.empty()) return bars;
  double peak = 0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  const double w = static_cast<double>(chart.width_cells);
  const double h = static_cast<double>(chart.height_cells);
  const double slot = w / static_cast<double>(values.size());
  const double baseline = h / 2.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const double len = peak == 0.0 ? 0.0 : std::abs(v) / peak * baseline;
    BarGeometry b;
    b.value = v;
    b.x0 = slot * (static_cast<double>(i) + 0.1);
    b.x1 = slot * (static_cast<double>(i) + 0.9);
    b.y0 = v >= 0 ? baseline - len : baseline;
    b.y1 = v >= 0 ? baseline : baseline + len;
    bars.push_back(b);
  }
  return bars;
}

}  // namespace gridlayers
