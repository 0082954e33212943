#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gridlayers/address.hpp"

namespace gridlayers {

class Workbook;

enum class ChartKind { Bar };
enum class TrendKind { Linear, Poly2 };

struct Trend {
  TrendKind kind = TrendKind::Linear;
  /// (slope, intercept) for Linear, (a2, a1, a0) for Poly2.
  std::vector<double> coeffs;
  friend bool operator==(const Trend&, const Trend&) = default;
};

struct ChartSpec {
  int id = 0;
  CellAddress anchor;  // top-left cell
  int width_cells = 1;
  int height_cells = 1;
  ChartKind kind = ChartKind::Bar;
  RefSpec series;
  /// Trendline the user asked for; refitted after every recalculation.
  std::optional<TrendKind> trend_request;
  /// Current fit, absent when the series cannot support the requested fit.
  std::optional<Trend> trend;
  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

struct Point2 {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// One bar in chart-local cell units: x grows right from the chart's left
/// edge, y grows down from its top edge. The baseline sits at mid-height.
struct BarGeometry {
  double value = 0;
  double x0 = 0, x1 = 0;
  double y0 = 0, y1 = 0;
  friend bool operator==(const BarGeometry&, const BarGeometry&) = default;
};

/// Ordinary least squares: returns (slope, intercept). Throws DegenerateX
/// when fewer than two points or all x are equal.
std::pair<double, double> linear_trend(const std::vector<Point2>& points);

/// Least squares via the normal equations (partial pivoting) over centered,
/// scaled x. Degree 2 returns (a2, a1, a0); degree 1 returns (slope,
/// intercept). Throws Singular on rank deficiency.
std::vector<double> poly_trend(const std::vector<Point2>& points, int degree = 2);

/// Numeric values of a chart series in reading order (text and empty cells
/// are skipped).
std::vector<double> series_values(const Workbook& wb, const RefSpec& series);

/// Trend fit over (index, value) pairs.
Trend fit_trend(TrendKind kind, const std::vector<double>& values);

/// Validates the series and registers a live bar chart. Throws EmptySeries
/// when the series has no numeric value.
const ChartSpec& create_chart(Workbook& wb, const RefSpec& series, CellAddress anchor, int width_cells,
                              int height_cells);

std::vector<BarGeometry> bar_geometry(const ChartSpec& chart, const std::vector<double>& values);

}  // namespace gridlayers
