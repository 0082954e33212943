#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace gridlayers {

/// Highest column index addressable with two letters (ZZ).
inline constexpr int kMaxColumn = 701;
inline constexpr int kMaxRow = 65535;

/// A grid position. Rows and columns are 0-based; A1 is (col 0, row 0).
/// Ordering is sheet-major then row-major, which is also the reading order
/// used for every deterministic listing of cells.
struct CellAddress {
  int sheet = 0;
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellAddress&, const CellAddress&) = default;
};

struct CellRange {
  CellAddress start;
  CellAddress end;

  /// Orders the corners so that start <= end component-wise.
  static CellRange normalized(CellAddress a, CellAddress b);

  bool contains(const CellAddress& a) const {
    return a.sheet == start.sheet && a.row >= start.row && a.row <= end.row &&
           a.col >= start.col && a.col <= end.col;
  }
  int rows() const { return end.row - start.row + 1; }
  int cols() const { return end.col - start.col + 1; }
  std::size_t size() const { return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols()); }

  friend auto operator<=>(const CellRange&, const CellRange&) = default;
};

struct ClusterName {
  std::string label;
  friend auto operator<=>(const ClusterName&, const ClusterName&) = default;
};

/// A reference as it appears in a formula argument or a cluster member list.
using RefSpec = std::variant<CellAddress, CellRange, ClusterName>;

std::string column_letters(int col);
/// Parses one or two letters (case-insensitive). Returns nullopt past ZZ.
std::optional<int> parse_column_letters(std::string_view letters);

/// "B3" (no sheet prefix).
std::string a1(const CellAddress& addr);
/// Parses "B3" into (row 2, col 1) on the given sheet. Rejects sheet prefixes.
std::optional<CellAddress> parse_a1(std::string_view text, int sheet = 0);

/// Resolves sheet names to indices and back; used by the parser, the printer
/// and every textual address format.
struct SheetNames {
  std::function<std::optional<int>(std::string_view)> lookup;
  std::function<std::string(int)> name;

  /// Sheets named Sheet1, Sheet2, ... with no upper bound.
  static SheetNames defaults();
};

std::string default_sheet_name(int index);

/// Renders a reference relative to `context_sheet`: refs on other sheets
/// carry a "Name!" prefix.
std::string ref_text(const RefSpec& ref, int context_sheet, const SheetNames& names);
/// Inverse of ref_text for Cell, Range and "@label" forms.
RefSpec parse_ref_text(std::string_view text, int context_sheet, const SheetNames& names);

std::string address_text(const CellAddress& addr, int context_sheet, const SheetNames& names);
CellAddress parse_address_text(std::string_view text, int context_sheet, const SheetNames& names);

}  // namespace gridlayers

template <>
struct std::hash<gridlayers::CellAddress> {
  std::size_t operator()(const gridlayers::CellAddress& a) const noexcept {
    return (static_cast<std::size_t>(a.sheet) * 1000003u + static_cast<std::size_t>(a.row)) * 1009u +
           static_cast<std::size_t>(a.col);
  }
};
