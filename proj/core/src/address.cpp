#include "gridlayers/address.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "gridlayers/error.hpp"

namespace gridlayers {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Name: return "NameError";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::BadAddress: return "BadAddress";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::BadAnchor: return "BadAnchor";
    case ErrorCode::NotAMember: return "NotAMember";
    case ErrorCode::NotAFunction: return "NotAFunction";
    case ErrorCode::NotASource: return "NotASource";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::UnknownChart: return "UnknownChart";
    case ErrorCode::UnknownSheet: return "UnknownSheet";
    case ErrorCode::ClusterInUse: return "ClusterInUse";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NoSheet: return "NoSheet";
    case ErrorCode::Format: return "FormatError";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

CellRange CellRange::normalized(CellAddress a, CellAddress b) {
  CellRange r;
  r.start = {a.sheet, std::min(a.row, b.row), std::min(a.col, b.col)};
  r.end = {a.sheet, std::max(a.row, b.row), std::max(a.col, b.col)};
  return r;
}

std::string column_letters(int col) {
  if (col < 26) return std::string(1, static_cast<char>('A' + col));
  const int hi = col / 26 - 1;
  const int lo = col % 26;
  return {static_cast<char>('A' + hi), static_cast<char>('A' + lo)};
}

std::optional<int> parse_column_letters(std::string_view letters) {
  if (letters.empty() || letters.size() > 2) return std::nullopt;
  int value = 0;
  for (char ch : letters) {
    if (!std::isalpha(static_cast<unsigned char>(ch))) return std::nullopt;
    value = value * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
  }
  return value - 1;
}

std::string a1(const CellAddress& addr) {
  return column_letters(addr.col) + std::to_string(addr.row + 1);
}

std::optional<CellAddress> parse_a1(std::string_view text, int sheet) {
  std::size_t i = 0;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0 || i == text.size()) return std::nullopt;
  auto col = parse_column_letters(text.substr(0, i));
  if (!col) return std::nullopt;
  if (text[i] == '0') return std::nullopt;
  int row = 0;
  auto digits = text.substr(i);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), row);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  if (row < 1 || row - 1 > kMaxRow) return std::nullopt;
  return CellAddress{sheet, row - 1, *col};
}

std::string default_sheet_name(int index) { return "Sheet" + std::to_string(index + 1); }

SheetNames SheetNames::defaults() {
  SheetNames names;
  names.lookup = [](std::string_view name) -> std::optional<int> {
    constexpr std::string_view prefix = "Sheet";
    if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
    int n = 0;
    auto digits = name.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || n < 1 || digits[0] == '0') return std::nullopt;
    return n - 1;
  };
  names.name = [](int index) { return default_sheet_name(index); };
  return names;
}

std::string address_text(const CellAddress& addr, int context_sheet, const SheetNames& names) {
  if (addr.sheet == context_sheet) return a1(addr);
  return names.name(addr.sheet) + "!" + a1(addr);
}

std::string ref_text(const RefSpec& ref, int context_sheet, const SheetNames& names) {
  if (const auto* cell = std::get_if<CellAddress>(&ref)) return address_text(*cell, context_sheet, names);
  if (const auto* range = std::get_if<CellRange>(&ref))
    return address_text(range->start, context_sheet, names) + ":" + a1(range->end);
  return "@" + std::get<ClusterName>(ref).label;
}

namespace {

std::pair<int, std::string_view> split_sheet(std::string_view text, int context_sheet, const SheetNames& names) {
  auto bang = text.find('!');
  if (bang == std::string_view::npos) return {context_sheet, text};
  auto sheet = names.lookup(text.substr(0, bang));
  if (!sheet) throw Error(ErrorCode::UnknownSheet, "unknown sheet '" + std::string(text.substr(0, bang)) + "'");
  return {*sheet, text.substr(bang + 1)};
}

}  // namespace

CellAddress parse_address_text(std::string_view text, int context_sheet, const SheetNames& names) {
  auto [sheet, rest] = split_sheet(text, context_sheet, names);
  auto addr = parse_a1(rest, sheet);
  if (!addr) throw Error(ErrorCode::BadAddress, "bad cell address '" + std::string(text) + "'");
  return *addr;
}

RefSpec parse_ref_text(std::string_view text, int context_sheet, const SheetNames& names) {
  if (!text.empty() && text.front() == '@') {
    if (text.size() == 1) throw Error(ErrorCode::BadAddress, "empty cluster label");
    return ClusterName{std::string(text.substr(1))};
  }
  auto [sheet, rest] = split_sheet(text, context_sheet, names);
  auto colon = rest.find(':');
  if (colon == std::string_view::npos) {
    auto addr = parse_a1(rest, sheet);
    if (!addr) throw Error(ErrorCode::BadAddress, "bad reference '" + std::string(text) + "'");
    return *addr;
  }
  auto a = parse_a1(rest.substr(0, colon), sheet);
  auto b = parse_a1(rest.substr(colon + 1), sheet);
  if (!a || !b) throw Error(ErrorCode::BadAddress, "bad range '" + std::string(text) + "'");
  return CellRange::normalized(*a, *b);
}

}  // namespace gridlayers
