#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace gridlayers {

enum class ErrorKind { Cycle, Ref, Name, Value, Div0 };

/// Marker for a cell with no content. Distinct from an empty string.
struct EmptyValue {
  friend bool operator==(EmptyValue, EmptyValue) { return true; }
};

struct ErrorValue {
  ErrorKind kind;
  friend bool operator==(ErrorValue, ErrorValue) = default;
};

using Value = std::variant<EmptyValue, double, std::string, ErrorValue>;

inline bool is_empty(const Value& v) { return std::holds_alternative<EmptyValue>(v); }
inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }
inline bool is_error(const Value& v) { return std::holds_alternative<ErrorValue>(v); }

/// "#CYCLE!", "#REF!", "#NAME?", "#VALUE!", "#DIV/0!".
std::string_view error_text(ErrorKind kind);
std::string_view error_kind_name(ErrorKind kind);

/// Display text: shortest round-trip decimal for numbers, the string itself
/// for text, the error marker for errors and "" for empty cells.
std::string value_text(const Value& v);

}  // namespace gridlayers
