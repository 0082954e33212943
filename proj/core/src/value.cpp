#include "gridlayers/value.hpp"

#include "gridlayers/formula.hpp"

namespace gridlayers {

std::string_view error_text(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Cycle: return "#CYCLE!";
    case ErrorKind::Ref: return "#REF!";
    case ErrorKind::Name: return "#NAME?";
    case ErrorKind::Value: return "#VALUE!";
    case ErrorKind::Div0: return "#DIV/0!";
  }
  return "#ERR!";
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Cycle: return "CYCLE";
    case ErrorKind::Ref: return "REF";
    case ErrorKind::Name: return "NAME";
    case ErrorKind::Value: return "VALUE";
    case ErrorKind::Div0: return "DIV0";
  }
  return "ERR";
}

std::string value_text(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* e = std::get_if<ErrorValue>(&v)) return std::string(error_text(e->kind));
  return {};
}

}  // namespace gridlayers
