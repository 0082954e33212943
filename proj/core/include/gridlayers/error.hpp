#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridlayers {

enum class ErrorCode {
  Syntax,
  Name,
  BadArity,
  BadAddress,
  DuplicateLabel,
  LevelViolation,
  BadAnchor,
  NotAMember,
  NotAFunction,
  NotASource,
  UnknownCluster,
  UnknownChart,
  UnknownSheet,
  ClusterInUse,
  EmptySeries,
  DegenerateX,
  Singular,
  NoSheet,
  Format,
  Io,
};

std::string_view error_code_name(ErrorCode code);

/// Failure of a library operation. Cell-level evaluation problems are never
/// reported this way; they surface as error values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected)
      : Error(ErrorCode::Syntax, "syntax error at " + std::to_string(position) +
                                     ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace gridlayers
