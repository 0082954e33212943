#pragma once

#include <optional>
#include <vector>

#include "gridlayers/formula.hpp"
#include "gridlayers/value.hpp"

namespace gridlayers {

/// A reference expanded to the leaf cells it covers. Cluster references (and
/// cell references that land on a cluster anchor) expand recursively with
/// duplicates preserved.
struct Expansion {
  std::vector<CellAddress> cells;
  std::optional<ErrorKind> error;
  bool aggregate_only = false;  // ranges and clusters have no scalar value
};

/// What an evaluation needs from its surroundings.
class EvalEnvironment {
 public:
  virtual ~EvalEnvironment() = default;
  virtual Expansion expand(const RefSpec& ref) const = 0;
  virtual Value read(const CellAddress& cell) const = 0;
};

/// Evaluates an expression against the environment. Never throws for
/// spreadsheet-level problems; those come back as ErrorValue.
Value evaluate(const Expr& ast, const EvalEnvironment& env);

}  // namespace gridlayers
