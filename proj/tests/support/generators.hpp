#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gridlayers/formula.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers::testing {

using Rng = std::mt19937_64;

struct AstOptions {
  int max_depth = 6;
  int rows = 20;
  int cols = 20;
  int sheets = 1;                    // refs may point at sheets [0, sheets)
  bool strings = true;               // StringLit leaves
  bool fractions = true;             // non-integer number literals
  bool division = true;              // '/' operator
  std::vector<std::string> clusters; // labels usable as @refs
  int max_range_extent = 4;          // rows/cols of generated ranges
};

int uniform(Rng& rng, int lo, int hi);
double uniform_real(Rng& rng, double lo, double hi);
bool chance(Rng& rng, double p);

CellAddress random_cell(Rng& rng, const AstOptions& o, int sheet = 0);
RefSpec random_ref(Rng& rng, const AstOptions& o);

/// Random expression whose tree height is at most `depth`. Literals are
/// non-negative (negation is expressed with Neg nodes) and function calls
/// respect the arity of their function.
Expr random_ast(Rng& rng, const AstOptions& o, int depth);
Expr random_ast(Rng& rng, const AstOptions& o);

/// Formula whose root is a call and whose deepest call path has exactly
/// `depth` calls.
Expr random_nested_call(Rng& rng, const AstOptions& o, int depth);

/// One random edit on a rows x cols grid of sheet 0: a literal, a formula
/// of depth <= max_depth, or clearing the cell.
struct Edit {
  CellAddress cell;
  std::string text;
};
Edit random_edit(Rng& rng, const AstOptions& o);

/// Workbook populated with integer literals and formulas over integer
/// literals and refs (sheet 0 only).
Workbook random_workbook(Rng& rng, const AstOptions& o, int cells);

}  // namespace gridlayers::testing
