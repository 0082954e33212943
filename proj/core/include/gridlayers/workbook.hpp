#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gridlayers/chart.hpp"
#include "gridlayers/evaluate.hpp"
#include "gridlayers/formula.hpp"
#include "gridlayers/value.hpp"

namespace gridlayers {

struct EmptyCell {
  friend bool operator==(EmptyCell, EmptyCell) { return true; }
};

struct FormulaCell {
  Expr ast;
  Value cached = EmptyValue{};
  friend bool operator==(const FormulaCell&, const FormulaCell&) = default;
};

using CellContent = std::variant<EmptyCell, double, std::string, FormulaCell>;

/// Named group of cells anchored at one grid cell and shown on an overlay
/// level. Members may name lower-level clusters, so the hierarchy is acyclic.
struct ClusterCell {
  int id = 0;
  std::string label;
  CellAddress anchor;
  int level = 1;
  std::vector<RefSpec> members;
  friend bool operator==(const ClusterCell&, const ClusterCell&) = default;
};

/// Recomputed cells of one mutation. `evaluated` is the evaluation order
/// (topological, cycle members last); `changed` holds the cells among them
/// whose value differs from before, in the same order.
struct RecalcResult {
  std::vector<CellAddress> evaluated;
  std::vector<std::pair<CellAddress, Value>> changed;
};

using DependencyEdge = std::pair<CellAddress, CellAddress>;  // (from dependent, to precedent)
using EdgeLevels = std::vector<std::set<DependencyEdge>>;

/// Precedent/dependent edges between cells, with ranges and clusters
/// expanded to leaf cells. The two maps are kept exact inverses.
class DependencyGraph {
 public:
  const std::set<CellAddress>& precedents(const CellAddress& cell) const;
  const std::set<CellAddress>& dependents(const CellAddress& cell) const;
  void set_precedents(const CellAddress& cell, std::set<CellAddress> precedents);
  void erase(const CellAddress& cell);

  const std::map<int, std::vector<CellAddress>>& cluster_edges() const { return cluster_edges_; }
  void set_cluster_edges(int cluster_id, std::vector<CellAddress> cells);
  void erase_cluster(int cluster_id) { cluster_edges_.erase(cluster_id); }

  /// True when the dependents map is exactly the inverse of precedents.
  bool consistent() const;

 private:
  std::map<CellAddress, std::set<CellAddress>> precedents_;
  std::map<CellAddress, std::set<CellAddress>> dependents_;
  std::map<int, std::vector<CellAddress>> cluster_edges_;
};

/// The document: sheets, cells, clusters and charts. Every mutation bumps the
/// revision and leaves every formula's cached value consistent with a full
/// re-evaluation.
class Workbook {
 public:
  Workbook();
  /// Workbook whose single sheet has the given name.
  explicit Workbook(std::string first_sheet);

  int add_sheet(std::string name);
  int sheet_count() const { return static_cast<int>(sheet_names_.size()); }
  const std::string& sheet_name(int index) const { return sheet_names_.at(static_cast<std::size_t>(index)); }
  std::optional<int> find_sheet(std::string_view name) const;
  SheetNames names() const;
  FormulaContext context(int sheet) const { return FormulaContext{sheet, names()}; }

  /// "=..." parses as a formula, numeric text as a number, "" as empty and
  /// anything else as text.
  CellContent parse_input(std::string_view text, int sheet) const;
  /// Canonical input text of a cell (formula in print form).
  std::string input_text(const CellAddress& cell) const;

  RecalcResult set_cell(const CellAddress& cell, CellContent content);
  RecalcResult set_cell_text(const CellAddress& cell, std::string_view text);
  Value get_value(const CellAddress& cell) const;
  const CellContent& content(const CellAddress& cell) const;
  /// Populated cells (content or cluster anchor) of one sheet in reading order.
  std::vector<CellAddress> used_cells(int sheet) const;
  const std::map<CellAddress, CellContent>& cells() const { return cells_; }

  const ClusterCell& define_cluster(const std::string& label, CellAddress anchor, int level,
                                    std::vector<RefSpec> members);
  RecalcResult modify_cluster(int id, const std::vector<RefSpec>& add, const std::vector<RefSpec>& remove);
  RecalcResult rename_cluster(int id, const std::string& label);
  RecalcResult delete_cluster(int id);
  const ClusterCell* find_cluster(int id) const;
  const ClusterCell* find_cluster(std::string_view label) const;
  const ClusterCell* cluster_at(const CellAddress& anchor) const;
  const std::map<int, ClusterCell>& clusters() const { return clusters_; }
  /// Leaf cells of a cluster, recursively, duplicates preserved.
  std::vector<CellAddress> flatten_cluster(int id) const;
  /// Labels not yet used, of the form "cluster<N>".
  std::string fresh_cluster_label() const;

  RecalcResult add_source(const CellAddress& func_cell, const std::vector<RefSpec>& refs);
  RecalcResult remove_source(const CellAddress& func_cell, const CellAddress& victim);

  /// Level i holds edges leaving the targets of level i-1 (level 1 leaves
  /// `cell`). Always returns `depth` levels.
  EdgeLevels precedents_closure(const CellAddress& cell, int depth) const;

  Expansion expand(const RefSpec& ref) const;
  /// Evaluates an expression in the current state of the workbook.
  Value evaluate_now(const Expr& ast) const;
  /// True when the cell's value is #CYCLE! because it sits on or below a cycle.
  bool cycle_tainted(const CellAddress& cell) const { return tainted_.contains(cell); }

  const ChartSpec& add_chart(ChartSpec chart);
  void set_chart_trend(int chart_id, std::optional<TrendKind> kind);
  const ChartSpec* find_chart(int id) const;
  const std::vector<ChartSpec>& charts() const { return charts_; }

  const DependencyGraph& graph() const { return graph_; }
  std::uint64_t revision() const { return revision_; }

  /// Re-resolves and re-evaluates every formula from scratch.
  void recalculate_all();

 private:
  class Env;

  void check_address(const CellAddress& cell) const;
  void check_ref(const RefSpec& ref) const;
  void flatten_into(int id, std::vector<CellAddress>& out) const;
  void resolve(const CellAddress& cell);
  void forget(const CellAddress& cell);
  std::set<int> with_ancestors(int id) const;
  std::set<CellAddress> users_of(const std::set<int>& cluster_ids) const;
  RecalcResult recompute(const std::set<CellAddress>& reresolve, const std::set<CellAddress>& seeds);
  void refit_charts();
  void bump();

  std::vector<std::string> sheet_names_;
  std::map<CellAddress, CellContent> cells_;
  std::map<int, ClusterCell> clusters_;
  std::map<CellAddress, int> anchors_;
  std::map<std::string, std::set<CellAddress>, std::less<>> label_users_;
  std::map<CellAddress, std::set<std::string>> labels_used_;
  std::set<CellAddress> tainted_;
  DependencyGraph graph_;
  std::vector<ChartSpec> charts_;
  int next_cluster_id_ = 1;
  int next_chart_id_ = 1;
  std::uint64_t revision_ = 0;
};

/// Range minus one cell as maximal rectangles: the full-width band above,
/// the row segments left and right of the cell, then the band below.
/// Single cells come back as CellAddress refs.
std::vector<RefSpec> split_range(const CellRange& range, const CellAddress& victim);

/// Label syntax accepted for clusters: [A-Za-z0-9_]+.
bool valid_cluster_label(std::string_view label);

}  // namespace gridlayers
