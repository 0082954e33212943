#include "gridlayers/workbook.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <deque>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

// Ranges larger than this expand to #REF! instead of materializing cells.
constexpr std::size_t kMaxExpansion = 1u << 18;

const std::set<CellAddress>& empty_set() {
  static const std::set<CellAddress> kEmpty;
  return kEmpty;
}

void append_range(const CellRange& r, std::vector<CellAddress>& out) {
  for (int row = r.start.row; row <= r.end.row; ++row)
    for (int col = r.start.col; col <= r.end.col; ++col) out.push_back({r.start.sheet, row, col});
}

bool covers(const RefSpec& member, const CellAddress& cell) {
  if (const auto* c = std::get_if<CellAddress>(&member)) return *c == cell;
  if (const auto* r = std::get_if<CellRange>(&member)) return r->contains(cell);
  return false;
}

void rename_in(Expr& e, const std::string& from, const std::string& to) {
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RefNode>) {
          if (auto* c = std::get_if<ClusterName>(&n.ref); c && c->label == from) c->label = to;
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          for (auto& a : n.args) rename_in(a, from, to);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          rename_in(*n.lhs, from, to);
          rename_in(*n.rhs, from, to);
        } else if constexpr (std::is_same_v<T, Neg>) {
          rename_in(*n.operand, from, to);
        }
      },
      e.node);
}

void check_arity(const FuncCall& f) {
  auto [lo, hi] = function_arity(f.name);
  if (f.args.size() < lo || (hi && f.args.size() > *hi))
    throw Error(ErrorCode::BadArity, f.name + " cannot take " + std::to_string(f.args.size()) + " argument(s)");
}

}  // namespace

// ---------------------------------------------------------------------------
// DependencyGraph

const std::set<CellAddress>& DependencyGraph::precedents(const CellAddress& cell) const {
  auto it = precedents_.find(cell);
  return it == precedents_.end() ? empty_set() : it->second;
}

const std::set<CellAddress>& DependencyGraph::dependents(const CellAddress& cell) const {
  auto it = dependents_.find(cell);
  return it == dependents_.end() ? empty_set() : it->second;
}

void DependencyGraph::set_precedents(const CellAddress& cell, std::set<CellAddress> precedents) {
  erase(cell);
  if (precedents.empty()) return;
  for (const auto& p : precedents) dependents_[p].insert(cell);
  precedents_.emplace(cell, std::move(precedents));
}

void DependencyGraph::erase(const CellAddress& cell) {
  auto it = precedents_.find(cell);
  if (it == precedents_.end()) return;
  for (const auto& p : it->second) {
    auto dit = dependents_.find(p);
    if (dit == dependents_.end()) continue;
    dit->second.erase(cell);
    if (dit->second.empty()) dependents_.erase(dit);
  }
  precedents_.erase(it);
}

void DependencyGraph::set_cluster_edges(int cluster_id, std::vector<CellAddress> cells) {
  cluster_edges_[cluster_id] = std::move(cells);
}

bool DependencyGraph::consistent() const {
  std::size_t forward = 0;
  for (const auto& [cell, precs] : precedents_) {
    if (precs.empty()) return false;
    for (const auto& p : precs) {
      if (!dependents(p).contains(cell)) return false;
      ++forward;
    }
  }
  std::size_t backward = 0;
  for (const auto& [cell, deps] : dependents_) {
    if (deps.empty()) return false;
    backward += deps.size();
  }
  return forward == backward;
}

// ---------------------------------------------------------------------------
// Workbook

class Workbook::Env final : public EvalEnvironment {
 public:
  explicit Env(const Workbook& wb) : wb_(wb) {}
  Expansion expand(const RefSpec& ref) const override { return wb_.expand(ref); }
  Value read(const CellAddress& cell) const override { return wb_.get_value(cell); }

 private:
  const Workbook& wb_;
};

Workbook::Workbook() { sheet_names_.push_back(default_sheet_name(0)); }

Workbook::Workbook(std::string first_sheet) {
  if (!valid_cluster_label(first_sheet) || !std::isalpha(static_cast<unsigned char>(first_sheet.front())))
    throw Error(ErrorCode::BadAddress, "sheet names must be identifiers: '" + first_sheet + "'");
  sheet_names_.push_back(std::move(first_sheet));
}

int Workbook::add_sheet(std::string name) {
  if (name.empty()) name = default_sheet_name(sheet_count());
  if (find_sheet(name)) throw Error(ErrorCode::DuplicateLabel, "sheet '" + name + "' already exists");
  if (!valid_cluster_label(name) || !std::isalpha(static_cast<unsigned char>(name.front())))
    throw Error(ErrorCode::BadAddress, "sheet names must be identifiers: '" + name + "'");
  sheet_names_.push_back(std::move(name));
  bump();
  return sheet_count() - 1;
}

std::optional<int> Workbook::find_sheet(std::string_view name) const {
  for (std::size_t i = 0; i < sheet_names_.size(); ++i)
    if (sheet_names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

SheetNames Workbook::names() const {
  SheetNames n;
  n.lookup = [names = sheet_names_](std::string_view name) -> std::optional<int> {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    return std::nullopt;
  };
  n.name = [names = sheet_names_](int index) {
    if (index >= 0 && static_cast<std::size_t>(index) < names.size()) return names[static_cast<std::size_t>(index)];
    return default_sheet_name(index);
  };
  return n;
}

CellContent Workbook::parse_input(std::string_view text, int sheet) const {
  if (text.empty()) return EmptyCell{};
  if (text.front() == '=') return FormulaCell{parse_formula(text, context(sheet)), EmptyValue{}};
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(v)) return v;
  return std::string(text);
}

std::string Workbook::input_text(const CellAddress& cell) const {
  const CellContent& c = content(cell);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* f = std::get_if<FormulaCell>(&c)) return print_formula(f->ast, context(cell.sheet));
  return {};
}

void Workbook::check_address(const CellAddress& cell) const {
  if (cell.sheet < 0 || cell.sheet >= sheet_count())
    throw Error(ErrorCode::UnknownSheet, "no sheet with index " + std::to_string(cell.sheet));
  if (cell.row < 0 || cell.row > kMaxRow || cell.col < 0 || cell.col > kMaxColumn)
    throw Error(ErrorCode::BadAddress, "address out of bounds");
}

void Workbook::check_ref(const RefSpec& ref) const {
  if (const auto* c = std::get_if<CellAddress>(&ref)) {
    check_address(*c);
  } else if (const auto* r = std::get_if<CellRange>(&ref)) {
    check_address(r->start);
    check_address(r->end);
  } else if (!find_cluster(std::get<ClusterName>(ref).label)) {
    throw Error(ErrorCode::UnknownCluster, "no cluster '" + std::get<ClusterName>(ref).label + "'");
  }
}

RecalcResult Workbook::set_cell(const CellAddress& cell, CellContent content) {
  check_address(cell);
  if (anchors_.contains(cell))
    throw Error(ErrorCode::BadAnchor, a1(cell) + " anchors cluster '" + clusters_.at(anchors_.at(cell)).label + "'");
  if (std::holds_alternative<EmptyCell>(content)) {
    cells_.erase(cell);
  } else {
    if (auto* f = std::get_if<FormulaCell>(&content)) f->cached = EmptyValue{};
    cells_[cell] = std::move(content);
  }
  auto result = recompute({cell}, {cell});
  bump();
  return result;
}

RecalcResult Workbook::set_cell_text(const CellAddress& cell, std::string_view text) {
  return set_cell(cell, parse_input(text, cell.sheet));
}

const CellContent& Workbook::content(const CellAddress& cell) const {
  static const CellContent kEmpty = EmptyCell{};
  auto it = cells_.find(cell);
  return it == cells_.end() ? kEmpty : it->second;
}

Value Workbook::get_value(const CellAddress& cell) const {
  auto it = cells_.find(cell);
  if (it == cells_.end()) {
    if (auto a = anchors_.find(cell); a != anchors_.end()) return "@" + clusters_.at(a->second).label;
    return EmptyValue{};
  }
  const CellContent& c = it->second;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* f = std::get_if<FormulaCell>(&c)) return f->cached;
  return EmptyValue{};
}

std::vector<CellAddress> Workbook::used_cells(int sheet) const {
  std::set<CellAddress> used;
  for (auto it = cells_.lower_bound({sheet, 0, 0}); it != cells_.end() && it->first.sheet == sheet; ++it)
    used.insert(it->first);
  for (const auto& [anchor, id] : anchors_)
    if (anchor.sheet == sheet) used.insert(anchor);
  return {used.begin(), used.end()};
}

bool valid_cluster_label(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

const ClusterCell* Workbook::find_cluster(int id) const {
  auto it = clusters_.find(id);
  return it == clusters_.end() ? nullptr : &it->second;
}

const ClusterCell* Workbook::find_cluster(std::string_view label) const {
  for (const auto& [id, c] : clusters_)
    if (c.label == label) return &c;
  return nullptr;
}

const ClusterCell* Workbook::cluster_at(const CellAddress& anchor) const {
  auto it = anchors_.find(anchor);
  return it == anchors_.end() ? nullptr : &clusters_.at(it->second);
}

std::string Workbook::fresh_cluster_label() const {
  for (int n = 1;; ++n) {
    std::string label = "cluster" + std::to_string(n);
    if (!find_cluster(label)) return label;
  }
}

void Workbook::flatten_into(int id, std::vector<CellAddress>& out) const {
  const ClusterCell* c = find_cluster(id);
  if (!c) return;
  for (const auto& m : c->members) {
    if (const auto* cell = std::get_if<CellAddress>(&m)) {
      out.push_back(*cell);
    } else if (const auto* r = std::get_if<CellRange>(&m)) {
      append_range(*r, out);
    } else if (const auto* sub = find_cluster(std::get<ClusterName>(m).label)) {
      flatten_into(sub->id, out);
    }
  }
}

std::vector<CellAddress> Workbook::flatten_cluster(int id) const {
  std::vector<CellAddress> out;
  flatten_into(id, out);
  return out;
}

const ClusterCell& Workbook::define_cluster(const std::string& label, CellAddress anchor, int level,
                                            std::vector<RefSpec> members) {
  if (!valid_cluster_label(label)) throw Error(ErrorCode::BadAddress, "invalid cluster label '" + label + "'");
  if (find_cluster(label)) throw Error(ErrorCode::DuplicateLabel, "cluster label '" + label + "' is taken");
  if (level < 1) throw Error(ErrorCode::LevelViolation, "cluster level must be at least 1");
  for (const auto& m : members) {
    if (const auto* name = std::get_if<ClusterName>(&m)) {
      if (name->label == label) throw Error(ErrorCode::LevelViolation, "a cluster cannot contain itself");
      const ClusterCell* sub = find_cluster(name->label);
      if (!sub) throw Error(ErrorCode::UnknownCluster, "no cluster '" + name->label + "'");
      if (sub->level >= level)
        throw Error(ErrorCode::LevelViolation, "member '" + sub->label + "' is not on a lower level");
    } else {
      check_ref(m);
    }
  }
  check_address(anchor);
  if (anchors_.contains(anchor)) throw Error(ErrorCode::BadAnchor, a1(anchor) + " already anchors a cluster");
  if (!std::holds_alternative<EmptyCell>(content(anchor)))
    throw Error(ErrorCode::BadAnchor, a1(anchor) + " is occupied");

  const int id = next_cluster_id_++;
  clusters_.emplace(id, ClusterCell{id, label, anchor, level, std::move(members)});
  anchors_.emplace(anchor, id);
  graph_.set_cluster_edges(id, flatten_cluster(id));

  std::set<CellAddress> reresolve = users_of({id});
  for (const auto& d : graph_.dependents(anchor)) reresolve.insert(d);
  std::set<CellAddress> seeds = reresolve;
  seeds.insert(anchor);
  recompute(reresolve, seeds);
  bump();
  return clusters_.at(id);
}

std::set<int> Workbook::with_ancestors(int id) const {
  std::set<int> out{id};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [cid, c] : clusters_) {
      if (out.contains(cid)) continue;
      for (const auto& m : c.members) {
        const auto* name = std::get_if<ClusterName>(&m);
        const ClusterCell* sub = name ? find_cluster(name->label) : nullptr;
        if (sub && out.contains(sub->id)) {
          out.insert(cid);
          grew = true;
          break;
        }
      }
    }
  }
  return out;
}

std::set<CellAddress> Workbook::users_of(const std::set<int>& cluster_ids) const {
  std::set<CellAddress> out;
  for (int id : cluster_ids) {
    const ClusterCell* c = find_cluster(id);
    if (!c) continue;
    if (auto it = label_users_.find(c->label); it != label_users_.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

RecalcResult Workbook::modify_cluster(int id, const std::vector<RefSpec>& add, const std::vector<RefSpec>& remove) {
  const ClusterCell* existing = find_cluster(id);
  if (!existing) throw Error(ErrorCode::UnknownCluster, "no cluster with id " + std::to_string(id));
  std::vector<RefSpec> members = existing->members;

  auto remove_cell = [&](const CellAddress& victim) {
    for (auto it = members.begin(); it != members.end(); ++it) {
      if (!covers(*it, victim)) continue;
      if (const auto* r = std::get_if<CellRange>(&*it)) {
        auto pieces = split_range(*r, victim);
        it = members.erase(it);
        members.insert(it, pieces.begin(), pieces.end());
      } else {
        members.erase(it);
      }
      return;
    }
    throw Error(ErrorCode::NotAMember, a1(victim) + " is not a member of '" + existing->label + "'");
  };

  for (const auto& r : remove) {
    auto exact = std::find(members.begin(), members.end(), r);
    if (exact != members.end() && !std::holds_alternative<CellAddress>(r)) {
      members.erase(exact);
    } else if (const auto* cell = std::get_if<CellAddress>(&r)) {
      remove_cell(*cell);
    } else if (const auto* range = std::get_if<CellRange>(&r)) {
      std::vector<CellAddress> cells;
      append_range(*range, cells);
      for (const auto& c : cells) remove_cell(c);
    } else {
      throw Error(ErrorCode::NotAMember, "@" + std::get<ClusterName>(r).label + " is not a member of '" +
                                             existing->label + "'");
    }
  }
  for (const auto& a : add) {
    if (const auto* name = std::get_if<ClusterName>(&a)) {
      if (name->label == existing->label) throw Error(ErrorCode::LevelViolation, "a cluster cannot contain itself");
      const ClusterCell* sub = find_cluster(name->label);
      if (!sub) throw Error(ErrorCode::UnknownCluster, "no cluster '" + name->label + "'");
      if (sub->level >= existing->level)
        throw Error(ErrorCode::LevelViolation, "member '" + sub->label + "' is not on a lower level");
    } else {
      check_ref(a);
    }
    members.push_back(a);
  }

  clusters_.at(id).members = std::move(members);
  const std::set<int> affected = with_ancestors(id);
  for (int cid : affected) graph_.set_cluster_edges(cid, flatten_cluster(cid));
  const std::set<CellAddress> users = users_of(affected);
  auto result = recompute(users, users);
  bump();
  return result;
}

RecalcResult Workbook::rename_cluster(int id, const std::string& label) {
  ClusterCell* c = clusters_.contains(id) ? &clusters_.at(id) : nullptr;
  if (!c) throw Error(ErrorCode::UnknownCluster, "no cluster with id " + std::to_string(id));
  if (c->label == label) return {};
  if (!valid_cluster_label(label)) throw Error(ErrorCode::BadAddress, "invalid cluster label '" + label + "'");
  if (find_cluster(label)) throw Error(ErrorCode::DuplicateLabel, "cluster label '" + label + "' is taken");

  const std::string old = c->label;
  std::set<CellAddress> users;
  if (auto it = label_users_.find(old); it != label_users_.end()) users = it->second;
  if (auto it = label_users_.find(label); it != label_users_.end()) users.insert(it->second.begin(), it->second.end());
  for (const auto& u : users)
    if (auto* f = std::get_if<FormulaCell>(&cells_.at(u))) rename_in(f->ast, old, label);
  for (auto& [cid, other] : clusters_)
    for (auto& m : other.members)
      if (auto* name = std::get_if<ClusterName>(&m); name && name->label == old) name->label = label;
  c->label = label;

  std::set<CellAddress> seeds = users;
  seeds.insert(c->anchor);
  auto result = recompute(users, seeds);
  bump();
  return result;
}

RecalcResult Workbook::delete_cluster(int id) {
  const ClusterCell* c = find_cluster(id);
  if (!c) throw Error(ErrorCode::UnknownCluster, "no cluster with id " + std::to_string(id));
  for (const auto& [cid, other] : clusters_)
    for (const auto& m : other.members)
      if (const auto* name = std::get_if<ClusterName>(&m); name && name->label == c->label)
        throw Error(ErrorCode::ClusterInUse, "'" + c->label + "' is a member of '" + other.label + "'");

  const std::set<CellAddress> users = users_of({id});
  const CellAddress anchor = c->anchor;
  anchors_.erase(anchor);
  clusters_.erase(id);
  graph_.erase_cluster(id);

  std::set<CellAddress> seeds = users;
  seeds.insert(anchor);
  auto result = recompute(users, seeds);
  bump();
  return result;
}

std::vector<RefSpec> split_range(const CellRange& range, const CellAddress& victim) {
  std::vector<RefSpec> out;
  auto push = [&](CellAddress a, CellAddress b) {
    if (a == b) out.emplace_back(a);
    else out.emplace_back(CellRange::normalized(a, b));
  };
  const int sheet = range.start.sheet;
  if (victim.row > range.start.row)
    push({sheet, range.start.row, range.start.col}, {sheet, victim.row - 1, range.end.col});
  if (victim.col > range.start.col) push({sheet, victim.row, range.start.col}, {sheet, victim.row, victim.col - 1});
  if (victim.col < range.end.col) push({sheet, victim.row, victim.col + 1}, {sheet, victim.row, range.end.col});
  if (victim.row < range.end.row)
    push({sheet, victim.row + 1, range.start.col}, {sheet, range.end.row, range.end.col});
  return out;
}

RecalcResult Workbook::add_source(const CellAddress& func_cell, const std::vector<RefSpec>& refs) {
  auto it = cells_.find(func_cell);
  auto* formula = it == cells_.end() ? nullptr : std::get_if<FormulaCell>(&it->second);
  auto* root = formula ? std::get_if<FuncCall>(&formula->ast.node) : nullptr;
  if (!root) throw Error(ErrorCode::NotAFunction, a1(func_cell) + " does not hold a function");
  if (refs.empty()) return {};
  for (const auto& r : refs) check_ref(r);

  FuncCall edited = *root;
  for (const auto& r : refs) edited.args.push_back(ref(r));
  check_arity(edited);
  *root = std::move(edited);
  auto result = recompute({func_cell}, {func_cell});
  bump();
  return result;
}

RecalcResult Workbook::remove_source(const CellAddress& func_cell, const CellAddress& victim) {
  auto it = cells_.find(func_cell);
  auto* formula = it == cells_.end() ? nullptr : std::get_if<FormulaCell>(&it->second);
  auto* root = formula ? std::get_if<FuncCall>(&formula->ast.node) : nullptr;
  if (!root) throw Error(ErrorCode::NotAFunction, a1(func_cell) + " does not hold a function");

  FuncCall edited = *root;
  auto arg = std::find_if(edited.args.begin(), edited.args.end(), [&](const Expr& e) {
    const auto* r = std::get_if<RefNode>(&e.node);
    return r && covers(r->ref, victim);
  });
  if (arg == edited.args.end())
    throw Error(ErrorCode::NotASource, a1(victim) + " is not a source of " + a1(func_cell));

  const RefSpec covering = std::get<RefNode>(arg->node).ref;
  arg = edited.args.erase(arg);
  if (const auto* r = std::get_if<CellRange>(&covering)) {
    std::vector<Expr> pieces;
    for (auto& p : split_range(*r, victim)) pieces.push_back(ref(std::move(p)));
    edited.args.insert(arg, pieces.begin(), pieces.end());
  }
  check_arity(edited);
  *root = std::move(edited);
  auto result = recompute({func_cell}, {func_cell});
  bump();
  return result;
}

EdgeLevels Workbook::precedents_closure(const CellAddress& cell, int depth) const {
  if (depth < 1) throw std::invalid_argument("precedents_closure depth must be >= 1");
  EdgeLevels levels(static_cast<std::size_t>(depth));
  std::set<CellAddress> frontier{cell};
  for (auto& level : levels) {
    std::set<CellAddress> next;
    for (const auto& from : frontier) {
      if (!std::holds_alternative<FormulaCell>(content(from))) continue;
      for (const auto& to : graph_.precedents(from)) {
        level.emplace(from, to);
        next.insert(to);
      }
    }
    frontier = std::move(next);
  }
  return levels;
}

Expansion Workbook::expand(const RefSpec& ref) const {
  Expansion ex;
  auto sheet_ok = [&](int sheet) { return sheet >= 0 && sheet < sheet_count(); };
  if (const auto* c = std::get_if<CellAddress>(&ref)) {
    if (!sheet_ok(c->sheet)) {
      ex.error = ErrorKind::Ref;
    } else if (const ClusterCell* cl = cluster_at(*c)) {
      ex.cells = flatten_cluster(cl->id);
      ex.aggregate_only = true;
    } else {
      ex.cells.push_back(*c);
    }
  } else if (const auto* r = std::get_if<CellRange>(&ref)) {
    ex.aggregate_only = true;
    if (!sheet_ok(r->start.sheet) || r->size() > kMaxExpansion) ex.error = ErrorKind::Ref;
    else append_range(*r, ex.cells);
  } else {
    ex.aggregate_only = true;
    const ClusterCell* cl = find_cluster(std::get<ClusterName>(ref).label);
    if (!cl) ex.error = ErrorKind::Name;
    else ex.cells = flatten_cluster(cl->id);
  }
  return ex;
}

Value Workbook::evaluate_now(const Expr& ast) const { return evaluate(ast, Env(*this)); }

void Workbook::resolve(const CellAddress& cell) {
  const auto& f = std::get<FormulaCell>(cells_.at(cell));
  std::set<CellAddress> precedents;
  std::set<std::string> labels;
  for (const auto& r : extract_refs(f.ast)) {
    if (const auto* name = std::get_if<ClusterName>(&r)) labels.insert(name->label);
    else if (const auto* c = std::get_if<CellAddress>(&r); c && cluster_at(*c)) labels.insert(cluster_at(*c)->label);
    Expansion ex = expand(r);
    precedents.insert(ex.cells.begin(), ex.cells.end());
  }
  forget(cell);
  graph_.set_precedents(cell, std::move(precedents));
  for (const auto& l : labels) label_users_[l].insert(cell);
  if (!labels.empty()) labels_used_[cell] = std::move(labels);
}

void Workbook::forget(const CellAddress& cell) {
  graph_.erase(cell);
  if (auto it = labels_used_.find(cell); it != labels_used_.end()) {
    for (const auto& l : it->second) {
      auto users = label_users_.find(l);
      if (users == label_users_.end()) continue;
      users->second.erase(cell);
      if (users->second.empty()) label_users_.erase(users);
    }
    labels_used_.erase(it);
  }
}

RecalcResult Workbook::recompute(const std::set<CellAddress>& reresolve, const std::set<CellAddress>& seeds) {
  auto is_formula = [&](const CellAddress& c) {
    auto it = cells_.find(c);
    return it != cells_.end() && std::holds_alternative<FormulaCell>(it->second);
  };
  for (const auto& c : reresolve) {
    if (is_formula(c)) {
      resolve(c);
    } else {
      forget(c);
      tainted_.erase(c);
    }
  }

  // Everything downstream of the seeds.
  std::set<CellAddress> dirty;
  std::deque<CellAddress> queue;
  auto visit = [&](const CellAddress& c) {
    if (is_formula(c) && dirty.insert(c).second) queue.push_back(c);
  };
  for (const auto& c : seeds) visit(c);
  for (const auto& c : reresolve) visit(c);
  for (const auto& c : seeds)
    for (const auto& d : graph_.dependents(c)) visit(d);
  while (!queue.empty()) {
    CellAddress c = queue.front();
    queue.pop_front();
    for (const auto& d : graph_.dependents(c)) visit(d);
  }

  // Kahn over the dirty subgraph; smallest address first for determinism.
  std::map<CellAddress, std::size_t> indegree;
  std::set<CellAddress> ready;
  for (const auto& c : dirty) {
    std::size_t n = 0;
    for (const auto& p : graph_.precedents(c)) n += dirty.contains(p) ? 1 : 0;
    indegree[c] = n;
    if (n == 0) ready.insert(c);
  }

  RecalcResult result;
  auto store = [&](const CellAddress& c, Value v) {
    auto& f = std::get<FormulaCell>(cells_.at(c));
    result.evaluated.push_back(c);
    if (!(f.cached == v)) result.changed.emplace_back(c, v);
    f.cached = std::move(v);
  };

  Env env(*this);
  while (!ready.empty()) {
    CellAddress c = *ready.begin();
    ready.erase(ready.begin());
    dirty.erase(c);
    const auto& precs = graph_.precedents(c);
    const bool downstream = std::any_of(precs.begin(), precs.end(), [&](const auto& p) { return tainted_.contains(p); });
    if (downstream) {
      tainted_.insert(c);
      store(c, ErrorValue{ErrorKind::Cycle});
    } else {
      tainted_.erase(c);
      store(c, evaluate(std::get<FormulaCell>(cells_.at(c)).ast, env));
    }
    for (const auto& d : graph_.dependents(c)) {
      auto it = indegree.find(d);
      if (it != indegree.end() && dirty.contains(d) && --it->second == 0) ready.insert(d);
    }
  }
  // Whatever Kahn could not order lies on a cycle or below one.
  for (const auto& c : dirty) {
    tainted_.insert(c);
    store(c, ErrorValue{ErrorKind::Cycle});
  }
  return result;
}

void Workbook::recalculate_all() {
  tainted_.clear();
  std::set<CellAddress> all;
  for (const auto& [cell, c] : cells_)
    if (std::holds_alternative<FormulaCell>(c)) all.insert(cell);
  for (const auto& [id, c] : clusters_) graph_.set_cluster_edges(id, flatten_cluster(id));
  recompute(all, all);
  refit_charts();
}

const ChartSpec& Workbook::add_chart(ChartSpec chart) {
  check_address(chart.anchor);
  check_ref(chart.series);
  if (chart.width_cells < 1 || chart.height_cells < 1)
    throw Error(ErrorCode::BadAddress, "chart size must be at least 1x1 cells");
  if (chart.id <= 0) chart.id = next_chart_id_;
  if (find_chart(chart.id)) throw Error(ErrorCode::DuplicateLabel, "chart id " + std::to_string(chart.id) + " is taken");
  next_chart_id_ = std::max(next_chart_id_, chart.id + 1);
  charts_.push_back(std::move(chart));
  bump();
  return charts_.back();
}

void Workbook::set_chart_trend(int chart_id, std::optional<TrendKind> kind) {
  auto it = std::find_if(charts_.begin(), charts_.end(), [&](const ChartSpec& c) { return c.id == chart_id; });
  if (it == charts_.end()) throw Error(ErrorCode::UnknownChart, "no chart with id " + std::to_string(chart_id));
  if (kind) it->trend = fit_trend(*kind, series_values(*this, it->series));
  else it->trend.reset();
  it->trend_request = kind;
  bump();
}

const ChartSpec* Workbook::find_chart(int id) const {
  auto it = std::find_if(charts_.begin(), charts_.end(), [&](const ChartSpec& c) { return c.id == id; });
  return it == charts_.end() ? nullptr : &*it;
}

void Workbook::refit_charts() {
  for (auto& chart : charts_) {
    if (!chart.trend_request) continue;
    try {
      chart.trend = fit_trend(*chart.trend_request, series_values(*this, chart.series));
    } catch (const Error&) {
      chart.trend.reset();
    }
  }
}

void Workbook::bump() {
  refit_charts();
  ++revision_;
}

}  // namespace gridlayers
