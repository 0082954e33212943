#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridlayers/address.hpp"

namespace gridlayers {

/// Owning pointer with value semantics: copies are deep, equality compares
/// the pointees. Lets the expression tree stay a plain regular type.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class BinaryOp { Add, Sub, Mul, Div };

struct Expr;

struct NumberLit {
  double value = 0.0;
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};
struct StringLit {
  std::string value;
  friend bool operator==(const StringLit&, const StringLit&) = default;
};
struct RefNode {
  RefSpec ref;
  friend bool operator==(const RefNode&, const RefNode&) = default;
};
struct FuncCall {
  std::string name;  // canonical uppercase
  std::vector<Expr> args;
  friend bool operator==(const FuncCall&, const FuncCall&) = default;
};
struct BinOp {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  friend bool operator==(const BinOp&, const BinOp&) = default;
};
struct Neg {
  Box<Expr> operand;
  friend bool operator==(const Neg&, const Neg&) = default;
};

struct Expr {
  std::variant<NumberLit, StringLit, RefNode, FuncCall, BinOp, Neg> node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

using FormulaAst = Expr;

Expr number(double v);
Expr text_literal(std::string s);
Expr ref(RefSpec r);
Expr call(std::string name, std::vector<Expr> args);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
Expr negate(Expr operand);

/// Supported function vocabulary, in menu order.
const std::vector<std::string>& supported_functions();
bool is_supported_function(std::string_view upper_name);
/// Inclusive argument-count bounds; max is nullopt when unbounded.
std::pair<std::size_t, std::optional<std::size_t>> function_arity(std::string_view upper_name);

struct FormulaContext {
  int sheet = 0;  // sheet the formula lives on; unprefixed refs resolve here
  SheetNames names = SheetNames::defaults();
};

/// Parses "=expr". Throws SyntaxError, Error(Name) for unknown functions and
/// Error(BadArity) for argument-count violations.
Expr parse_formula(std::string_view text, const FormulaContext& ctx = {});

/// Canonical text with a leading '=' and only the parentheses precedence
/// requires.
std::string print_formula(const Expr& ast, const FormulaContext& ctx = {});

/// Every reference in left-to-right source order, duplicates included.
std::vector<RefSpec> extract_refs(const Expr& ast);

/// Maximum number of function calls on any root-to-leaf path.
int nesting_depth(const Expr& ast);

/// The function calls along the deepest call path, outermost first. Ties go
/// to the leftmost argument.
std::vector<const FuncCall*> deepest_call_path(const Expr& ast);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace gridlayers
