#include "gridlayers/evaluate.hpp"

#include <cmath>

namespace gridlayers {
namespace {

Value scalar(const Expr& e, const EvalEnvironment& env);

Value number_or_error(double v) {
  if (!std::isfinite(v)) return ErrorValue{ErrorKind::Value};
  return v;
}

// Numeric coercion for arithmetic operands: text is a #VALUE!.
std::optional<Value> as_operand(const Value& v, double& out) {
  if (const auto* d = std::get_if<double>(&v)) {
    out = *d;
    return std::nullopt;
  }
  if (is_error(v)) return v;
  if (is_empty(v)) {
    out = 0.0;
    return std::nullopt;
  }
  return ErrorValue{ErrorKind::Value};
}

Value arithmetic(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return number_or_error(a + b);
    case BinaryOp::Sub: return number_or_error(a - b);
    case BinaryOp::Mul: return number_or_error(a * b);
    case BinaryOp::Div:
      if (b == 0.0) return ErrorValue{ErrorKind::Div0};
      return number_or_error(a / b);
  }
  return ErrorValue{ErrorKind::Value};
}

Value ref_scalar(const RefSpec& r, const EvalEnvironment& env) {
  Expansion ex = env.expand(r);
  if (ex.error) return ErrorValue{*ex.error};
  Value single;
  for (const auto& c : ex.cells) single = env.read(c);
  if (ex.aggregate_only || ex.cells.size() != 1) return ErrorValue{ErrorKind::Value};
  if (is_empty(single)) return 0.0;
  return single;
}

// Collects the numeric inputs of an aggregate. Every covered cell is read so
// that evaluation touches exactly the expanded references.
struct AggregateInputs {
  std::vector<double> numbers;
  std::optional<ErrorKind> error;
  bool text_argument = false;

  void fail(ErrorKind k) {
    if (!error) error = k;
  }
};

AggregateInputs gather(const FuncCall& f, const EvalEnvironment& env) {
  AggregateInputs in;
  for (const auto& arg : f.args) {
    if (const auto* r = std::get_if<RefNode>(&arg.node)) {
      Expansion ex = env.expand(r->ref);
      if (ex.error) in.fail(*ex.error);
      for (const auto& c : ex.cells) {
        Value v = env.read(c);
        if (const auto* d = std::get_if<double>(&v)) in.numbers.push_back(*d);
        else if (const auto* e = std::get_if<ErrorValue>(&v)) in.fail(e->kind);
      }
      continue;
    }
    Value v = scalar(arg, env);
    if (const auto* d = std::get_if<double>(&v)) in.numbers.push_back(*d);
    else if (const auto* e = std::get_if<ErrorValue>(&v)) in.fail(e->kind);
    else if (std::holds_alternative<std::string>(v)) in.text_argument = true;
  }
  return in;
}

Value round_half_away(double x, double digits) {
  const double d = std::trunc(digits);
  if (std::abs(d) > 300) return ErrorValue{ErrorKind::Value};
  if (d >= 0) {
    const double scale = std::pow(10.0, d);
    return number_or_error(std::round(x * scale) / scale);
  }
  const double scale = std::pow(10.0, -d);
  return number_or_error(std::round(x / scale) * scale);
}

Value call_value(const FuncCall& f, const EvalEnvironment& env) {
  if (f.name == "ROUND" || f.name == "ABS") {
    std::vector<double> xs;
    std::optional<Value> failure;
    for (const auto& arg : f.args) {
      double x = 0;
      Value v = scalar(arg, env);
      if (auto bad = as_operand(v, x); bad && !failure) failure = *bad;
      xs.push_back(x);
    }
    if (failure) return *failure;
    if (f.name == "ABS") return std::abs(xs.at(0));
    return round_half_away(xs.at(0), xs.size() > 1 ? xs[1] : 0.0);
  }

  AggregateInputs in = gather(f, env);
  if (in.error) return ErrorValue{*in.error};
  if (f.name == "COUNT") return static_cast<double>(in.numbers.size());
  if (in.text_argument) return ErrorValue{ErrorKind::Value};
  if (f.name == "SUM" || f.name == "AVERAGE") {
    double sum = 0;
    for (double x : in.numbers) sum += x;
    if (f.name == "SUM") return number_or_error(sum);
    if (in.numbers.empty()) return ErrorValue{ErrorKind::Div0};
    return number_or_error(sum / static_cast<double>(in.numbers.size()));
  }
  if (in.numbers.empty()) return 0.0;
  double best = in.numbers.front();
  for (double x : in.numbers) best = (f.name == "MIN") ? std::min(best, x) : std::max(best, x);
  return best;
}

Value scalar(const Expr& e, const EvalEnvironment& env) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, RefNode>) {
          return ref_scalar(n.ref, env);
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          return call_value(n, env);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          Value l = scalar(*n.lhs, env);
          Value r = scalar(*n.rhs, env);
          double a = 0, b = 0;
          if (auto bad = as_operand(l, a)) return *bad;
          if (auto bad = as_operand(r, b)) return *bad;
          return arithmetic(n.op, a, b);
        } else {
          Value v = scalar(*n.operand, env);
          double a = 0;
          if (auto bad = as_operand(v, a)) return *bad;
          return a == 0.0 ? 0.0 : -a;
        }
      },
      e.node);
}

}  // namespace

Value evaluate(const Expr& ast, const EvalEnvironment& env) { return scalar(ast, env); }

}  // namespace gridlayers
