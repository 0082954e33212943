#include "gridlayers/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "gridlayers/error.hpp"

namespace gridlayers {

Expr number(double v) { return Expr{NumberLit{v}}; }
Expr text_literal(std::string s) { return Expr{StringLit{std::move(s)}}; }
Expr ref(RefSpec r) { return Expr{RefNode{std::move(r)}}; }
Expr call(std::string name, std::vector<Expr> args) { return Expr{FuncCall{std::move(name), std::move(args)}}; }
Expr binary(BinaryOp op, Expr lhs, Expr rhs) { return Expr{BinOp{op, std::move(lhs), std::move(rhs)}}; }
Expr negate(Expr operand) { return Expr{Neg{std::move(operand)}}; }

const std::vector<std::string>& supported_functions() {
  static const std::vector<std::string> kNames = {"SUM", "AVERAGE", "MIN", "MAX", "COUNT", "ROUND", "ABS"};
  return kNames;
}

bool is_supported_function(std::string_view upper_name) {
  const auto& names = supported_functions();
  return std::find(names.begin(), names.end(), upper_name) != names.end();
}

std::pair<std::size_t, std::optional<std::size_t>> function_arity(std::string_view upper_name) {
  if (upper_name == "ROUND") return {1, 2};
  if (upper_name == "ABS") return {1, 1};
  return {1, std::nullopt};
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "0";
  return std::string(buf.data(), ptr);
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const FormulaContext& ctx) : text_(text), ctx_(ctx) {}

  Expr parse() {
    skip_space();
    if (!eat('=')) fail("'='");
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("end of formula");
    return e;
  }

 private:
  static constexpr int kMaxDepth = 200;

  [[noreturn]] void fail(std::string expected) const { throw SyntaxError(pos_, std::move(expected)); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("'") + c + "'");
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail("shallower nesting");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  Expr expr() {
    DepthGuard guard(*this);
    Expr lhs = term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      Expr rhs = term();
      lhs = binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, std::move(lhs), std::move(rhs));
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      Expr rhs = factor();
      lhs = binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, std::move(lhs), std::move(rhs));
    }
  }

  Expr factor() {
    if (eat('-')) return negate(atom());
    return atom();
  }

  std::string_view ident() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) return {};
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Expr atom() {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (c == '"') return string_literal();
    if (c == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      if (pos_ == start) fail("cluster label");
      return ref(ClusterName{std::string(text_.substr(start, pos_ - start))});
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (is_ident_start(c)) return ident_atom();
    fail("number, string, reference, function call or '('");
  }

  Expr number_literal() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
        fail("exponent digits");
      }
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("finite number");
    }
    return number(v);
  }

  Expr string_literal() {
    ++pos_;  // opening quote
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("closing '\"'");
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          out.push_back('"');
          ++pos_;
          continue;
        }
        return text_literal(std::move(out));
      }
      out.push_back(c);
    }
  }

  CellAddress cell_ref(int sheet) {
    std::size_t start = pos_;
    auto word = ident();
    auto addr = parse_a1(word, sheet);
    if (!addr) {
      pos_ = start;
      fail("cell reference");
    }
    return *addr;
  }

  Expr ident_atom() {
    std::size_t start = pos_;
    auto word = ident();
    if (pos_ < text_.size() && text_[pos_] == '!') {
      ++pos_;
      auto sheet = ctx_.names.lookup(word);
      if (!sheet) {
        pos_ = start;
        fail("known sheet name");
      }
      return range_tail(cell_ref(*sheet));
    }
    if (peek() == '(') {
      ++pos_;
      std::string name = upper(word);
      if (!is_supported_function(name)) throw Error(ErrorCode::Name, "unknown function '" + std::string(word) + "'");
      std::vector<Expr> args;
      if (!eat(')')) {
        do {
          args.push_back(expr());
        } while (eat(','));
        expect(')');
      }
      auto [lo, hi] = function_arity(name);
      if (args.size() < lo || (hi && args.size() > *hi))
        throw Error(ErrorCode::BadArity, name + " does not take " + std::to_string(args.size()) + " argument(s)");
      return call(std::move(name), std::move(args));
    }
    pos_ = start;
    return range_tail(cell_ref(ctx_.sheet));
  }

  Expr range_tail(CellAddress first) {
    if (!eat(':')) return ref(first);
    skip_space();
    std::size_t start = pos_;
    auto word = ident();
    int sheet = first.sheet;
    if (pos_ < text_.size() && text_[pos_] == '!') {
      ++pos_;
      auto named = ctx_.names.lookup(word);
      if (!named || *named != first.sheet) {
        pos_ = start;
        fail("range end on the same sheet");
      }
      sheet = *named;
    } else {
      pos_ = start;
    }
    return ref(CellRange::normalized(first, cell_ref(sheet)));
  }

  std::string_view text_;
  const FormulaContext& ctx_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<BinOp>(&e.node))
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  if (std::holds_alternative<Neg>(e.node)) return 3;
  return 4;
}

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

void print_into(const Expr& e, const FormulaContext& ctx, std::string& out);

void print_wrapped(const Expr& e, bool wrap, const FormulaContext& ctx, std::string& out) {
  if (wrap) out.push_back('(');
  print_into(e, ctx, out);
  if (wrap) out.push_back(')');
}

void print_into(const Expr& e, const FormulaContext& ctx, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          out += format_number(n.value);
        } else if constexpr (std::is_same_v<T, StringLit>) {
          out.push_back('"');
          for (char c : n.value) {
            if (c == '"') out.push_back('"');
            out.push_back(c);
          }
          out.push_back('"');
        } else if constexpr (std::is_same_v<T, RefNode>) {
          out += ref_text(n.ref, ctx.sheet, ctx.names);
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          out += n.name;
          out.push_back('(');
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out.push_back(',');
            print_into(n.args[i], ctx, out);
          }
          out.push_back(')');
        } else if constexpr (std::is_same_v<T, BinOp>) {
          const int p = precedence(e);
          print_wrapped(*n.lhs, precedence(*n.lhs) < p, ctx, out);
          out.push_back(op_char(n.op));
          print_wrapped(*n.rhs, precedence(*n.rhs) <= p, ctx, out);
        } else {
          out.push_back('-');
          print_wrapped(*n.operand, precedence(*n.operand) < 4, ctx, out);
        }
      },
      e.node);
}

void collect_refs(const Expr& e, std::vector<RefSpec>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RefNode>) {
          out.push_back(n.ref);
        } else if constexpr (std::is_same_v<T, FuncCall>) {
          for (const auto& a : n.args) collect_refs(a, out);
        } else if constexpr (std::is_same_v<T, BinOp>) {
          collect_refs(*n.lhs, out);
          collect_refs(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Neg>) {
          collect_refs(*n.operand, out);
        }
      },
      e.node);
}

}  // namespace

Expr parse_formula(std::string_view text, const FormulaContext& ctx) { return Parser(text, ctx).parse(); }

std::string print_formula(const Expr& ast, const FormulaContext& ctx) {
  std::string out = "=";
  print_into(ast, ctx, out);
  return out;
}

std::vector<RefSpec> extract_refs(const Expr& ast) {
  std::vector<RefSpec> out;
  collect_refs(ast, out);
  return out;
}

int nesting_depth(const Expr& ast) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FuncCall>) {
          int deepest = 0;
          for (const auto& a : n.args) deepest = std::max(deepest, nesting_depth(a));
          return deepest + 1;
        } else if constexpr (std::is_same_v<T, BinOp>) {
          return std::max(nesting_depth(*n.lhs), nesting_depth(*n.rhs));
        } else if constexpr (std::is_same_v<T, Neg>) {
          return nesting_depth(*n.operand);
        } else {
          return 0;
        }
      },
      ast.node);
}

std::vector<const FuncCall*> deepest_call_path(const Expr& ast) {
  std::vector<const FuncCall*> path;
  const Expr* cur = &ast;
  for (;;) {
    const int target = nesting_depth(*cur);
    if (target == 0) return path;
    if (const auto* f = std::get_if<FuncCall>(&cur->node)) {
      path.push_back(f);
      const Expr* next = nullptr;
      for (const auto& a : f->args) {
        if (nesting_depth(a) == target - 1) {
          next = &a;
          break;
        }
      }
      if (next == nullptr) return path;
      cur = next;
    } else if (const auto* b = std::get_if<BinOp>(&cur->node)) {
      cur = nesting_depth(*b->lhs) == target ? &*b->lhs : &*b->rhs;
    } else {
      cur = &*std::get<Neg>(cur->node).operand;
    }
  }
}

}  // namespace gridlayers
