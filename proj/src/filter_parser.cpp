#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "evd/filter.hpp"

namespace evd {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::logical_or: return "||";
    case Op::logical_and: return "&&";
    case Op::eq: return "==";
    case Op::ne: return "!=";
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::gt: return ">";
    case Op::ge: return ">=";
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::logical_not: return "!";
    case Op::negate: return "-";
  }
  return "?";
}

std::string_view to_string(Func fn) {
  switch (fn) {
    case Func::abs: return "abs";
    case Func::sqrt: return "sqrt";
    case Func::min: return "min";
    case Func::max: return "max";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::hypot: return "hypot";
  }
  return "?";
}

std::size_t arity(Func fn) {
  switch (fn) {
    case Func::min:
    case Func::max:
    case Func::hypot: return 2;
    default: return 1;
  }
}

Expr Expr::number(double v, std::size_t pos) {
  Expr e;
  e.kind = ExprKind::number;
  e.value = v;
  e.pos = pos;
  return e;
}

Expr Expr::ident(std::string name, std::size_t pos) {
  Expr e;
  e.kind = ExprKind::ident;
  e.name = std::move(name);
  e.pos = pos;
  return e;
}

Expr Expr::unary(Op op, Expr child, std::size_t pos) {
  Expr e;
  e.kind = ExprKind::unary;
  e.op = op;
  e.args.push_back(std::move(child));
  e.pos = pos;
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs, std::size_t pos) {
  Expr e;
  e.kind = ExprKind::binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.pos = pos;
  return e;
}

Expr Expr::call(Func fn, std::vector<Expr> args, std::size_t pos) {
  Expr e;
  e.kind = ExprKind::call;
  e.func = fn;
  e.args = std::move(args);
  e.pos = pos;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::number: return a.value == b.value;
    case ExprKind::ident: return a.name == b.name;
    case ExprKind::unary:
    case ExprKind::binary: return a.op == b.op && a.args == b.args;
    case ExprKind::call: return a.func == b.func && a.args == b.args;
  }
  return false;
}

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 7> kFunctions{{{"abs", Func::abs},
                                              {"sqrt", Func::sqrt},
                                              {"min", Func::min},
                                              {"max", Func::max},
                                              {"sin", Func::sin},
                                              {"cos", Func::cos},
                                              {"hypot", Func::hypot}}};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::end) throw DslError(0, "token stream must end with an end token");
  }

  Expr parse_all() {
    Expr e = parse_or();
    if (peek().kind != TokenKind::end)
      throw DslError(peek().pos, "unexpected " + describe(peek()) + ", expected an operator or end of expression");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[index_]; }
  const Token& advance() { return tokens_[index_ < tokens_.size() - 1 ? index_++ : index_]; }

  bool peek_op(std::string_view text) const { return peek().kind == TokenKind::op && peek().text == text; }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::end) return "end of expression";
    return "'" + t.text + "'";
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (peek_op("||")) {
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(Op::logical_or, std::move(lhs), parse_and(), pos);
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_equality();
    while (peek_op("&&")) {
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(Op::logical_and, std::move(lhs), parse_equality(), pos);
    }
    return lhs;
  }

  std::optional<Op> equality_op() const {
    if (peek_op("==")) return Op::eq;
    if (peek_op("!=")) return Op::ne;
    return std::nullopt;
  }

  std::optional<Op> relation_op() const {
    if (peek_op("<")) return Op::lt;
    if (peek_op("<=")) return Op::le;
    if (peek_op(">")) return Op::gt;
    if (peek_op(">=")) return Op::ge;
    return std::nullopt;
  }

  Expr parse_equality() {
    Expr lhs = parse_relation();
    if (auto op = equality_op()) {
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(*op, std::move(lhs), parse_relation(), pos);
      if (equality_op())
        throw ChainedComparisonError(peek().pos,
                                     "chained comparison: '" + peek().text + "' cannot follow another comparison; "
                                     "combine comparisons with && or add parentheses");
    }
    return lhs;
  }

  Expr parse_relation() {
    Expr lhs = parse_sum();
    if (auto op = relation_op()) {
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(*op, std::move(lhs), parse_sum(), pos);
      if (relation_op())
        throw ChainedComparisonError(peek().pos,
                                     "chained comparison: '" + peek().text + "' cannot follow another comparison; "
                                     "combine comparisons with && (e.g. a < b && b < c)");
    }
    return lhs;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (peek_op("+") || peek_op("-")) {
      const Op op = peek().text == "+" ? Op::add : Op::sub;
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(op, std::move(lhs), parse_product(), pos);
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (peek_op("*") || peek_op("/")) {
      const Op op = peek().text == "*" ? Op::mul : Op::div;
      const std::size_t pos = advance().pos;
      lhs = Expr::binary(op, std::move(lhs), parse_unary(), pos);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek_op("!") || peek_op("-")) {
      const Op op = peek().text == "!" ? Op::logical_not : Op::negate;
      const std::size_t pos = advance().pos;
      return Expr::unary(op, parse_unary(), pos);
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::number: {
        advance();
        double v = 0.0;
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc{} || !std::isfinite(v)) throw DslError(t.pos, "number '" + t.text + "' out of range");
        return Expr::number(v, t.pos);
      }
      case TokenKind::ident: {
        advance();
        if (peek().kind != TokenKind::lparen) return Expr::ident(t.text, t.pos);
        return parse_call(t);
      }
      case TokenKind::lparen: {
        advance();
        Expr inner = parse_or();
        expect(TokenKind::rparen, "')'");
        return inner;
      }
      default: throw DslError(t.pos, "expected operand, found " + describe(t));
    }
  }

  Expr parse_call(const Token& name) {
    const auto* fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                  [&](const FuncName& f) { return f.name == name.text; });
    if (fn == kFunctions.end())
      throw DslError(name.pos, "unknown function '" + name.text + "' (available: abs, sqrt, min, max, sin, cos, hypot)");
    advance();  // '('
    std::vector<Expr> args;
    if (peek().kind != TokenKind::rparen) {
      args.push_back(parse_or());
      while (peek().kind == TokenKind::comma) {
        advance();
        args.push_back(parse_or());
      }
    }
    expect(TokenKind::rparen, "',' or ')'");
    if (args.size() != arity(fn->func))
      throw DslError(name.pos, "function '" + name.text + "' takes " + std::to_string(arity(fn->func)) +
                                   " argument(s), got " + std::to_string(args.size()));
    return Expr::call(fn->func, std::move(args), name.pos);
  }

  void expect(TokenKind kind, std::string_view what) {
    if (peek().kind != kind) throw DslError(peek().pos, "expected " + std::string(what) + ", found " + describe(peek()));
    advance();
  }

  const std::vector<Token>& tokens_;
  std::size_t index_ = 0;
};

// Binding strength; larger binds tighter.
int precedence(const Expr& e) {
  if (e.kind == ExprKind::unary) return 7;
  if (e.kind != ExprKind::binary) return 8;
  switch (e.op) {
    case Op::logical_or: return 1;
    case Op::logical_and: return 2;
    case Op::eq:
    case Op::ne: return 3;
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge: return 4;
    case Op::add:
    case Op::sub: return 5;
    case Op::mul:
    case Op::div: return 6;
    default: return 8;
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print_full_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::number: out += format_number(e.value); break;
    case ExprKind::ident: out += e.name; break;
    case ExprKind::unary:
      out += '(';
      out += to_string(e.op);
      print_full_into(e.args[0], out);
      out += ')';
      break;
    case ExprKind::binary:
      out += '(';
      print_full_into(e.args[0], out);
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      print_full_into(e.args[1], out);
      out += ')';
      break;
    case ExprKind::call:
      out += to_string(e.func);
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_full_into(e.args[i], out);
      }
      out += ')';
      break;
  }
}

void print_minimal_into(const Expr& e, std::string& out) {
  auto child = [&out](const Expr& c, bool parens) {
    if (parens) out += '(';
    print_minimal_into(c, out);
    if (parens) out += ')';
  };
  switch (e.kind) {
    case ExprKind::number: out += format_number(e.value); break;
    case ExprKind::ident: out += e.name; break;
    case ExprKind::unary:
      out += to_string(e.op);
      child(e.args[0], precedence(e.args[0]) < 7);
      break;
    case ExprKind::binary: {
      const int p = precedence(e);
      const bool non_assoc = p == 3 || p == 4;
      const int lp = precedence(e.args[0]);
      child(e.args[0], lp < p || (non_assoc && lp == p));
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      child(e.args[1], precedence(e.args[1]) <= p);
      break;
    }
    case ExprKind::call:
      out += to_string(e.func);
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_minimal_into(e.args[i], out);
      }
      out += ')';
      break;
  }
}

void print_sexpr_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::number: out += format_number(e.value); break;
    case ExprKind::ident: out += e.name; break;
    case ExprKind::unary:
    case ExprKind::binary:
    case ExprKind::call:
      out += '(';
      out += e.kind == ExprKind::call ? to_string(e.func) : to_string(e.op);
      for (const Expr& a : e.args) {
        out += ' ';
        print_sexpr_into(a, out);
      }
      out += ')';
      break;
  }
}

}  // namespace

Expr parse(const std::vector<Token>& tokens) { return Parser(tokens).parse_all(); }

Expr parse(std::string_view source) { return parse(tokenize(source)); }

std::string print_full(const Expr& e) {
  std::string out;
  print_full_into(e, out);
  return out;
}

std::string print_minimal(const Expr& e) {
  std::string out;
  print_minimal_into(e, out);
  return out;
}

std::string print_sexpr(const Expr& e) {
  std::string out;
  print_sexpr_into(e, out);
  return out;
}

}  // namespace evd
