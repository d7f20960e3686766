#pragma once

// User event filters: a small boolean expression language over object
// attributes, with typed parameters that also describe the filter's GUI.
//
//   expr     := or
//   or       := and ('||' and)*
//   and      := equality ('&&' equality)*
//   equality := relation (('==' | '!=') relation)?        -- no chaining
//   relation := sum (('<' | '<=' | '>' | '>=') sum)?      -- no chaining
//   sum      := product (('+' | '-') product)*
//   product  := unary (('*' | '/') unary)*
//   unary    := ('!' | '-') unary | primary
//   primary  := number | ident | ident '(' args ')' | '(' expr ')'

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evd/error.hpp"
#include "evd/model.hpp"
#include "evd/vec.hpp"

namespace evd {

/// Lexing, parsing or type error at a 0-based offset into the source.
class DslError : public Error {
 public:
  DslError(std::size_t pos, const std::string& message)
      : Error("at offset " + std::to_string(pos) + ": " + message), pos_(pos), message_(message) {}

  [[nodiscard]] std::size_t pos() const { return pos_; }
  [[nodiscard]] const std::string& message() const { return message_; }

 private:
  std::size_t pos_;
  std::string message_;
};

class ChainedComparisonError : public DslError {
 public:
  using DslError::DslError;
};

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind { number, ident, op, lparen, rparen, comma, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  std::size_t pos = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// Syntax tree

enum class ExprKind { number, ident, unary, binary, call };

enum class Op { logical_or, logical_and, eq, ne, lt, le, gt, ge, add, sub, mul, div, logical_not, negate };

enum class Func { abs, sqrt, min, max, sin, cos, hypot };

enum class ValueType { unknown, numeric, boolean };

std::string_view to_string(Op op);
std::string_view to_string(Func fn);
std::string_view to_string(ValueType type);
std::size_t arity(Func fn);

struct Expr {
  ExprKind kind = ExprKind::number;
  double value = 0.0;  // number
  std::string name;    // ident
  Op op = Op::add;     // unary / binary
  Func func = Func::abs;
  std::vector<Expr> args;  // operands or call arguments
  std::size_t pos = 0;

  // Filled in by typecheck.
  ValueType type = ValueType::unknown;
  bool is_param = false;

  static Expr number(double v, std::size_t pos = 0);
  static Expr ident(std::string name, std::size_t pos = 0);
  static Expr unary(Op op, Expr child, std::size_t pos = 0);
  static Expr binary(Op op, Expr lhs, Expr rhs, std::size_t pos = 0);
  static Expr call(Func fn, std::vector<Expr> args, std::size_t pos = 0);

  /// Structural equality: ignores offsets and type annotations. Numbers
  /// compare by value.
  friend bool operator==(const Expr& a, const Expr& b);
};

Expr parse(const std::vector<Token>& tokens);
Expr parse(std::string_view source);

/// Every binary and unary node wrapped in parentheses.
std::string print_full(const Expr& e);
/// Only the parentheses the precedence table requires.
std::string print_minimal(const Expr& e);
/// Prefix form, e.g. (&& (> pt 0.5) (>= nhits 10)).
std::string print_sexpr(const Expr& e);

// ---------------------------------------------------------------------------
// Parameters

enum class ParamType { float_, int_, boolean };

std::string_view to_string(ParamType type);
ParamType parse_param_type(std::string_view name);

using ParamValue = std::variant<double, bool>;
using ParamValues = std::map<std::string, ParamValue>;

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::float_;
  ParamValue default_value = 0.0;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> step;
  std::string label;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct FieldError {
  std::string field;
  std::string message;

  friend bool operator==(const FieldError&, const FieldError&) = default;
};

/// Checks a value against its declared type and bounds; empty on success.
std::string check_param_value(const ParamSpec& spec, const ParamValue& value);

// ---------------------------------------------------------------------------
// Type checking and evaluation

/// Extra attribute names available per object kind (from `extra` maps).
using ExtraNames = std::map<ObjectKind, std::set<std::string>>;

/// A syntax tree that passed typecheck; only typecheck creates one.
class TypedExpr {
 public:
  [[nodiscard]] const Expr& root() const { return root_; }
  [[nodiscard]] const std::vector<ParamSpec>& params() const { return params_; }
  /// Attribute names the expression reads, sorted.
  [[nodiscard]] const std::vector<std::string>& attributes() const { return attributes_; }

 private:
  friend TypedExpr typecheck_any(const Expr&, const AttributeSchema&, const std::vector<ParamSpec>&,
                                 const std::set<std::string>&);
  TypedExpr() = default;

  Expr root_;
  std::vector<ParamSpec> params_;
  std::vector<std::string> attributes_;
};

/// Resolves identifiers and annotates types; the root may be of either type.
TypedExpr typecheck_any(const Expr& e, const AttributeSchema& schema, const std::vector<ParamSpec>& params,
                        const std::set<std::string>& extra_names = {});

/// As typecheck_any, and additionally requires a boolean root.
TypedExpr typecheck(const Expr& e, const AttributeSchema& schema, const std::vector<ParamSpec>& params,
                    const std::set<std::string>& extra_names = {});

struct Evaluation {
  ParamValue value;
  bool missing_attribute = false;  // value is meaningless when set
};

/// Evaluates with IEEE double semantics. Parameters absent from `params`
/// take their declared defaults.
Evaluation evaluate_value(const TypedExpr& e, const AttributeMap& attrs, const ParamValues& params);

/// Boolean result of a boolean-typed expression; false when an attribute is
/// missing.
bool evaluate(const TypedExpr& e, const AttributeMap& attrs, const ParamValues& params);

// ---------------------------------------------------------------------------
// Filters

enum class AppliesTo { track, hit, segment, all };

std::string_view to_string(AppliesTo a);
AppliesTo parse_applies_to(std::string_view name);
bool applies(AppliesTo a, ObjectKind kind);

struct StyleOverride {
  Rgba color;
  double line_width = 1.0;

  friend bool operator==(const StyleOverride&, const StyleOverride&) = default;
};

struct FilterDef {
  std::string name;
  AppliesTo applies_to = AppliesTo::track;
  std::string expression;
  std::vector<ParamSpec> params;
  std::optional<StyleOverride> style_override;

  friend bool operator==(const FilterDef&, const FilterDef&) = default;
};

/// Attribute schema an expression of the given target is checked against.
/// For `all` that is the attributes every kind has in common.
AttributeSchema filter_schema(AppliesTo applies_to);
std::set<std::string> filter_extra_names(AppliesTo applies_to, const ExtraNames& extras);

/// Validates the definition and type checks its expression. Throws DslError
/// for expression problems and evd::Error for definition problems.
TypedExpr compile_filter(const FilterDef& def, const ExtraNames& extras = {});

ParamValues default_values(const FilterDef& def);

/// Field errors for a proposed set of values. Unknown names are errors.
std::vector<FieldError> check_param_values(const FilterDef& def, const ParamValues& values);

enum class WidgetHint { checkbox, slider, numeric };
std::string_view to_string(WidgetHint hint);

struct ParamDescriptor {
  ParamSpec spec;
  WidgetHint widget = WidgetHint::numeric;

  friend bool operator==(const ParamDescriptor&, const ParamDescriptor&) = default;
};

struct FilterDescriptor {
  std::string name;
  AppliesTo applies_to = AppliesTo::track;
  std::string expression;
  std::vector<ParamDescriptor> params;
  std::optional<StyleOverride> style_override;

  friend bool operator==(const FilterDescriptor&, const FilterDescriptor&) = default;
};

FilterDescriptor describe_filter(const FilterDef& def);

struct ChainLink {
  FilterDef def;
  std::optional<TypedExpr> compiled;  // must be set before the chain is applied
  ParamValues values;
  bool enabled = true;
};

struct FilterChain {
  std::vector<ChainLink> links;
};

struct ChainDecision {
  bool accepted = true;
  std::optional<StyleOverride> style;
  std::size_t missing_attributes = 0;
};

/// Conjunction of every enabled filter that applies to `kind`. Throws
/// evd::Error if an applicable link was never compiled.
ChainDecision apply_chain(const FilterChain& chain, ObjectKind kind, const AttributeMap& attrs);

}  // namespace evd
