#include "evd/filter.hpp"

#include <algorithm>
#include <cmath>

namespace evd {

std::string_view to_string(ValueType type) {
  switch (type) {
    case ValueType::numeric: return "numeric";
    case ValueType::boolean: return "boolean";
    case ValueType::unknown: break;
  }
  return "unknown";
}

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::float_: return "float";
    case ParamType::int_: return "int";
    case ParamType::boolean: return "bool";
  }
  return "?";
}

ParamType parse_param_type(std::string_view name) {
  if (name == "float") return ParamType::float_;
  if (name == "int") return ParamType::int_;
  if (name == "bool") return ParamType::boolean;
  throw Error("unknown parameter type '" + std::string(name) + "' (expected float, int or bool)");
}

std::string check_param_value(const ParamSpec& spec, const ParamValue& value) {
  if (spec.type == ParamType::boolean) {
    if (!std::holds_alternative<bool>(value)) return "expected a boolean";
    return {};
  }
  if (!std::holds_alternative<double>(value)) return "expected a number";
  const double v = std::get<double>(value);
  if (!std::isfinite(v)) return "value must be finite";
  if (spec.type == ParamType::int_ && v != std::trunc(v)) return "expected an integer";
  if (spec.min && v < *spec.min) return "value is below the minimum " + std::to_string(*spec.min);
  if (spec.max && v > *spec.max) return "value is above the maximum " + std::to_string(*spec.max);
  return {};
}

// ---------------------------------------------------------------------------
// Type checking

namespace {

struct Checker {
  const AttributeSchema& schema;
  const std::vector<ParamSpec>& params;
  const std::set<std::string>& extras;
  std::set<std::string> used_attributes;

  [[noreturn]] void unknown_identifier(const Expr& e) const {
    std::set<std::string> names;
    for (const auto& entry : schema.entries) names.insert(entry.name);
    for (const auto& p : params) names.insert(p.name);
    names.insert(extras.begin(), extras.end());
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw DslError(e.pos, "unknown identifier '" + e.name + "'; available: " + list);
  }

  void require(const Expr& operand, ValueType want, const Expr& parent) const {
    if (operand.type == want) return;
    std::string msg = std::string(to_string(parent.op)) + " requires " +
                      (want == ValueType::boolean ? "boolean operands" : "numeric operands") + ", got " +
                      std::string(to_string(operand.type));
    if (want == ValueType::numeric && operand.kind == ExprKind::unary && operand.op == Op::logical_not)
      msg += "; '!' binds tighter than '" + std::string(to_string(parent.op)) +
             "', write !(a " + std::string(to_string(parent.op)) + " b) to negate the comparison";
    throw DslError(parent.pos, msg);
  }

  void check(Expr& e) {
    switch (e.kind) {
      case ExprKind::number: e.type = ValueType::numeric; return;
      case ExprKind::ident: {
        if (const auto* entry = schema.find(e.name)) {
          e.type = entry->type == AttributeType::boolean ? ValueType::boolean : ValueType::numeric;
          used_attributes.insert(e.name);
          return;
        }
        const auto p = std::find_if(params.begin(), params.end(), [&](const ParamSpec& s) { return s.name == e.name; });
        if (p != params.end()) {
          e.is_param = true;
          e.type = p->type == ParamType::boolean ? ValueType::boolean : ValueType::numeric;
          return;
        }
        if (extras.contains(e.name)) {
          e.type = ValueType::numeric;
          used_attributes.insert(e.name);
          return;
        }
        unknown_identifier(e);
      }
      case ExprKind::unary: {
        check(e.args[0]);
        const ValueType want = e.op == Op::logical_not ? ValueType::boolean : ValueType::numeric;
        if (e.args[0].type != want) {
          std::string msg = "'" + std::string(to_string(e.op)) + "' requires a " + std::string(to_string(want)) +
                            " operand, got " + std::string(to_string(e.args[0].type));
          if (e.op == Op::logical_not)
            msg += "; '!' binds tighter than comparisons, add parentheses to negate one, e.g. !(a == b)";
          throw DslError(e.pos, msg);
        }
        e.type = want;
        return;
      }
      case ExprKind::binary: {
        check(e.args[0]);
        check(e.args[1]);
        switch (e.op) {
          case Op::logical_or:
          case Op::logical_and:
            require(e.args[0], ValueType::boolean, e);
            require(e.args[1], ValueType::boolean, e);
            e.type = ValueType::boolean;
            return;
          case Op::eq:
          case Op::ne:
          case Op::lt:
          case Op::le:
          case Op::gt:
          case Op::ge:
            require(e.args[0], ValueType::numeric, e);
            require(e.args[1], ValueType::numeric, e);
            e.type = ValueType::boolean;
            return;
          default:
            require(e.args[0], ValueType::numeric, e);
            require(e.args[1], ValueType::numeric, e);
            e.type = ValueType::numeric;
            return;
        }
      }
      case ExprKind::call:
        for (Expr& a : e.args) {
          check(a);
          if (a.type != ValueType::numeric)
            throw DslError(a.pos, std::string(to_string(e.func)) + "() requires numeric arguments, got " +
                                      std::string(to_string(a.type)));
        }
        e.type = ValueType::numeric;
        return;
    }
  }
};

}  // namespace

TypedExpr typecheck_any(const Expr& e, const AttributeSchema& schema, const std::vector<ParamSpec>& params,
                        const std::set<std::string>& extra_names) {
  Checker checker{schema, params, extra_names, {}};
  TypedExpr typed;
  typed.root_ = e;
  checker.check(typed.root_);
  typed.params_ = params;
  typed.attributes_.assign(checker.used_attributes.begin(), checker.used_attributes.end());
  return typed;
}

TypedExpr typecheck(const Expr& e, const AttributeSchema& schema, const std::vector<ParamSpec>& params,
                    const std::set<std::string>& extra_names) {
  TypedExpr typed = typecheck_any(e, schema, params, extra_names);
  if (typed.root().type != ValueType::boolean)
    throw DslError(typed.root().pos, "filter expression must be boolean, got " +
                                         std::string(to_string(typed.root().type)));
  return typed;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Interpreter {
  const AttributeMap& attrs;
  const ParamValues& values;
  const std::vector<ParamSpec>& params;

  ParamValue param(const std::string& name) const {
    if (const auto it = values.find(name); it != values.end()) return it->second;
    for (const auto& p : params)
      if (p.name == name) return p.default_value;
    return 0.0;
  }

  static double as_number(const ParamValue& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    return std::get<double>(v);
  }

  static bool as_bool(const ParamValue& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    return std::get<double>(v) != 0.0;
  }

  double number(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::number: return e.value;
      case ExprKind::ident: return e.is_param ? as_number(param(e.name)) : attrs.at(e.name);
      case ExprKind::unary: return -number(e.args[0]);
      case ExprKind::binary: {
        const double a = number(e.args[0]);
        const double b = number(e.args[1]);
        switch (e.op) {
          case Op::add: return a + b;
          case Op::sub: return a - b;
          case Op::mul: return a * b;
          case Op::div: return a / b;
          default: return 0.0;
        }
      }
      case ExprKind::call: {
        const double a = number(e.args[0]);
        switch (e.func) {
          case Func::abs: return std::fabs(a);
          case Func::sqrt: return std::sqrt(a);
          case Func::sin: return std::sin(a);
          case Func::cos: return std::cos(a);
          case Func::min: return std::fmin(a, number(e.args[1]));
          case Func::max: return std::fmax(a, number(e.args[1]));
          case Func::hypot: return std::hypot(a, number(e.args[1]));
        }
      }
    }
    return 0.0;
  }

  bool boolean(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::ident: return e.is_param ? as_bool(param(e.name)) : attrs.at(e.name) != 0.0;
      case ExprKind::unary: return !boolean(e.args[0]);
      case ExprKind::binary:
        switch (e.op) {
          case Op::logical_or: return boolean(e.args[0]) || boolean(e.args[1]);
          case Op::logical_and: return boolean(e.args[0]) && boolean(e.args[1]);
          case Op::eq: return number(e.args[0]) == number(e.args[1]);
          case Op::ne: return number(e.args[0]) != number(e.args[1]);
          case Op::lt: return number(e.args[0]) < number(e.args[1]);
          case Op::le: return number(e.args[0]) <= number(e.args[1]);
          case Op::gt: return number(e.args[0]) > number(e.args[1]);
          case Op::ge: return number(e.args[0]) >= number(e.args[1]);
          default: return false;
        }
      default: return false;
    }
  }
};

}  // namespace

Evaluation evaluate_value(const TypedExpr& e, const AttributeMap& attrs, const ParamValues& params) {
  for (const auto& name : e.attributes())
    if (!attrs.contains(name)) return {false, true};
  const Interpreter interp{attrs, params, e.params()};
  if (e.root().type == ValueType::boolean) return {interp.boolean(e.root()), false};
  return {interp.number(e.root()), false};
}

bool evaluate(const TypedExpr& e, const AttributeMap& attrs, const ParamValues& params) {
  const Evaluation r = evaluate_value(e, attrs, params);
  if (r.missing_attribute) return false;
  const auto* b = std::get_if<bool>(&r.value);
  return b != nullptr && *b;
}

// ---------------------------------------------------------------------------
// Filters

std::string_view to_string(AppliesTo a) {
  switch (a) {
    case AppliesTo::track: return "track";
    case AppliesTo::hit: return "hit";
    case AppliesTo::segment: return "segment";
    case AppliesTo::all: return "all";
  }
  return "?";
}

AppliesTo parse_applies_to(std::string_view name) {
  if (name == "all") return AppliesTo::all;
  switch (parse_object_kind(name)) {
    case ObjectKind::track: return AppliesTo::track;
    case ObjectKind::hit: return AppliesTo::hit;
    case ObjectKind::segment: return AppliesTo::segment;
  }
  return AppliesTo::all;
}

bool applies(AppliesTo a, ObjectKind kind) {
  switch (a) {
    case AppliesTo::all: return true;
    case AppliesTo::track: return kind == ObjectKind::track;
    case AppliesTo::hit: return kind == ObjectKind::hit;
    case AppliesTo::segment: return kind == ObjectKind::segment;
  }
  return false;
}

namespace {

constexpr ObjectKind kAllKinds[] = {ObjectKind::track, ObjectKind::hit, ObjectKind::segment};

ObjectKind single_kind(AppliesTo a) {
  switch (a) {
    case AppliesTo::hit: return ObjectKind::hit;
    case AppliesTo::segment: return ObjectKind::segment;
    default: return ObjectKind::track;
  }
}

}  // namespace

AttributeSchema filter_schema(AppliesTo applies_to) {
  if (applies_to != AppliesTo::all) return attribute_schema(single_kind(applies_to));
  AttributeSchema common = attribute_schema(ObjectKind::track);
  for (ObjectKind k : kAllKinds) {
    const AttributeSchema other = attribute_schema(k);
    std::erase_if(common.entries, [&](const AttributeEntry& e) { return !other.contains(e.name); });
  }
  return common;
}

std::set<std::string> filter_extra_names(AppliesTo applies_to, const ExtraNames& extras) {
  std::set<std::string> out;
  for (ObjectKind k : kAllKinds) {
    if (!applies(applies_to, k)) continue;
    if (const auto it = extras.find(k); it != extras.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

TypedExpr compile_filter(const FilterDef& def, const ExtraNames& extras) {
  const std::string where = "filter '" + def.name + "': ";
  if (def.name.empty()) throw Error("filter name must not be empty");
  std::set<std::string> seen;
  for (const auto& p : def.params) {
    if (p.name.empty()) throw Error(where + "parameter name must not be empty");
    if (!seen.insert(p.name).second) throw Error(where + "duplicate parameter '" + p.name + "'");
    for (ObjectKind k : kAllKinds) {
      if (applies(def.applies_to, k) && attribute_schema(k).contains(p.name))
        throw Error(where + "parameter '" + p.name + "' shadows the " + std::string(to_string(k)) + " attribute of the same name");
    }
    if (p.min && p.max && *p.min > *p.max) throw Error(where + "parameter '" + p.name + "' has min > max");
    if (auto msg = check_param_value(p, p.default_value); !msg.empty())
      throw Error(where + "default of parameter '" + p.name + "': " + msg);
  }
  return typecheck(parse(def.expression), filter_schema(def.applies_to), def.params,
                   filter_extra_names(def.applies_to, extras));
}

ParamValues default_values(const FilterDef& def) {
  ParamValues out;
  for (const auto& p : def.params) out[p.name] = p.default_value;
  return out;
}

std::vector<FieldError> check_param_values(const FilterDef& def, const ParamValues& values) {
  std::vector<FieldError> errors;
  for (const auto& [name, value] : values) {
    const auto p = std::find_if(def.params.begin(), def.params.end(), [&](const ParamSpec& s) { return s.name == name; });
    if (p == def.params.end()) {
      errors.push_back({name, "unknown parameter"});
      continue;
    }
    if (auto msg = check_param_value(*p, value); !msg.empty()) errors.push_back({name, msg});
  }
  return errors;
}

std::string_view to_string(WidgetHint hint) {
  switch (hint) {
    case WidgetHint::checkbox: return "checkbox";
    case WidgetHint::slider: return "slider";
    case WidgetHint::numeric: return "numeric";
  }
  return "?";
}

FilterDescriptor describe_filter(const FilterDef& def) {
  FilterDescriptor d{def.name, def.applies_to, def.expression, {}, def.style_override};
  for (const auto& p : def.params) {
    WidgetHint hint = WidgetHint::numeric;
    if (p.type == ParamType::boolean)
      hint = WidgetHint::checkbox;
    else if (p.min && p.max)
      hint = WidgetHint::slider;
    d.params.push_back({p, hint});
  }
  return d;
}

ChainDecision apply_chain(const FilterChain& chain, ObjectKind kind, const AttributeMap& attrs) {
  ChainDecision decision;
  for (const auto& link : chain.links) {
    if (!link.enabled || !applies(link.def.applies_to, kind)) continue;
    if (!link.compiled) throw Error("filter '" + link.def.name + "' has not been type checked");
    const Evaluation r = evaluate_value(*link.compiled, attrs, link.values);
    if (r.missing_attribute) {
      ++decision.missing_attributes;
      decision.accepted = false;
      continue;
    }
    if (!std::get<bool>(r.value)) {
      decision.accepted = false;
      continue;
    }
    if (link.def.style_override) decision.style = link.def.style_override;
  }
  if (!decision.accepted) decision.style.reset();
  return decision;
}

}  // namespace evd
