#pragma once

// Reference implementations used only by tests. Each one is written in a
// different form from the library code it checks.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "evd/filter.hpp"
#include "evd/model.hpp"

namespace oracle {

using evd::Vec3;

/// Helix position by the chord construction: the transverse displacement is
/// a chord of length 2 sin(a/2)/kappa at the mid-turn heading, a = kappa s cos(lambda).
inline Vec3 helix_point(const evd::HelixTrack& t, double s) {
  const double cl = std::cos(t.lambda);
  const double heading = t.phi0 + t.h * std::numbers::pi / 2;
  const double turn = t.kappa * cl * s;
  const double chord = t.kappa == 0 ? cl * s : 2.0 * std::sin(turn / 2) / t.kappa;
  const double mid = heading + t.h * turn / 2;
  return {t.origin.x + chord * std::cos(mid), t.origin.y + chord * std::sin(mid), t.origin.z + s * std::sin(t.lambda)};
}

/// First root of hypot(x, y) - R on [s_from, s_to] by dense sign-change scan
/// followed by bisection. Tangential touches without a sign change are not
/// found, which is the documented blind spot of the oracle.
inline std::optional<double> bisect_crossing(const evd::HelixTrack& t, double R, double s_from, double s_to,
                                             int samples = 20000) {
  auto f = [&](double s) {
    const Vec3 p = helix_point(t, s);
    return std::hypot(p.x, p.y) - R;
  };
  double a = s_from, fa = f(a);
  if (fa == 0) return a;
  for (int i = 1; i <= samples; ++i) {
    const double b = s_from + (s_to - s_from) * i / samples;
    const double fb = f(b);
    if (fb == 0) return b;
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      for (int k = 0; k < 200 && hi - lo > 1e-13; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

/// Distance from `p` to the drawn part of the helix: a dense scan followed
/// by golden-section refinement around the best sample.
inline double distance_to_helix(const evd::HelixTrack& t, const Vec3& p, int samples = 20000) {
  auto dist = [&](double s) {
    const Vec3 q = helix_point(t, s);
    return std::hypot(q.x - p.x, q.y - p.y, q.z - p.z);
  };
  const double ds = (t.s_max - t.s_min) / samples;
  double best_s = t.s_min, best = dist(t.s_min);
  for (int i = 1; i <= samples; ++i) {
    const double s = t.s_min + ds * i;
    const double d = dist(s);
    if (d < best) best = d, best_s = s;
  }
  double lo = std::max(t.s_min, best_s - ds), hi = std::min(t.s_max, best_s + ds);
  for (int k = 0; k < 200; ++k) {
    const double a = lo + (hi - lo) * 0.381966, b = lo + (hi - lo) * 0.618034;
    if (dist(a) < dist(b))
      hi = b;
    else
      lo = a;
  }
  return std::min(best, dist(0.5 * (lo + hi)));
}

/// SplitMix64 reference values, computed independently.
inline constexpr std::uint64_t kSplitMixSeed0First = 0xE220A8397B1DCDAFULL;
inline constexpr std::uint64_t kSplitMixSeed0Second = 0x6E789E6AA1B965F4ULL;

/// Random valid helix track, drawn with the standard library engine.
inline evd::HelixTrack random_track(std::mt19937_64& rng, double kappa_max = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  evd::HelixTrack t;
  t.origin = {-5 + 10 * u(rng), -5 + 10 * u(rng), -20 + 40 * u(rng)};
  t.kappa = kappa_max * u(rng);
  t.lambda = -1.4 + 2.8 * u(rng);
  t.phi0 = -std::numbers::pi + 2 * std::numbers::pi * u(rng);
  t.h = u(rng) < 0.5 ? -1 : 1;
  t.s_min = 0;
  t.s_max = 10 + 400 * u(rng);
  t.charge = -t.h;
  return t;
}

// ---------------------------------------------------------------------------
// Filter expressions

using Value = std::variant<double, bool>;

/// Direct recursive interpretation of an untyped tree; identifiers resolve
/// through `env`.
inline Value interpret(const evd::Expr& e, const std::map<std::string, Value>& env) {
  using evd::ExprKind;
  using evd::Op;
  auto num = [&](const evd::Expr& x) { return std::get<double>(interpret(x, env)); };
  auto boolean = [&](const evd::Expr& x) { return std::get<bool>(interpret(x, env)); };
  switch (e.kind) {
    case ExprKind::number: return e.value;
    case ExprKind::ident: return env.at(e.name);
    case ExprKind::unary:
      if (e.op == Op::logical_not) return !boolean(e.args[0]);
      return -num(e.args[0]);
    case ExprKind::binary: {
      const auto& l = e.args[0];
      const auto& r = e.args[1];
      switch (e.op) {
        case Op::logical_or: {
          const bool a = boolean(l), b = boolean(r);
          return a || b;
        }
        case Op::logical_and: {
          const bool a = boolean(l), b = boolean(r);
          return a && b;
        }
        case Op::eq: return num(l) == num(r);
        case Op::ne: return num(l) != num(r);
        case Op::lt: return num(l) < num(r);
        case Op::le: return num(l) <= num(r);
        case Op::gt: return num(l) > num(r);
        case Op::ge: return num(l) >= num(r);
        case Op::add: return num(l) + num(r);
        case Op::sub: return num(l) - num(r);
        case Op::mul: return num(l) * num(r);
        case Op::div: return num(l) / num(r);
        default: break;
      }
      break;
    }
    case ExprKind::call: {
      using evd::Func;
      switch (e.func) {
        case Func::abs: return std::fabs(num(e.args[0]));
        case Func::sqrt: return std::sqrt(num(e.args[0]));
        case Func::sin: return std::sin(num(e.args[0]));
        case Func::cos: return std::cos(num(e.args[0]));
        case Func::min: return std::fmin(num(e.args[0]), num(e.args[1]));
        case Func::max: return std::fmax(num(e.args[0]), num(e.args[1]));
        case Func::hypot: return std::hypot(num(e.args[0]), num(e.args[1]));
      }
      break;
    }
  }
  throw std::logic_error("bad expression");
}

inline bool same_bits(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<bool>(&a)) return *x == std::get<bool>(b);
  const double x = std::get<double>(a), y = std::get<double>(b);
  return std::memcmp(&x, &y, sizeof x) == 0;
}

/// Random well-typed expressions over the track attributes pt, eta, nhits,
/// the float parameter `cut` and the boolean parameter `flag`.
class ExprGen {
 public:
  explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

  evd::Expr boolean(int depth) {
    using evd::Expr;
    using evd::Op;
    const int choice = depth <= 0 ? pick(2) : pick(6);
    switch (choice) {
      case 0: return Expr::ident("flag");
      case 1: return Expr::binary(comparison(), numeric(0), numeric(0));
      case 2: return Expr::binary(comparison(), numeric(depth - 1), numeric(depth - 1));
      case 3: return Expr::binary(Op::logical_and, boolean(depth - 1), boolean(depth - 1));
      case 4: return Expr::binary(Op::logical_or, boolean(depth - 1), boolean(depth - 1));
      default: return Expr::unary(Op::logical_not, boolean(depth - 1));
    }
  }

  evd::Expr numeric(int depth) {
    using evd::Expr;
    using evd::Func;
    using evd::Op;
    const int choice = depth <= 0 ? pick(2) : pick(6);
    static const char* names[] = {"pt", "eta", "nhits", "cut"};
    static const Op arith[] = {Op::add, Op::sub, Op::mul, Op::div};
    static const Func unary_fn[] = {Func::abs, Func::sqrt, Func::sin, Func::cos};
    static const Func binary_fn[] = {Func::min, Func::max, Func::hypot};
    switch (choice) {
      case 0: return Expr::number(literal());
      case 1: return Expr::ident(names[pick(4)]);
      case 2:
      case 3: return Expr::binary(arith[pick(4)], numeric(depth - 1), numeric(depth - 1));
      case 4: return Expr::unary(Op::negate, numeric(depth - 1));
      default:
        if (pick(2) == 0) return Expr::call(unary_fn[pick(4)], {numeric(depth - 1)});
        return Expr::call(binary_fn[pick(3)], {numeric(depth - 1), numeric(depth - 1)});
    }
  }

  double literal() {
    static const double fixed[] = {0.0, 1.0, 0.5, 0.1, 2.0, 10.0, 1e-3, 3.0e8, 1e300, 5e-324, 123.456};
    if (pick(2) == 0) return fixed[pick(11)];
    std::uniform_real_distribution<double> u(0.0, 100.0);
    return u(rng_);
  }

  /// Binding for one evaluation: attributes in `attrs`, params in `params`.
  void binding(evd::AttributeMap& attrs, evd::ParamValues& params, std::map<std::string, Value>& env) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    auto value = [&] {
      switch (pick(8)) {
        case 0: return 0.0;
        case 1: return -0.0;
        case 2: return std::numeric_limits<double>::infinity();
        default: return u(rng_);
      }
    };
    attrs = {{"pt", value()}, {"eta", value()}, {"nhits", std::floor(10 * std::fabs(u(rng_)))}};
    const double cut = value();
    const bool flag = pick(2) == 1;
    params = {{"cut", cut}, {"flag", flag}};
    env.clear();
    for (const auto& [k, v] : attrs) env[k] = v;
    env["cut"] = cut;
    env["flag"] = flag;
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  evd::Op comparison() {
    static const evd::Op ops[] = {evd::Op::eq, evd::Op::ne, evd::Op::lt, evd::Op::le, evd::Op::gt, evd::Op::ge};
    return ops[pick(6)];
  }

  std::mt19937_64 rng_;
};

inline std::vector<evd::ParamSpec> gen_params() {
  evd::ParamSpec cut{"cut", evd::ParamType::float_, 0.5, std::nullopt, std::nullopt, std::nullopt, "cut"};
  evd::ParamSpec flag{"flag", evd::ParamType::boolean, true, std::nullopt, std::nullopt, std::nullopt, "flag"};
  return {cut, flag};
}

}  // namespace oracle
