#include "evd/helix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evd/error.hpp"

namespace evd {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

bool is_straight(const HelixTrack& t) { return t.kappa < kKappaEps; }

double turning_rate(const HelixTrack& t) { return t.kappa * std::cos(t.lambda); }

double radial_residual(const HelixTrack& t, double s, double radius) {
  const Vec3 p = point_at(t, s);
  return std::hypot(p.x, p.y) - radius;
}

// One or two Newton steps on hypot(x, y) - R, kept only if they help. Guards
// against the small loss of precision in the closed-form azimuths.
double polish(const HelixTrack& t, double s, double radius) {
  for (int iter = 0; iter < 2; ++iter) {
    const Vec3 p = point_at(t, s);
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) break;
    const double f = r - radius;
    if (f == 0.0) break;
    const Vec3 d = direction_at(t, s);
    const double df = (p.x * d.x + p.y * d.y) / r;
    if (std::fabs(df) < 1e-6) break;
    const double next = s - f / df;
    if (!(std::fabs(radial_residual(t, next, radius)) < std::fabs(f))) break;
    s = next;
  }
  return s;
}

std::optional<double> straight_crossing(const HelixTrack& t, double radius, double s_from) {
  const double c = std::cos(t.lambda);
  const double dx = -t.h * c * std::sin(t.phi0);
  const double dy = t.h * c * std::cos(t.phi0);
  const double a = dx * dx + dy * dy;
  const double b = 2 * (t.origin.x * dx + t.origin.y * dy);
  const double cc = t.origin.x * t.origin.x + t.origin.y * t.origin.y - radius * radius;
  double disc = b * b - 4 * a * cc;
  if (disc < 0) {
    if (disc < -1e-12 * (b * b + std::fabs(4 * a * cc))) return std::nullopt;
    disc = 0;
  }
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = q != 0.0 ? cc / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  for (double s : {r1, r2})
    if (s >= s_from && s <= t.s_max) return s;
  return std::nullopt;
}

}  // namespace

Vec3 point_at(const HelixTrack& t, double s) {
  const double cl = std::cos(t.lambda);
  const double z = t.origin.z + s * std::sin(t.lambda);
  if (is_straight(t)) {
    return {t.origin.x - t.h * s * cl * std::sin(t.phi0), t.origin.y + t.h * s * cl * std::cos(t.phi0), z};
  }
  const double phase = t.phi0 + t.h * s * t.kappa * cl;
  return {t.origin.x + (std::cos(phase) - std::cos(t.phi0)) / t.kappa,
          t.origin.y + (std::sin(phase) - std::sin(t.phi0)) / t.kappa, z};
}

Vec3 direction_at(const HelixTrack& t, double s) {
  const double cl = std::cos(t.lambda);
  const double phase = is_straight(t) ? t.phi0 : t.phi0 + t.h * s * t.kappa * cl;
  return {-t.h * cl * std::sin(phase), t.h * cl * std::cos(phase), std::sin(t.lambda)};
}

std::size_t helix_segment_count(const HelixTrack& t, double eps) {
  if (!(eps > 0)) throw Error("tessellation tolerance must be > 0");
  if (is_straight(t)) return 1;
  const double max_step = std::min(std::numbers::pi / 2, 2 * std::acos(std::max(0.0, 1 - eps * t.kappa)));
  const double total_turn = turning_rate(t) * (t.s_max - t.s_min);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(total_turn / max_step)));
}

Polyline3 tessellate_helix(const HelixTrack& t, double eps) {
  const std::size_t n = helix_segment_count(t, eps);
  Polyline3 out;
  out.points.reserve(n + 1);
  const double span = t.s_max - t.s_min;
  for (std::size_t i = 0; i < n; ++i)
    out.points.push_back(point_at(t, t.s_min + span * static_cast<double>(i) / static_cast<double>(n)));
  out.points.push_back(point_at(t, t.s_max));
  return out;
}

std::optional<double> next_cylinder_crossing(const HelixTrack& t, double radius, double s_from) {
  if (!(radius > 0) || s_from > t.s_max) return std::nullopt;
  if (is_straight(t)) return straight_crossing(t, radius, s_from);

  const double rho = 1.0 / t.kappa;
  const double cx = t.origin.x - std::cos(t.phi0) * rho;
  const double cy = t.origin.y - std::sin(t.phi0) * rho;
  const double d = std::hypot(cx, cy);
  const double rate = turning_rate(t);
  const double period = kTwoPi / rate;

  std::vector<double> azimuths;
  if (d == 0.0) {
    // Concentric: either the whole circle lies on the cylinder or none of it.
    if (std::fabs(rho - radius) > 1e-9) return std::nullopt;
    return s_from;
  }
  // Distance from the circle centre, along the centre->origin axis, to the
  // chord joining the two intersection points.
  const double along = (d * d + rho * rho - radius * radius) / (2 * d);
  double h2 = (rho - along) * (rho + along);
  if (h2 < 0) {
    if (h2 < -1e-12 * rho * rho) return std::nullopt;
    h2 = 0;
  }
  const double axis = std::atan2(-cy, -cx);
  const double half_angle = std::atan2(std::sqrt(h2), along);
  azimuths = {axis - half_angle, axis + half_angle};

  std::optional<double> best;
  for (double alpha : azimuths) {
    // Phase advance needed to reach alpha, in the direction of motion.
    double delta = std::fmod(t.h * (alpha - t.phi0), kTwoPi);
    if (delta < 0) delta += kTwoPi;
    double s = delta / rate;
    if (s < s_from) s += std::ceil((s_from - s) / period) * period;
    s = polish(t, s, radius);
    if (s < s_from) s = s_from;
    if (s <= t.s_max && (!best || s < *best)) best = s;
  }
  return best;
}

std::optional<double> first_cylinder_crossing(const HelixTrack& t, double radius) {
  return next_cylinder_crossing(t, radius, 0.0);
}

std::optional<double> plane_z_crossing(const HelixTrack& t, double z) {
  const double sl = std::sin(t.lambda);
  if (std::fabs(sl) > 1e-12) {
    const double s = (z - t.origin.z) / sl;
    if (s >= t.s_min && s <= t.s_max) return s;
    return std::nullopt;
  }
  if (z == t.origin.z) return t.s_min;
  return std::nullopt;
}

}  // namespace evd
