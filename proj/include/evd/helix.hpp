#pragma once

#include <optional>
#include <vector>

#include "evd/model.hpp"
#include "evd/vec.hpp"

namespace evd {

struct Polyline3 {
  std::vector<Vec3> points;

  friend bool operator==(const Polyline3&, const Polyline3&) = default;
};

/// Position after path length `s` (cm) along the helix.
Vec3 point_at(const HelixTrack& track, double s);

/// Unit tangent at path length `s`.
Vec3 direction_at(const HelixTrack& track, double s);

/// Number of chords used by tessellate_helix for a sagitta tolerance `eps`.
std::size_t helix_segment_count(const HelixTrack& track, double eps);

/// Samples the helix at uniform path length over [s_min, s_max] so that no
/// curve point is farther than `eps` from its chord. Throws evd::Error when
/// eps <= 0.
Polyline3 tessellate_helix(const HelixTrack& track, double eps);

/// Smallest s in [s_from, s_max] where hypot(x(s), y(s)) == radius.
std::optional<double> next_cylinder_crossing(const HelixTrack& track, double radius, double s_from);

/// Smallest s in [0, s_max] where the helix meets the cylinder of `radius`
/// around the z axis.
std::optional<double> first_cylinder_crossing(const HelixTrack& track, double radius);

/// Path length where the helix meets the plane z = `z`, restricted to
/// [s_min, s_max]. A track lying in the plane yields s_min.
std::optional<double> plane_z_crossing(const HelixTrack& track, double z);

}  // namespace evd
