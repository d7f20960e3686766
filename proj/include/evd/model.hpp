#pragma once

// Event and detector data model: hits ("dots"), segments, helical tracks,
// the detector volume tree and the attribute schemas that bind filters to
// these objects.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evd/vec.hpp"

namespace evd {

using AttributeMap = std::map<std::string, double>;

struct Hit {
  std::int64_t id = 0;
  Vec3 position;
  int detector = 0;
  double de = 0.0;
  std::int64_t track_id = -1;
  AttributeMap extra;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct Segment {
  std::int64_t id = 0;
  std::vector<Vec3> points;
  int detector = 0;
  AttributeMap extra;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Charged track in a uniform solenoidal field along +z.
///
/// `kappa` is the transverse curvature (1/radius, cm^-1), `lambda` the dip
/// angle, `phi0` the azimuth of the origin as seen from the circle centre,
/// and `h` the sense of rotation (+1 counter-clockwise seen from +z).
struct HelixTrack {
  std::int64_t id = 0;
  Vec3 origin;
  double kappa = 0.0;
  double lambda = 0.0;
  double phi0 = 0.0;
  int h = 1;
  double s_min = 0.0;
  double s_max = 1.0;
  int charge = 0;
  std::int64_t nhits = 0;
  double chi2 = 0.0;
  AttributeMap extra;

  friend bool operator==(const HelixTrack&, const HelixTrack&) = default;
};

struct Event {
  std::int64_t index = 0;
  std::vector<Hit> hits;
  std::vector<Segment> segments;
  std::vector<HelixTrack> tracks;
  std::map<std::string, std::string> meta;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventSet {
  double b_field = 0.5;
  std::vector<Event> events;

  friend bool operator==(const EventSet&, const EventSet&) = default;
};

// Shapes use half-length conventions.
struct Tube {
  double rmin = 0.0;
  double rmax = 1.0;
  double dz = 1.0;
  friend bool operator==(const Tube&, const Tube&) = default;
};

struct Box {
  double dx = 1.0;
  double dy = 1.0;
  double dz = 1.0;
  friend bool operator==(const Box&, const Box&) = default;
};

struct Cone {
  double rmin1 = 0.0;
  double rmax1 = 1.0;
  double rmin2 = 0.0;
  double rmax2 = 1.0;
  double dz = 1.0;
  friend bool operator==(const Cone&, const Cone&) = default;
};

using Shape = std::variant<Tube, Box, Cone>;

/// Returns an empty string when the shape's dimensions are valid, otherwise a
/// description of the first violated constraint.
std::string shape_violation(const Shape& shape);

std::string_view shape_type_name(const Shape& shape);

struct Volume {
  std::string name;
  std::optional<Shape> shape;  // none: pure assembly node
  Vec3 translation;
  Mat3 rotation = Mat3::identity();
  Rgba color{0.7, 0.7, 0.7, 1.0};
  bool visible = true;
  std::vector<Volume> children;

  friend bool operator==(const Volume&, const Volume&) = default;
};

struct DetectorModel {
  Volume root = [] {
    Volume v;
    v.name = "detector";
    return v;
  }();

  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

/// Returns the volume at an exact slash-joined path, or nullptr.
const Volume* volume_lookup(const DetectorModel& detector, std::string_view path);

/// Visits every volume depth-first (pre-order) with its full path.
template <typename Fn>
void for_each_volume(const Volume& volume, const std::string& path, Fn&& fn) {
  fn(volume, path);
  for (const Volume& child : volume.children) for_each_volume(child, path + "/" + child.name, fn);
}

template <typename Fn>
void for_each_volume(const DetectorModel& detector, Fn&& fn) {
  for_each_volume(detector.root, detector.root.name, fn);
}

/// Structural checks of the tree (names, uniqueness, rotations, shapes).
/// Returns one message per problem.
std::vector<std::string> validate_detector(const DetectorModel& detector);

// ---------------------------------------------------------------------------
// Attribute schemas

enum class ObjectKind { track, hit, segment };

std::string_view to_string(ObjectKind kind);
/// Throws evd::Error for anything other than "track", "hit", "segment".
ObjectKind parse_object_kind(std::string_view name);

enum class AttributeType { numeric, boolean };

struct AttributeEntry {
  std::string name;
  AttributeType type = AttributeType::numeric;
  std::string description;
};

struct AttributeSchema {
  ObjectKind kind = ObjectKind::track;
  std::vector<AttributeEntry> entries;

  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] const AttributeEntry* find(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> names() const;
};

AttributeSchema attribute_schema(ObjectKind kind);
/// String form used by file formats and the service; throws on unknown kinds
/// such as "jet".
AttributeSchema attribute_schema(std::string_view kind);

/// pt = kPtPerKappa * B / kappa, with B in tesla and kappa in cm^-1.
inline constexpr double kPtPerKappa = 0.00299792458;
/// Below this curvature (cm^-1) tracks are treated as straight lines.
inline constexpr double kKappaEps = 1e-9;

struct DerivedTrackAttributes {
  AttributeMap values;  // pt, eta, phi, dca, length, kappa
  bool pt_saturated = false;  // kappa == 0: pt holds the largest finite double
};

DerivedTrackAttributes derived_track_attributes(const HelixTrack& track, double b_field);

// Full attribute maps as seen by filters: built-ins first, then `extra`
// entries whose names do not collide with a built-in.
AttributeMap track_attributes(const HelixTrack& track, double b_field);
AttributeMap hit_attributes(const Hit& hit);
AttributeMap segment_attributes(const Segment& segment);

double segment_length(const Segment& segment);

/// Wraps an angle to [-pi, pi).
double wrap_angle(double angle);

// ---------------------------------------------------------------------------
// Event validation

enum class Severity { error, warning };

struct Violation {
  std::string collection;  // "hits", "segments", "tracks"
  std::int64_t id = 0;
  std::string message;
  Severity severity = Severity::error;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_event(const Event& event);

}  // namespace evd
