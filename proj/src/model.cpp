#include "evd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "evd/error.hpp"

namespace evd {

namespace {

bool all_finite(const AttributeMap& values) {
  return std::all_of(values.begin(), values.end(),
                     [](const auto& kv) { return std::isfinite(kv.second); });
}

void merge_extra(AttributeMap& attrs, const AttributeMap& extra) {
  // Built-ins win on collision; validate_event reports the clash.
  for (const auto& [name, value] : extra) attrs.emplace(name, value);
}

const std::vector<AttributeEntry>& track_entries() {
  static const std::vector<AttributeEntry> entries = {
      {"pt", AttributeType::numeric, "transverse momentum, GeV/c"},
      {"eta", AttributeType::numeric, "pseudorapidity"},
      {"phi", AttributeType::numeric, "azimuth of the momentum at the origin, rad"},
      {"charge", AttributeType::numeric, "electric charge, units of e"},
      {"nhits", AttributeType::numeric, "number of associated hits"},
      {"chi2", AttributeType::numeric, "fit chi-square"},
      {"dca", AttributeType::numeric, "transverse distance of closest approach to the beam line, cm"},
      {"kappa", AttributeType::numeric, "transverse curvature, 1/cm"},
      {"length", AttributeType::numeric, "drawn path length, cm"},
      {"id", AttributeType::numeric, "track id"},
  };
  return entries;
}

const std::vector<AttributeEntry>& hit_entries() {
  static const std::vector<AttributeEntry> entries = {
      {"x", AttributeType::numeric, "x position, cm"},
      {"y", AttributeType::numeric, "y position, cm"},
      {"z", AttributeType::numeric, "z position, cm"},
      {"r", AttributeType::numeric, "cylindrical radius hypot(x, y), cm"},
      {"phi", AttributeType::numeric, "azimuth atan2(y, x), rad"},
      {"de", AttributeType::numeric, "energy deposit"},
      {"detector", AttributeType::numeric, "detector / layer code"},
      {"track_id", AttributeType::numeric, "owning track id, -1 if unassigned"},
      {"id", AttributeType::numeric, "hit id"},
  };
  return entries;
}

const std::vector<AttributeEntry>& segment_entries() {
  static const std::vector<AttributeEntry> entries = {
      {"npoints", AttributeType::numeric, "number of polyline points"},
      {"length", AttributeType::numeric, "summed length of consecutive points, cm"},
      {"detector", AttributeType::numeric, "detector code"},
      {"id", AttributeType::numeric, "segment id"},
  };
  return entries;
}

}  // namespace

std::string shape_violation(const Shape& shape) {
  struct Checker {
    std::string operator()(const Tube& t) const {
      if (!std::isfinite(t.rmin) || !std::isfinite(t.rmax) || !std::isfinite(t.dz))
        return "tube dimensions must be finite";
      if (t.rmin < 0) return "tube rmin must be >= 0";
      if (!(t.rmax > t.rmin)) return "tube rmax must exceed rmin";
      if (!(t.dz > 0)) return "tube dz must be > 0";
      return {};
    }
    std::string operator()(const Box& b) const {
      if (!std::isfinite(b.dx) || !std::isfinite(b.dy) || !std::isfinite(b.dz))
        return "box dimensions must be finite";
      if (!(b.dx > 0 && b.dy > 0 && b.dz > 0)) return "box half-lengths must be > 0";
      return {};
    }
    std::string operator()(const Cone& c) const {
      for (double v : {c.rmin1, c.rmax1, c.rmin2, c.rmax2, c.dz})
        if (!std::isfinite(v)) return "cone dimensions must be finite";
      if (c.rmin1 < 0 || c.rmin2 < 0) return "cone inner radii must be >= 0";
      if (!(c.rmax1 > c.rmin1) || !(c.rmax2 > c.rmin2)) return "cone outer radii must exceed inner radii";
      if (!(c.dz > 0)) return "cone dz must be > 0";
      return {};
    }
  };
  return std::visit(Checker{}, shape);
}

std::string_view shape_type_name(const Shape& shape) {
  static constexpr std::string_view names[] = {"tube", "box", "cone"};
  return names[shape.index()];
}

const Volume* volume_lookup(const DetectorModel& detector, std::string_view path) {
  const Volume* current = nullptr;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t slash = path.find('/', start);
    const std::string_view part =
        path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (current == nullptr) {
      if (part != detector.root.name) return nullptr;
      current = &detector.root;
    } else {
      const auto it = std::find_if(current->children.begin(), current->children.end(),
                                   [&](const Volume& v) { return v.name == part; });
      if (it == current->children.end()) return nullptr;
      current = &*it;
    }
    if (slash == std::string_view::npos) return current;
    start = slash + 1;
  }
  return nullptr;
}

std::vector<std::string> validate_detector(const DetectorModel& detector) {
  std::vector<std::string> problems;
  for_each_volume(detector, [&](const Volume& v, const std::string& path) {
    if (v.name.empty()) problems.push_back(path + ": empty volume name");
    if (v.name.find('/') != std::string::npos) problems.push_back(path + ": name contains '/'");
    if (!v.translation.finite()) problems.push_back(path + ": non-finite translation");
    if (orthonormality_error(v.rotation) > 1e-9) problems.push_back(path + ": rotation is not orthonormal");
    if (determinant(v.rotation) < 0) problems.push_back(path + ": rotation is a reflection");
    if (v.shape) {
      if (auto msg = shape_violation(*v.shape); !msg.empty()) problems.push_back(path + ": " + msg);
    }
    std::set<std::string> seen;
    for (const Volume& child : v.children)
      if (!seen.insert(child.name).second)
        problems.push_back(path + ": duplicate child name '" + child.name + "'");
  });
  return problems;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::track: return "track";
    case ObjectKind::hit: return "hit";
    case ObjectKind::segment: return "segment";
  }
  return "?";
}

ObjectKind parse_object_kind(std::string_view name) {
  if (name == "track") return ObjectKind::track;
  if (name == "hit") return ObjectKind::hit;
  if (name == "segment") return ObjectKind::segment;
  throw Error("unknown object kind '" + std::string(name) + "' (expected track, hit or segment)");
}

bool AttributeSchema::contains(std::string_view name) const { return find(name) != nullptr; }

const AttributeEntry* AttributeSchema::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<std::string> AttributeSchema::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

AttributeSchema attribute_schema(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::track: return {kind, track_entries()};
    case ObjectKind::hit: return {kind, hit_entries()};
    case ObjectKind::segment: return {kind, segment_entries()};
  }
  throw Error("unknown object kind");
}

AttributeSchema attribute_schema(std::string_view kind) { return attribute_schema(parse_object_kind(kind)); }

double wrap_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(angle, 2 * pi);  // [-pi, pi]
  if (w >= pi) w -= 2 * pi;
  return w;
}

DerivedTrackAttributes derived_track_attributes(const HelixTrack& t, double b_field) {
  constexpr double pi = std::numbers::pi;
  DerivedTrackAttributes out;
  auto& v = out.values;

  if (t.kappa == 0.0) {
    v["pt"] = std::numeric_limits<double>::max();
    out.pt_saturated = true;
  } else {
    v["pt"] = kPtPerKappa * b_field / t.kappa;
  }
  v["eta"] = std::asinh(std::tan(t.lambda));  // = -ln tan(theta/2), exact at lambda = 0
  v["phi"] = wrap_angle(t.phi0 + t.h * pi / 2);

  if (t.kappa < kKappaEps) {
    // Distance from the origin to the line through (x0, y0) along
    // (-sin phi0, cos phi0).
    v["dca"] = std::fabs(t.origin.x * std::cos(t.phi0) + t.origin.y * std::sin(t.phi0));
  } else {
    const double cx = t.origin.x - std::cos(t.phi0) / t.kappa;
    const double cy = t.origin.y - std::sin(t.phi0) / t.kappa;
    v["dca"] = std::fabs(std::hypot(cx, cy) - 1.0 / t.kappa);
  }
  v["length"] = t.s_max - t.s_min;
  v["kappa"] = t.kappa;
  return out;
}

AttributeMap track_attributes(const HelixTrack& t, double b_field) {
  AttributeMap attrs = derived_track_attributes(t, b_field).values;
  attrs["charge"] = t.charge;
  attrs["nhits"] = static_cast<double>(t.nhits);
  attrs["chi2"] = t.chi2;
  attrs["id"] = static_cast<double>(t.id);
  merge_extra(attrs, t.extra);
  return attrs;
}

AttributeMap hit_attributes(const Hit& h) {
  AttributeMap attrs{
      {"x", h.position.x},
      {"y", h.position.y},
      {"z", h.position.z},
      {"r", std::hypot(h.position.x, h.position.y)},
      {"phi", std::atan2(h.position.y, h.position.x)},
      {"de", h.de},
      {"detector", h.detector},
      {"track_id", static_cast<double>(h.track_id)},
      {"id", static_cast<double>(h.id)},
  };
  merge_extra(attrs, h.extra);
  return attrs;
}

double segment_length(const Segment& s) {
  double total = 0.0;
  for (std::size_t i = 1; i < s.points.size(); ++i) total += distance(s.points[i - 1], s.points[i]);
  return total;
}

AttributeMap segment_attributes(const Segment& s) {
  AttributeMap attrs{
      {"npoints", static_cast<double>(s.points.size())},
      {"length", segment_length(s)},
      {"detector", s.detector},
      {"id", static_cast<double>(s.id)},
  };
  merge_extra(attrs, s.extra);
  return attrs;
}

// ---------------------------------------------------------------------------

namespace {

void check_extra(std::vector<Violation>& out, const char* collection, std::int64_t id,
                 const AttributeMap& extra, const AttributeSchema& schema) {
  if (!all_finite(extra)) out.push_back({collection, id, "non-finite extra attribute"});
  for (const auto& [name, value] : extra)
    if (schema.contains(name))
      out.push_back({collection, id, "extra attribute '" + name + "' shadows a built-in; built-in wins",
                     Severity::warning});
}

template <typename T>
void check_unique_ids(std::vector<Violation>& out, const char* collection, const std::vector<T>& items) {
  std::set<std::int64_t> seen;
  std::set<std::int64_t> reported;
  for (const auto& item : items)
    if (!seen.insert(item.id).second && reported.insert(item.id).second)
      out.push_back({collection, item.id, "duplicate id"});
}

}  // namespace

std::vector<Violation> validate_event(const Event& e) {
  constexpr double pi = std::numbers::pi;
  std::vector<Violation> out;
  const auto hit_schema = attribute_schema(ObjectKind::hit);
  const auto seg_schema = attribute_schema(ObjectKind::segment);
  const auto trk_schema = attribute_schema(ObjectKind::track);

  check_unique_ids(out, "hits", e.hits);
  check_unique_ids(out, "segments", e.segments);
  check_unique_ids(out, "tracks", e.tracks);

  std::set<std::int64_t> track_ids;
  for (const auto& t : e.tracks) track_ids.insert(t.id);

  for (const auto& h : e.hits) {
    if (h.id < 0) out.push_back({"hits", h.id, "negative id"});
    if (!h.position.finite()) out.push_back({"hits", h.id, "non-finite position"});
    if (!(h.de >= 0)) out.push_back({"hits", h.id, "negative or NaN energy deposit"});
    if (h.track_id != -1 && !track_ids.contains(h.track_id))
      out.push_back({"hits", h.id, "dangling track_id " + std::to_string(h.track_id)});
    check_extra(out, "hits", h.id, h.extra, hit_schema);
  }
  for (const auto& s : e.segments) {
    if (s.points.size() < 2) out.push_back({"segments", s.id, "fewer than 2 points"});
    if (!std::all_of(s.points.begin(), s.points.end(), [](const Vec3& p) { return p.finite(); }))
      out.push_back({"segments", s.id, "non-finite point"});
    check_extra(out, "segments", s.id, s.extra, seg_schema);
  }
  for (const auto& t : e.tracks) {
    if (!t.origin.finite()) out.push_back({"tracks", t.id, "non-finite origin"});
    if (!(t.kappa >= 0) || !std::isfinite(t.kappa)) out.push_back({"tracks", t.id, "kappa must be finite and >= 0"});
    if (t.h != 1 && t.h != -1) out.push_back({"tracks", t.id, "sense h must be +1 or -1"});
    if (!(t.lambda > -pi / 2 && t.lambda < pi / 2)) out.push_back({"tracks", t.id, "lambda outside (-pi/2, pi/2)"});
    if (!std::isfinite(t.phi0)) out.push_back({"tracks", t.id, "non-finite phi0"});
    if (!(t.s_min < t.s_max) || !std::isfinite(t.s_min) || !std::isfinite(t.s_max))
      out.push_back({"tracks", t.id, "s_min must be < s_max"});
    if (t.charge < -1 || t.charge > 1) out.push_back({"tracks", t.id, "charge must be -1, 0 or +1"});
    if (t.nhits < 0) out.push_back({"tracks", t.id, "negative nhits"});
    if (!(t.chi2 >= 0)) out.push_back({"tracks", t.id, "negative or NaN chi2"});
    check_extra(out, "tracks", t.id, t.extra, trk_schema);
  }
  return out;
}

}  // namespace evd
