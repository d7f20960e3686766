#include "evd/formats.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "evd/canonical_json.hpp"

namespace evd {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Located accessors

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  return j;
}

const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  return j;
}

const json& field(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(join(path, key), "missing required field");
  return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(path, "expected a number");
  return j.get<double>();
}

double finite_double(const json& j, const std::string& path) {
  const double v = as_double(j, path);
  if (!std::isfinite(v)) throw FormatError(path, "expected a finite number");
  return v;
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::trunc(v) && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  }
  throw FormatError(path, "expected an integer");
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw FormatError(path, "expected a boolean");
  return j.get<bool>();
}

double num_field(const json& obj, std::string_view key, const std::string& path) {
  return finite_double(field(obj, key, path), join(path, key));
}

std::int64_t int_field(const json& obj, std::string_view key, const std::string& path) {
  return as_int(field(obj, key, path), join(path, key));
}

Vec3 as_vec3(const json& j, const std::string& path) {
  require_array(j, path);
  if (j.size() != 3) throw FormatError(path, "expected 3 numbers");
  return {finite_double(j[0], index(path, 0)), finite_double(j[1], index(path, 1)), finite_double(j[2], index(path, 2))};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json rgba_json(const Rgba& c) { return json::array({c.r, c.g, c.b, c.a}); }

Rgba as_rgba(const json& j, const std::string& path) {
  require_array(j, path);
  if (j.size() != 4) throw FormatError(path, "expected 4 numbers");
  Rgba c{finite_double(j[0], index(path, 0)), finite_double(j[1], index(path, 1)),
         finite_double(j[2], index(path, 2)), finite_double(j[3], index(path, 3))};
  for (double v : {c.r, c.g, c.b, c.a})
    if (v < 0 || v > 1) throw FormatError(path, "color components must lie in [0, 1]");
  return c;
}

AttributeMap as_attribute_map(const json& j, const std::string& path) {
  require_object(j, path);
  AttributeMap out;
  for (const auto& [key, value] : j.items()) out[key] = finite_double(value, join(path, key));
  return out;
}

void check_version(const json& root) {
  require_object(root, "");
  const std::int64_t v = int_field(root, "version", "");
  if (v != 1) throw FormatError("version", "unsupported version " + std::to_string(v));
}

// ---------------------------------------------------------------------------
// Geometry

json shape_json(const Shape& shape) {
  struct Visitor {
    json operator()(const Tube& t) const { return {{"type", "tube"}, {"rmin", t.rmin}, {"rmax", t.rmax}, {"dz", t.dz}}; }
    json operator()(const Box& b) const { return {{"type", "box"}, {"dx", b.dx}, {"dy", b.dy}, {"dz", b.dz}}; }
    json operator()(const Cone& c) const {
      return {{"type", "cone"}, {"rmin1", c.rmin1}, {"rmax1", c.rmax1}, {"rmin2", c.rmin2},
              {"rmax2", c.rmax2}, {"dz", c.dz}};
    }
  };
  return std::visit(Visitor{}, shape);
}

Shape read_shape(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(field(j, "type", path), join(path, "type"));
  Shape shape;
  if (type == "tube")
    shape = Tube{num_field(j, "rmin", path), num_field(j, "rmax", path), num_field(j, "dz", path)};
  else if (type == "box")
    shape = Box{num_field(j, "dx", path), num_field(j, "dy", path), num_field(j, "dz", path)};
  else if (type == "cone")
    shape = Cone{num_field(j, "rmin1", path), num_field(j, "rmax1", path), num_field(j, "rmin2", path),
                 num_field(j, "rmax2", path), num_field(j, "dz", path)};
  else
    throw FormatError(join(path, "type"), "unknown shape type '" + type + "' (expected tube, box or cone)");
  if (auto msg = shape_violation(shape); !msg.empty()) throw FormatError(path, msg);
  return shape;
}

// Gram-Schmidt on the rows.
Mat3 orthonormalize(const Mat3& r) {
  Vec3 a{r(0, 0), r(0, 1), r(0, 2)};
  Vec3 b{r(1, 0), r(1, 1), r(1, 2)};
  a = (1.0 / norm(a)) * a;
  b = b - dot(a, b) * a;
  b = (1.0 / norm(b)) * b;
  Vec3 c = cross(a, b);
  Mat3 out;
  out.m = {a.x, a.y, a.z, b.x, b.y, b.z, c.x, c.y, c.z};
  return out;
}

Mat3 read_rotation(const json& j, const std::string& path) {
  require_array(j, path);
  if (j.size() != 9) throw FormatError(path, "expected 9 numbers (row-major 3x3)");
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.m[i] = finite_double(j[i], index(path, i));
  if (determinant(r) < 0) throw FormatError(path, "rotation has negative determinant (reflections are not allowed)");
  const double err = orthonormality_error(r);
  if (err > 1e-6) throw FormatError(path, "rotation is not orthonormal");
  if (err > 1e-9) r = orthonormalize(r);
  return r;
}

struct FlatVolume {
  Volume volume;  // children filled in later
  std::vector<std::size_t> children;
};

Volume assemble(std::vector<FlatVolume>& flat, std::size_t i) {
  Volume v = std::move(flat[i].volume);
  for (std::size_t c : flat[i].children) v.children.push_back(assemble(flat, c));
  return v;
}

}  // namespace

std::string write_geometry(const DetectorModel& detector) {
  json volumes = json::array();
  auto visit = [&](auto&& self, const Volume& v, const std::string& parent, const std::string& path) -> void {
    json entry{{"name", v.name},
               {"parent", parent},
               {"translation", vec3_json(v.translation)},
               {"rotation", json(std::vector<double>(v.rotation.m.begin(), v.rotation.m.end()))},
               {"color", rgba_json(v.color)},
               {"visible", v.visible}};
    entry["shape"] = v.shape ? shape_json(*v.shape) : json(nullptr);
    volumes.push_back(std::move(entry));
    for (const Volume& c : v.children) self(self, c, path, path + "/" + c.name);
  };
  visit(visit, detector.root, "", detector.root.name);
  return canonical_dump(json{{"version", 1}, {"volumes", std::move(volumes)}});
}

DetectorModel read_geometry(std::string_view text) {
  const json root = parse_json(text);
  check_version(root);
  const json& volumes = require_array(field(root, "volumes", ""), "volumes");
  if (volumes.empty()) throw FormatError("volumes", "at least one volume (the root) is required");

  std::vector<FlatVolume> flat;
  std::map<std::string, std::size_t> by_path;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const std::string path = index("volumes", i);
    const json& jv = require_object(volumes[i], path);
    FlatVolume fv;
    Volume& v = fv.volume;
    v.name = as_string(field(jv, "name", path), join(path, "name"));
    if (v.name.empty()) throw FormatError(join(path, "name"), "volume name must not be empty");
    if (v.name.find('/') != std::string::npos) throw FormatError(join(path, "name"), "volume name must not contain '/'");
    const std::string parent = as_string(field(jv, "parent", path), join(path, "parent"));
    if (const json* s = optional_field(jv, "shape")) v.shape = read_shape(*s, join(path, "shape"));
    if (const json* t = optional_field(jv, "translation")) v.translation = as_vec3(*t, join(path, "translation"));
    if (const json* r = optional_field(jv, "rotation")) v.rotation = read_rotation(*r, join(path, "rotation"));
    if (const json* c = optional_field(jv, "color")) v.color = as_rgba(*c, join(path, "color"));
    if (const json* vis = optional_field(jv, "visible")) v.visible = as_bool(*vis, join(path, "visible"));

    std::string full;
    if (parent.empty()) {
      if (i != 0) throw FormatError(join(path, "parent"), "only the first volume may be the root (parent \"\")");
      full = v.name;
    } else {
      if (i == 0) throw FormatError(join(path, "parent"), "the first volume must be the root (parent \"\")");
      const auto it = by_path.find(parent);
      if (it == by_path.end()) throw FormatError(join(path, "parent"), "unknown parent path '" + parent + "'");
      flat[it->second].children.push_back(i);
      full = parent + "/" + v.name;
    }
    if (!by_path.emplace(full, i).second) throw FormatError(join(path, "name"), "duplicate volume path '" + full + "'");
    flat.push_back(std::move(fv));
  }
  DetectorModel d;
  d.root = assemble(flat, 0);
  return d;
}

// ---------------------------------------------------------------------------
// Events

std::string write_events(const EventSet& set) {
  json events = json::array();
  for (const Event& e : set.events) {
    json hits = json::array();
    for (const Hit& h : e.hits)
      hits.push_back({{"id", h.id},
                      {"pos", vec3_json(h.position)},
                      {"detector", h.detector},
                      {"de", h.de},
                      {"track_id", h.track_id},
                      {"extra", to_json(h.extra)}});
    json segments = json::array();
    for (const Segment& s : e.segments) {
      json points = json::array();
      for (const Vec3& p : s.points) points.push_back(vec3_json(p));
      segments.push_back({{"id", s.id}, {"points", std::move(points)}, {"detector", s.detector}, {"extra", to_json(s.extra)}});
    }
    json tracks = json::array();
    for (const HelixTrack& t : e.tracks)
      tracks.push_back({{"id", t.id},
                        {"origin", vec3_json(t.origin)},
                        {"kappa", t.kappa},
                        {"lambda", t.lambda},
                        {"phi0", t.phi0},
                        {"h", t.h},
                        {"s_min", t.s_min},
                        {"s_max", t.s_max},
                        {"charge", t.charge},
                        {"nhits", t.nhits},
                        {"chi2", t.chi2},
                        {"extra", to_json(t.extra)}});
    json meta = json::object();
    for (const auto& [k, v] : e.meta) meta[k] = v;
    events.push_back({{"index", e.index},
                      {"hits", std::move(hits)},
                      {"segments", std::move(segments)},
                      {"tracks", std::move(tracks)},
                      {"meta", std::move(meta)}});
  }
  return canonical_dump(json{{"version", 1}, {"b_field", set.b_field}, {"events", std::move(events)}});
}

LoadedEvents read_events(std::string_view text) {
  const json root = parse_json(text);
  check_version(root);
  LoadedEvents out;
  out.events.b_field = num_field(root, "b_field", "");
  if (!(out.events.b_field > 0)) throw FormatError("b_field", "field must be > 0");
  const json& events = require_array(field(root, "events", ""), "events");

  auto optional_array = [](const json& obj, std::string_view key, const std::string& path) -> const json& {
    static const json empty = json::array();
    const json* j = optional_field(obj, key);
    if (!j) return empty;
    return require_array(*j, join(path, key));
  };
  auto extra_of = [](const json& obj, const std::string& path) {
    const json* j = optional_field(obj, "extra");
    return j ? as_attribute_map(*j, join(path, "extra")) : AttributeMap{};
  };

  for (std::size_t ei = 0; ei < events.size(); ++ei) {
    const std::string ep = index("events", ei);
    const json& je = require_object(events[ei], ep);
    Event e;
    e.index = int_field(je, "index", ep);

    const json& hits = optional_array(je, "hits", ep);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const std::string p = index(join(ep, "hits"), i);
      const json& jh = require_object(hits[i], p);
      Hit h;
      h.id = int_field(jh, "id", p);
      h.position = as_vec3(field(jh, "pos", p), join(p, "pos"));
      h.detector = static_cast<int>(int_field(jh, "detector", p));
      h.de = num_field(jh, "de", p);
      h.track_id = int_field(jh, "track_id", p);
      h.extra = extra_of(jh, p);
      e.hits.push_back(std::move(h));
    }

    const json& segments = optional_array(je, "segments", ep);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const std::string p = index(join(ep, "segments"), i);
      const json& js = require_object(segments[i], p);
      Segment s;
      s.id = int_field(js, "id", p);
      const json& pts = require_array(field(js, "points", p), join(p, "points"));
      if (pts.size() < 2) throw FormatError(join(p, "points"), "a segment needs at least 2 points");
      for (std::size_t k = 0; k < pts.size(); ++k) s.points.push_back(as_vec3(pts[k], index(join(p, "points"), k)));
      s.detector = static_cast<int>(int_field(js, "detector", p));
      s.extra = extra_of(js, p);
      e.segments.push_back(std::move(s));
    }

    const json& tracks = optional_array(je, "tracks", ep);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const std::string p = index(join(ep, "tracks"), i);
      const json& jt = require_object(tracks[i], p);
      HelixTrack t;
      t.id = int_field(jt, "id", p);
      t.origin = as_vec3(field(jt, "origin", p), join(p, "origin"));
      t.kappa = num_field(jt, "kappa", p);
      t.lambda = num_field(jt, "lambda", p);
      t.phi0 = num_field(jt, "phi0", p);
      t.h = static_cast<int>(int_field(jt, "h", p));
      t.s_min = num_field(jt, "s_min", p);
      t.s_max = num_field(jt, "s_max", p);
      t.charge = static_cast<int>(int_field(jt, "charge", p));
      t.nhits = int_field(jt, "nhits", p);
      t.chi2 = num_field(jt, "chi2", p);
      t.extra = extra_of(jt, p);
      e.tracks.push_back(std::move(t));
    }

    if (const json* meta = optional_field(je, "meta")) {
      require_object(*meta, join(ep, "meta"));
      for (const auto& [k, v] : meta->items()) e.meta[k] = as_string(v, join(join(ep, "meta"), k));
    }

    for (const Violation& v : validate_event(e))
      out.warnings.push_back("event " + std::to_string(e.index) + ": " + v.collection + " id " +
                             std::to_string(v.id) + ": " + v.message);
    out.events.events.push_back(std::move(e));
  }
  return out;
}

ExtraNames collect_extra_names(const EventSet& set) {
  ExtraNames out;
  for (const Event& e : set.events) {
    for (const auto& h : e.hits)
      for (const auto& [k, v] : h.extra) out[ObjectKind::hit].insert(k);
    for (const auto& s : e.segments)
      for (const auto& [k, v] : s.extra) out[ObjectKind::segment].insert(k);
    for (const auto& t : e.tracks)
      for (const auto& [k, v] : t.extra) out[ObjectKind::track].insert(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenes

namespace {

json flat_points(const std::vector<Vec3>& pts) {
  json out = json::array();
  for (const Vec3& p : pts) {
    out.push_back(p.x);
    out.push_back(p.y);
    out.push_back(p.z);
  }
  return out;
}

std::vector<Vec3> read_flat_points(const json& j, const std::string& path) {
  require_array(j, path);
  if (j.size() % 3 != 0) throw FormatError(path, "flat vertex array length must be a multiple of 3");
  std::vector<Vec3> out;
  out.reserve(j.size() / 3);
  for (std::size_t i = 0; i < j.size(); i += 3)
    out.push_back({finite_double(j[i], index(path, i)), finite_double(j[i + 1], index(path, i + 1)),
                   finite_double(j[i + 2], index(path, i + 2))});
  return out;
}

json geometry_json(const NodeGeometry& g) {
  if (const auto* m = std::get_if<Mesh>(&g)) {
    json tris = json::array();
    for (const auto& t : m->triangles) {
      tris.push_back(t[0]);
      tris.push_back(t[1]);
      tris.push_back(t[2]);
    }
    return {{"type", "mesh"}, {"vertices", flat_points(m->vertices)}, {"triangles", std::move(tris)}};
  }
  if (const auto* l = std::get_if<Polyline3>(&g)) return {{"type", "polyline"}, {"points", flat_points(l->points)}};
  const auto& ps = std::get<PointSet>(g);
  return {{"type", "points"}, {"points", flat_points(ps.points)}, {"source_ids", ps.source_ids}};
}

NodeGeometry read_geometry_node(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(field(j, "type", path), join(path, "type"));
  if (type == "mesh") {
    Mesh m;
    m.vertices = read_flat_points(field(j, "vertices", path), join(path, "vertices"));
    const std::string tp = join(path, "triangles");
    const json& tris = require_array(field(j, "triangles", path), tp);
    if (tris.size() % 3 != 0) throw FormatError(tp, "triangle index array length must be a multiple of 3");
    for (std::size_t i = 0; i < tris.size(); i += 3) {
      std::array<std::uint32_t, 3> t{};
      for (std::size_t k = 0; k < 3; ++k) {
        const std::int64_t v = as_int(tris[i + k], index(tp, i + k));
        if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size())
          throw FormatError(index(tp, i + k), "vertex index out of range");
        t[k] = static_cast<std::uint32_t>(v);
      }
      m.triangles.push_back(t);
    }
    return m;
  }
  if (type == "polyline") return Polyline3{read_flat_points(field(j, "points", path), join(path, "points"))};
  if (type == "points") {
    PointSet ps;
    ps.points = read_flat_points(field(j, "points", path), join(path, "points"));
    const std::string sp = join(path, "source_ids");
    const json& ids = require_array(field(j, "source_ids", path), sp);
    if (ids.size() != ps.points.size()) throw FormatError(sp, "one source id per point is required");
    for (std::size_t i = 0; i < ids.size(); ++i) ps.source_ids.push_back(as_int(ids[i], index(sp, i)));
    return ps;
  }
  throw FormatError(join(path, "type"), "unknown geometry type '" + type + "'");
}

json style_json(const Style& s) {
  return {{"color", rgba_json(s.color)}, {"line_width", s.line_width}, {"point_size", s.point_size}, {"visible", s.visible}};
}

Style read_style(const json& j, const std::string& path) {
  require_object(j, path);
  return {as_rgba(field(j, "color", path), join(path, "color")), num_field(j, "line_width", path),
          num_field(j, "point_size", path), as_bool(field(j, "visible", path), join(path, "visible"))};
}

SourceRef read_source(const json& j, const std::string& path) {
  require_object(j, path);
  SourceRef s;
  try {
    s.kind = parse_source_kind(as_string(field(j, "kind", path), join(path, "kind")));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(join(path, "kind"), e.what());
  }
  if (s.kind == SourceKind::volume)
    s.path = as_string(field(j, "path", path), join(path, "path"));
  else
    s.id = int_field(j, "id", path);
  return s;
}

}  // namespace

json to_json(const SourceRef& s) {
  if (s.kind == SourceKind::volume) return {{"kind", "volume"}, {"path", s.path}};
  return {{"kind", std::string(to_string(s.kind))}, {"id", s.id}};
}

json to_json(const Shape& shape) { return shape_json(shape); }

json to_json(const AttributeMap& attrs) {
  json out = json::object();
  for (const auto& [k, v] : attrs) out[k] = v;
  return out;
}

std::string write_scene_json(const Scene& scene) {
  json nodes = json::array();
  for (const SceneNode& n : scene.nodes)
    nodes.push_back({{"id", n.id},
                     {"path", n.path},
                     {"geometry", geometry_json(n.geometry)},
                     {"style", style_json(n.style)},
                     {"source", to_json(n.source)}});
  return canonical_dump(json{{"name", scene.name},
                             {"bounds", {{"min", vec3_json(scene.bounds.min)}, {"max", vec3_json(scene.bounds.max)}}},
                             {"nodes", std::move(nodes)}});
}

Scene read_scene_json(std::string_view text) {
  const json root = parse_json(text);
  require_object(root, "");
  Scene s;
  s.name = as_string(field(root, "name", ""), "name");
  const json& b = require_object(field(root, "bounds", ""), "bounds");
  s.bounds.min = as_vec3(field(b, "min", "bounds"), "bounds.min");
  s.bounds.max = as_vec3(field(b, "max", "bounds"), "bounds.max");
  const json& nodes = require_array(field(root, "nodes", ""), "nodes");
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = index("nodes", i);
    const json& jn = require_object(nodes[i], p);
    SceneNode n;
    n.id = int_field(jn, "id", p);
    if (!ids.insert(n.id).second) throw FormatError(join(p, "id"), "duplicate node id");
    n.path = as_string(field(jn, "path", p), join(p, "path"));
    n.geometry = read_geometry_node(field(jn, "geometry", p), join(p, "geometry"));
    n.style = read_style(field(jn, "style", p), join(p, "style"));
    n.source = read_source(field(jn, "source", p), join(p, "source"));
    s.nodes.push_back(std::move(n));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Filters

json to_json(const ParamValue& value) {
  if (const auto* b = std::get_if<bool>(&value)) return *b;
  return std::get<double>(value);
}

json to_json(const ParamValues& values) {
  json out = json::object();
  for (const auto& [k, v] : values) out[k] = to_json(v);
  return out;
}

ParamValues param_values_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  ParamValues out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_boolean())
      out[k] = v.get<bool>();
    else if (v.is_number())
      out[k] = v.get<double>();
    else
      throw FormatError(join(path, k), "expected a number or boolean");
  }
  return out;
}

namespace {

json param_spec_json(const ParamSpec& p) {
  json j{{"name", p.name}, {"type", std::string(to_string(p.type))}, {"default", to_json(p.default_value)}, {"label", p.label}};
  if (p.min) j["min"] = *p.min;
  if (p.max) j["max"] = *p.max;
  if (p.step) j["step"] = *p.step;
  return j;
}

json style_override_json(const std::optional<StyleOverride>& s) {
  if (!s) return nullptr;
  return {{"color", rgba_json(s->color)}, {"line_width", s->line_width}};
}

template <typename Fn>
auto rethrow_located(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(path, e.what());
  }
}

}  // namespace

std::string write_filters(const std::vector<FilterDef>& filters) {
  json out = json::array();
  for (const FilterDef& f : filters) {
    json params = json::array();
    for (const auto& p : f.params) params.push_back(param_spec_json(p));
    out.push_back({{"name", f.name},
                   {"applies_to", std::string(to_string(f.applies_to))},
                   {"expression", f.expression},
                   {"params", std::move(params)},
                   {"style_override", style_override_json(f.style_override)}});
  }
  return canonical_dump(out);
}

std::vector<FilterDef> read_filters(std::string_view text) {
  const json root = parse_json(text);
  require_array(root, "");
  std::vector<FilterDef> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string p = "[" + std::to_string(i) + "]";
    const json& jf = require_object(root[i], p);
    FilterDef f;
    f.name = as_string(field(jf, "name", p), join(p, "name"));
    if (f.name.empty()) throw FormatError(join(p, "name"), "filter name must not be empty");
    if (!names.insert(f.name).second) throw FormatError(join(p, "name"), "duplicate filter name '" + f.name + "'");
    const std::string applies = as_string(field(jf, "applies_to", p), join(p, "applies_to"));
    f.applies_to = rethrow_located(join(p, "applies_to"), [&] { return parse_applies_to(applies); });
    f.expression = as_string(field(jf, "expression", p), join(p, "expression"));
    if (const json* params = optional_field(jf, "params")) {
      const std::string pp = join(p, "params");
      require_array(*params, pp);
      for (std::size_t k = 0; k < params->size(); ++k) {
        const std::string sp = index(pp, k);
        const json& js = require_object((*params)[k], sp);
        ParamSpec spec;
        spec.name = as_string(field(js, "name", sp), join(sp, "name"));
        const std::string type = as_string(field(js, "type", sp), join(sp, "type"));
        spec.type = rethrow_located(join(sp, "type"), [&] { return parse_param_type(type); });
        const json& def = field(js, "default", sp);
        if (spec.type == ParamType::boolean)
          spec.default_value = as_bool(def, join(sp, "default"));
        else
          spec.default_value = finite_double(def, join(sp, "default"));
        if (const json* v = optional_field(js, "min")) spec.min = finite_double(*v, join(sp, "min"));
        if (const json* v = optional_field(js, "max")) spec.max = finite_double(*v, join(sp, "max"));
        if (const json* v = optional_field(js, "step")) spec.step = finite_double(*v, join(sp, "step"));
        if (const json* v = optional_field(js, "label")) spec.label = as_string(*v, join(sp, "label"));
        f.params.push_back(std::move(spec));
      }
    }
    if (const json* so = optional_field(jf, "style_override")) {
      const std::string sp = join(p, "style_override");
      require_object(*so, sp);
      StyleOverride s;
      s.color = as_rgba(field(*so, "color", sp), join(sp, "color"));
      if (const json* w = optional_field(*so, "line_width")) s.line_width = finite_double(*w, join(sp, "line_width"));
      if (s.line_width < 1) throw FormatError(join(sp, "line_width"), "line width must be >= 1");
      f.style_override = s;
    }
    out.push_back(std::move(f));
  }
  return out;
}

json to_json(const FilterDescriptor& d) {
  json params = json::array();
  for (const auto& p : d.params) {
    json j = param_spec_json(p.spec);
    j["widget"] = std::string(to_string(p.widget));
    params.push_back(std::move(j));
  }
  return {{"name", d.name},
          {"applies_to", std::string(to_string(d.applies_to))},
          {"expression", d.expression},
          {"params", std::move(params)},
          {"style_override", style_override_json(d.style_override)}};
}

// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace evd
