#include "evd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "evd/error.hpp"

namespace evd {

Transform compose(const Transform& parent, const Transform& child) {
  return {parent.rotation * child.rotation, parent.rotation * child.translation + parent.translation};
}

Transform inverse(const Transform& t) {
  const Mat3 rt = transpose(t.rotation);
  return {rt, -1.0 * (rt * t.translation)};
}

std::size_t azimuthal_segments(double radius, double eps) {
  const double step = 2 * std::acos(std::max(0.0, 1 - eps / radius));
  return static_cast<std::size_t>(std::max(8.0, std::ceil(2 * std::numbers::pi / step)));
}

namespace {

using Tri = std::array<std::uint32_t, 3>;

Mesh box_mesh(const Box& b) {
  Mesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back({(i & 1) ? b.dx : -b.dx, (i & 2) ? b.dy : -b.dy, (i & 4) ? b.dz : -b.dz});
  m.triangles = {
      Tri{0, 2, 3}, Tri{0, 3, 1},  // -z
      Tri{4, 5, 7}, Tri{4, 7, 6},  // +z
      Tri{0, 1, 5}, Tri{0, 5, 4},  // -y
      Tri{2, 6, 7}, Tri{2, 7, 3},  // +y
      Tri{0, 4, 6}, Tri{0, 6, 2},  // -x
      Tri{1, 3, 7}, Tri{1, 7, 5},  // +x
  };
  return m;
}

// Solid of revolution between z = -dz (radii inner1, outer1) and z = +dz
// (radii inner2, outer2). Covers both tubes and cones.
Mesh revolved_mesh(double inner1, double outer1, double inner2, double outer2, double dz, double eps) {
  const std::size_t n = azimuthal_segments(std::max(outer1, outer2), eps);
  std::vector<double> cs(n);
  std::vector<double> sn(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cs[k] = std::cos(phi);
    sn[k] = std::sin(phi);
  }

  Mesh m;
  auto add_ring = [&](double r, double z) {
    const auto first = static_cast<std::uint32_t>(m.vertices.size());
    for (std::size_t k = 0; k < n; ++k) m.vertices.push_back({r * cs[k], r * sn[k], z});
    return first;
  };
  auto add_point = [&](double z) {
    m.vertices.push_back({0.0, 0.0, z});
    return static_cast<std::uint32_t>(m.vertices.size() - 1);
  };
  auto at = [n](std::uint32_t first, std::size_t k) { return first + static_cast<std::uint32_t>(k % n); };

  const std::uint32_t o1 = add_ring(outer1, -dz);
  const std::uint32_t o2 = add_ring(outer2, dz);
  const bool ring1 = inner1 > 0;
  const bool ring2 = inner2 > 0;
  // Inner ring, or a cap centre when the inner radius is zero.
  const std::uint32_t i1 = ring1 ? add_ring(inner1, -dz) : add_point(-dz);
  const std::uint32_t i2 = ring2 ? add_ring(inner2, dz) : add_point(dz);
  // A bore that closes to a point at one end gets its own apex vertex, so the
  // bore and the adjacent cap do not share a pinch vertex.
  const std::uint32_t apex1 = (!ring1 && ring2) ? add_point(-dz) : 0;
  const std::uint32_t apex2 = (ring1 && !ring2) ? add_point(dz) : 0;

  auto& t = m.triangles;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = k + 1;
    // Outer wall.
    t.push_back({at(o1, k), at(o1, k1), at(o2, k1)});
    t.push_back({at(o1, k), at(o2, k1), at(o2, k)});
    // Top cap (+z).
    if (ring2) {
      t.push_back({at(i2, k), at(o2, k), at(o2, k1)});
      t.push_back({at(i2, k), at(o2, k1), at(i2, k1)});
    } else {
      t.push_back({i2, at(o2, k), at(o2, k1)});
    }
    // Bottom cap (-z).
    if (ring1) {
      t.push_back({at(i1, k), at(o1, k1), at(o1, k)});
      t.push_back({at(i1, k), at(i1, k1), at(o1, k1)});
    } else {
      t.push_back({i1, at(o1, k1), at(o1, k)});
    }
    // Inner wall, facing the axis.
    if (ring1 && ring2) {
      t.push_back({at(i1, k), at(i2, k1), at(i1, k1)});
      t.push_back({at(i1, k), at(i2, k), at(i2, k1)});
    } else if (ring2) {
      t.push_back({apex1, at(i2, k), at(i2, k1)});
    } else if (ring1) {
      t.push_back({at(i1, k), apex2, at(i1, k1)});
    }
  }
  return m;
}

}  // namespace

Mesh tessellate_shape(const Shape& shape, double eps) {
  if (!(eps > 0)) throw Error("tessellation tolerance must be > 0");
  if (auto msg = shape_violation(shape); !msg.empty()) throw Error("invalid shape: " + msg);
  if (const auto* b = std::get_if<Box>(&shape)) return box_mesh(*b);
  if (const auto* tube = std::get_if<Tube>(&shape))
    return revolved_mesh(tube->rmin, tube->rmax, tube->rmin, tube->rmax, tube->dz, eps);
  const auto& c = std::get<Cone>(shape);
  return revolved_mesh(c.rmin1, c.rmax1, c.rmin2, c.rmax2, c.dz, eps);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = path.find('/', start);
    parts.emplace_back(path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

// '*' within a single component.
bool match_component(std::string_view pat, std::string_view name) {
  std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = n;
    } else if (p < pat.size() && pat[p] == name[n]) {
      ++p;
      ++n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

bool match_parts(const std::vector<std::string>& pat, std::size_t pi, const std::vector<std::string>& path,
                 std::size_t ni) {
  if (pi == pat.size()) return ni == path.size();
  if (pat[pi] == "**") {
    for (std::size_t skip = ni; skip <= path.size(); ++skip)
      if (match_parts(pat, pi + 1, path, skip)) return true;
    return false;
  }
  if (ni == path.size()) return false;
  return match_component(pat[pi], path[ni]) && match_parts(pat, pi + 1, path, ni + 1);
}

}  // namespace

PathGlob::PathGlob(std::string pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw Error("malformed glob '': empty pattern");
  parts_ = split_path(pattern_);
  for (const auto& part : parts_) {
    if (part.empty()) throw Error("malformed glob '" + pattern_ + "': empty path component");
    if (part != "**" && part.find("**") != std::string::npos)
      throw Error("malformed glob '" + pattern_ + "': '**' must be a whole path component");
  }
}

bool PathGlob::matches(std::string_view path) const { return match_parts(parts_, 0, split_path(path), 0); }

std::vector<PlacedMesh> flatten_detector(const DetectorModel& detector, const std::vector<std::string>& selection,
                                         double eps) {
  if (!(eps > 0)) throw Error("tessellation tolerance must be > 0");
  std::vector<PathGlob> globs;
  globs.reserve(selection.size());
  for (const auto& s : selection) globs.emplace_back(s);

  std::vector<PlacedMesh> out;
  auto visit = [&](auto&& self, const Volume& v, const std::string& path, const Transform& parent) -> void {
    const Transform world = compose(parent, Transform{v.rotation, v.translation});
    const bool selected =
        globs.empty() || std::any_of(globs.begin(), globs.end(), [&](const PathGlob& g) { return g.matches(path); });
    if (v.shape && v.visible && selected) {
      PlacedMesh placed{path, tessellate_shape(*v.shape, eps), v.color, v.visible};
      for (Vec3& p : placed.mesh.vertices) p = world.apply(p);
      out.push_back(std::move(placed));
    }
    for (const Volume& child : v.children) self(self, child, path + "/" + child.name, world);
  };
  visit(visit, detector.root, detector.root.name, Transform{});
  return out;
}

// ---------------------------------------------------------------------------

double signed_volume(const Mesh& mesh) {
  double total = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    total += dot(a, cross(b, c));
  }
  return total / 6.0;
}

bool is_watertight(const Mesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++directed[{tri[e], tri[(e + 1) % 3]}];
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto back = directed.find({edge.second, edge.first});
    if (back == directed.end() || back->second != 1) return false;
  }
  return true;
}

std::size_t edge_count(const Mesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      auto a = tri[e];
      auto b = tri[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  return edges.size();
}

}  // namespace evd
