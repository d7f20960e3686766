#include "evd/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include "evd/error.hpp"

namespace evd {

namespace {

// Fixed-point text; "-0.000" collapses to "0.000".
std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string write_obj(const Scene& scene) {
  std::string out;
  std::size_t base = 1;
  auto vertices = [&](const std::vector<Vec3>& pts) {
    for (const Vec3& p : pts) out += "v " + fixed(p.x, 6) + " " + fixed(p.y, 6) + " " + fixed(p.z, 6) + "\n";
  };
  for (const SceneNode& n : scene.nodes) {
    out += "o " + n.path + "\n";
    if (const auto* m = std::get_if<Mesh>(&n.geometry)) {
      vertices(m->vertices);
      for (const auto& t : m->triangles)
        out += "f " + std::to_string(base + t[0]) + " " + std::to_string(base + t[1]) + " " +
               std::to_string(base + t[2]) + "\n";
      base += m->vertices.size();
    } else if (const auto* l = std::get_if<Polyline3>(&n.geometry)) {
      vertices(l->points);
      if (l->points.size() >= 2) {
        out += "l";
        for (std::size_t i = 0; i < l->points.size(); ++i) out += " " + std::to_string(base + i);
        out += "\n";
      }
      base += l->points.size();
    } else {
      const auto& ps = std::get<PointSet>(n.geometry);
      vertices(ps.points);
      if (!ps.points.empty()) {
        out += "p";
        for (std::size_t i = 0; i < ps.points.size(); ++i) out += " " + std::to_string(base + i);
        out += "\n";
      }
      base += ps.points.size();
    }
  }
  return out;
}

Projection parse_projection(std::string_view name) {
  if (name == "xy") return Projection::xy;
  if (name == "zx") return Projection::zx;
  if (name == "rz") return Projection::rz;
  throw Error("unknown projection '" + std::string(name) + "' (expected xy, zx or rz)");
}

std::string_view to_string(Projection p) {
  switch (p) {
    case Projection::xy: return "xy";
    case Projection::zx: return "zx";
    case Projection::rz: return "rz";
  }
  return "?";
}

namespace {

struct P2 {
  double u = 0;
  double v = 0;
};

P2 project(const Vec3& p, Projection proj) {
  switch (proj) {
    case Projection::xy: return {p.x, p.y};
    case Projection::zx: return {p.z, p.x};
    case Projection::rz: return {p.z, std::hypot(p.x, p.y)};
  }
  return {};
}

std::string rgb(const Rgba& c) {
  auto channel = [](double x) { return std::to_string(static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255))); };
  return "rgb(" + channel(c.r) + "," + channel(c.g) + "," + channel(c.b) + ")";
}

std::string stroke_attrs(const Style& s) {
  return " fill=\"none\" stroke=\"" + rgb(s.color) + "\" stroke-opacity=\"" + fixed(s.color.a, 3) +
         "\" stroke-width=\"" + fixed(s.line_width, 3) + "\" vector-effect=\"non-scaling-stroke\"";
}

// Undirected edges used by exactly one triangle, in first-seen order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> open_edges(const Mesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, std::size_t>> uses;
  std::size_t order = 0;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, fresh] = uses.try_emplace({a, b}, 0, order++);
      ++it->second.first;
    }
  std::vector<std::pair<std::size_t, std::pair<std::uint32_t, std::uint32_t>>> ordered;
  for (const auto& [edge, use] : uses)
    if (use.first == 1) ordered.push_back({use.second, edge});
  std::sort(ordered.begin(), ordered.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& [o, e] : ordered) out.push_back(e);
  return out;
}

}  // namespace

std::string write_svg(const Scene& scene, Projection proj) {
  double umin = std::numeric_limits<double>::infinity(), vmin = umin;
  double umax = -umin, vmax = -umin;
  for (const SceneNode& n : scene.nodes) {
    const std::vector<Vec3>* pts = nullptr;
    if (const auto* m = std::get_if<Mesh>(&n.geometry)) pts = &m->vertices;
    else if (const auto* l = std::get_if<Polyline3>(&n.geometry)) pts = &l->points;
    else pts = &std::get<PointSet>(n.geometry).points;
    for (const Vec3& p : *pts) {
      const P2 q = project(p, proj);
      umin = std::min(umin, q.u);
      umax = std::max(umax, q.u);
      vmin = std::min(vmin, q.v);
      vmax = std::max(vmax, q.v);
    }
  }
  if (umin > umax) umin = umax = vmin = vmax = 0;
  // Degenerate extents get a unit box so the viewBox stays valid.
  double w = umax - umin, h = vmax - vmin;
  if (w <= 0) {
    umin -= 0.5;
    w = 1;
  }
  if (h <= 0) {
    vmin -= 0.5;
    h = 1;
  }
  const double mu = 0.05 * w, mv = 0.05 * h;
  const double extent = std::max(w, h);

  // The content group flips v so that +v points up; element coordinates
  // stay in scene units.
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fixed(umin - mu, 3) + " " +
                    fixed(-(vmin + h + mv), 3) + " " + fixed(w + 2 * mu, 3) + " " + fixed(h + 2 * mv, 3) +
                    "\" data-projection=\"" + std::string(to_string(proj)) + "\">\n";
  out += "<title>" + xml_escape(scene.name) + "</title>\n";
  out += "<g id=\"content\" transform=\"scale(1,-1)\">\n";
  for (const SceneNode& n : scene.nodes) {
    if (!n.style.visible) continue;
    out += "<g data-path=\"" + xml_escape(n.path) + "\">\n";
    if (const auto* l = std::get_if<Polyline3>(&n.geometry)) {
      if (!l->points.empty()) {
        out += "<path d=\"";
        for (std::size_t i = 0; i < l->points.size(); ++i) {
          const P2 q = project(l->points[i], proj);
          out += (i == 0 ? "M" : " L") + fixed(q.u, 3) + " " + fixed(q.v, 3);
        }
        out += "\"" + stroke_attrs(n.style) + "/>\n";
      }
    } else if (const auto* ps = std::get_if<PointSet>(&n.geometry)) {
      const std::string r = fixed(0.001 * extent * n.style.point_size, 3);
      for (const Vec3& p : ps->points) {
        const P2 q = project(p, proj);
        out += "<circle cx=\"" + fixed(q.u, 3) + "\" cy=\"" + fixed(q.v, 3) + "\" r=\"" + r + "\" fill=\"" +
               rgb(n.style.color) + "\" fill-opacity=\"" + fixed(n.style.color.a, 3) + "\"/>\n";
      }
    } else {
      const auto& m = std::get<Mesh>(n.geometry);
      const auto edges = open_edges(m);
      if (edges.empty() && !m.vertices.empty()) {
        P2 lo = project(m.vertices[0], proj), hi = lo;
        for (const Vec3& p : m.vertices) {
          const P2 q = project(p, proj);
          lo = {std::min(lo.u, q.u), std::min(lo.v, q.v)};
          hi = {std::max(hi.u, q.u), std::max(hi.v, q.v)};
        }
        out += "<rect x=\"" + fixed(lo.u, 3) + "\" y=\"" + fixed(lo.v, 3) + "\" width=\"" + fixed(hi.u - lo.u, 3) +
               "\" height=\"" + fixed(hi.v - lo.v, 3) + "\"" + stroke_attrs(n.style) + "/>\n";
      } else {
        for (const auto& [a, b] : edges) {
          const P2 p = project(m.vertices[a], proj), q = project(m.vertices[b], proj);
          out += "<line x1=\"" + fixed(p.u, 3) + "\" y1=\"" + fixed(p.v, 3) + "\" x2=\"" + fixed(q.u, 3) +
                 "\" y2=\"" + fixed(q.v, 3) + "\"" + stroke_attrs(n.style) + "/>\n";
        }
      }
    }
    out += "</g>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace evd
