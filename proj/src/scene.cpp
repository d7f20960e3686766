#include "evd/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace evd {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::volume: return "volume";
    case SourceKind::track: return "track";
    case SourceKind::hit: return "hit";
    case SourceKind::segment: return "segment";
  }
  return "?";
}

SourceKind parse_source_kind(std::string_view name) {
  if (name == "volume") return SourceKind::volume;
  if (name == "track") return SourceKind::track;
  if (name == "hit") return SourceKind::hit;
  if (name == "segment") return SourceKind::segment;
  throw Error("unknown source kind '" + std::string(name) + "'");
}

KindSet parse_kinds(std::string_view list) {
  KindSet kinds = KindSet::none();
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item =
        list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (item == "tracks")
      kinds.tracks = true;
    else if (item == "hits")
      kinds.hits = true;
    else if (item == "segments")
      kinds.segments = true;
    else if (!item.empty())
      throw Error("unknown kind '" + std::string(item) + "' (expected tracks, hits or segments)");
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return kinds;
}

NodeLimitError::NodeLimitError(std::size_t limit, NodeCounts partial)
    : Error("scene would exceed max_nodes = " + std::to_string(limit) + " (volumes " +
            std::to_string(partial.volumes) + ", tracks " + std::to_string(partial.tracks) + ", segments " +
            std::to_string(partial.segments) + ", hit groups " + std::to_string(partial.hit_groups) + " so far)"),
      limit_(limit),
      partial_(partial) {}

Style default_style(StyleKind kind, const Rgba& volume_color) {
  switch (kind) {
    case StyleKind::track: return {{1, 1, 0, 1}, 2.0, 1.0, true};
    case StyleKind::hit: return {{1, 0, 0, 1}, 1.0, 3.0, true};
    case StyleKind::segment: return {{0, 1, 1, 1}, 2.0, 1.0, true};
    case StyleKind::volume: return {volume_color, 1.0, 1.0, true};
  }
  return {};
}

namespace {

Style restyle(Style base, const std::optional<StyleOverride>& o) {
  if (o) {
    base.color = o->color;
    base.line_width = o->line_width;
  }
  return base;
}

void extend(Bounds& b, bool& first, const Vec3& p) {
  if (first) {
    b.min = b.max = p;
    first = false;
    return;
  }
  b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y), std::min(b.min.z, p.z)};
  b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y), std::max(b.max.z, p.z)};
}

const std::vector<Vec3>& vertices_of(const NodeGeometry& g) {
  if (const auto* m = std::get_if<Mesh>(&g)) return m->vertices;
  if (const auto* l = std::get_if<Polyline3>(&g)) return l->points;
  return std::get<PointSet>(g).points;
}

// Path range of `t` that stays inside the clip cylinder, or none if the track
// starts outside it.
std::optional<HelixTrack> clip_track(HelixTrack t, const RenderOptions& opt) {
  if (opt.clip_r) {
    const Vec3 start = point_at(t, t.s_min);
    if (std::hypot(start.x, start.y) > *opt.clip_r) return std::nullopt;
    if (auto s = next_cylinder_crossing(t, *opt.clip_r, t.s_min)) t.s_max = std::min(t.s_max, *s);
  }
  if (opt.clip_z) {
    const Vec3 start = point_at(t, t.s_min);
    if (std::fabs(start.z) > *opt.clip_z) return std::nullopt;
    const double wall = std::sin(t.lambda) >= 0 ? *opt.clip_z : -*opt.clip_z;
    if (auto s = plane_z_crossing(t, wall)) t.s_max = std::min(t.s_max, *s);
  }
  if (!(t.s_max > t.s_min)) return std::nullopt;
  return t;
}

class SceneBuilder {
 public:
  explicit SceneBuilder(std::size_t max_nodes) : max_nodes_(max_nodes) {}

  void add(std::string path, NodeGeometry geometry, Style style, SourceRef source, std::size_t NodeCounts::*bucket) {
    if (counts_.total() + 1 > max_nodes_) throw NodeLimitError(max_nodes_, counts_);
    ++(counts_.*bucket);
    nodes_.push_back({static_cast<std::int64_t>(nodes_.size()), std::move(path), std::move(geometry), style,
                      std::move(source)});
  }

  void add_detector(const DetectorModel& detector, const RenderOptions& opt) {
    for (auto& placed : flatten_detector(detector, opt.detector_selection, opt.eps)) {
      SourceRef src{SourceKind::volume, 0, placed.path};
      add(placed.path, std::move(placed.mesh), default_style(StyleKind::volume, placed.color), std::move(src),
          &NodeCounts::volumes);
    }
  }

  Scene finish(std::string name) {
    Scene s{std::move(name), compute_bounds(nodes_), std::move(nodes_)};
    return s;
  }

  [[nodiscard]] const NodeCounts& counts() const { return counts_; }

 private:
  std::size_t max_nodes_;
  NodeCounts counts_;
  std::vector<SceneNode> nodes_;
};

template <typename T>
std::vector<const T*> sorted_by_id(const std::vector<T>& items) {
  std::vector<const T*> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(&it);
  std::stable_sort(out.begin(), out.end(), [](const T* a, const T* b) { return a->id < b->id; });
  return out;
}

}  // namespace

Bounds compute_bounds(const std::vector<SceneNode>& nodes) {
  Bounds b;
  bool first = true;
  for (const auto& n : nodes)
    for (const Vec3& p : vertices_of(n.geometry)) extend(b, first, p);
  return b;
}

Scene make_scene(const DetectorModel& detector, const Event& event, const FilterChain& chain,
                 const RenderOptions& opt, double b_field, SceneStats* stats) {
  if (!(opt.eps > 0)) throw Error("tessellation tolerance must be > 0");
  for (const auto& link : chain.links)
    if (!link.compiled) throw Error("filter '" + link.def.name + "' has not been type checked");

  SceneStats local;
  SceneBuilder builder(opt.max_nodes);
  builder.add_detector(detector, opt);

  if (opt.kinds.tracks) {
    for (const HelixTrack* t : sorted_by_id(event.tracks)) {
      const ChainDecision d = apply_chain(chain, ObjectKind::track, track_attributes(*t, b_field));
      local.missing_attributes += d.missing_attributes;
      if (!d.accepted) continue;
      const auto clipped = clip_track(*t, opt);
      if (!clipped) {
        ++local.clipped_away;
        continue;
      }
      builder.add("event/tracks/" + std::to_string(t->id), tessellate_helix(*clipped, opt.eps),
                  restyle(default_style(StyleKind::track), d.style), {SourceKind::track, t->id, {}},
                  &NodeCounts::tracks);
    }
  }

  if (opt.kinds.segments) {
    for (const Segment* s : sorted_by_id(event.segments)) {
      const ChainDecision d = apply_chain(chain, ObjectKind::segment, segment_attributes(*s));
      local.missing_attributes += d.missing_attributes;
      if (!d.accepted) continue;
      builder.add("event/segments/" + std::to_string(s->id), Polyline3{s->points},
                  restyle(default_style(StyleKind::segment), d.style), {SourceKind::segment, s->id, {}},
                  &NodeCounts::segments);
    }
  }

  if (opt.kinds.hits) {
    // Groups keyed by (detector code, resolved style); map order gives the
    // ascending-detector emission order.
    std::map<std::tuple<int, Style>, PointSet> groups;
    for (const Hit* h : sorted_by_id(event.hits)) {
      const ChainDecision d = apply_chain(chain, ObjectKind::hit, hit_attributes(*h));
      local.missing_attributes += d.missing_attributes;
      if (!d.accepted) continue;
      auto& group = groups[{h->detector, restyle(default_style(StyleKind::hit), d.style)}];
      group.points.push_back(h->position);
      group.source_ids.push_back(h->id);
    }
    std::map<int, int> per_detector;
    for (const auto& [key, points] : groups) ++per_detector[std::get<0>(key)];
    std::map<int, int> seen;
    for (auto& [key, points] : groups) {
      const int det = std::get<0>(key);
      std::string path = "event/hits/" + std::to_string(det);
      const int k = seen[det]++;
      if (per_detector[det] > 1) path += "/" + std::to_string(k);
      builder.add(std::move(path), std::move(points), std::get<1>(key), {SourceKind::hit, -1, {}},
                  &NodeCounts::hit_groups);
    }
  }

  local.counts = builder.counts();
  if (stats) *stats = local;
  return builder.finish("event " + std::to_string(event.index));
}

Scene make_detector_scene(const DetectorModel& detector, const RenderOptions& opt) {
  if (!(opt.eps > 0)) throw Error("tessellation tolerance must be > 0");
  SceneBuilder builder(opt.max_nodes);
  builder.add_detector(detector, opt);
  return builder.finish("detector");
}

std::optional<SourceRef> pick(const Scene& scene, std::int64_t node_id, std::optional<std::size_t> point) {
  const auto it = std::find_if(scene.nodes.begin(), scene.nodes.end(),
                               [&](const SceneNode& n) { return n.id == node_id; });
  if (it == scene.nodes.end()) return std::nullopt;
  if (const auto* ps = std::get_if<PointSet>(&it->geometry)) {
    if (!point) return it->source;
    if (*point >= ps->source_ids.size()) return std::nullopt;
    return SourceRef{SourceKind::hit, ps->source_ids[*point], {}};
  }
  return it->source;
}

}  // namespace evd
