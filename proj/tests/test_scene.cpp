#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "evd/error.hpp"
#include "evd/formats.hpp"
#include "evd/scene.hpp"
#include "evd/toy.hpp"

using namespace evd;

namespace {

struct Toy {
  DetectorModel detector;
  EventSet events;
  const Event& event() const { return events.events.at(0); }
};

Toy toy() {
  auto [d, e] = generate_toy({});
  return {std::move(d), std::move(e)};
}

ChainLink link(const std::string& name, AppliesTo to, const std::string& expr, std::optional<StyleOverride> style = {}) {
  FilterDef def;
  def.name = name;
  def.applies_to = to;
  def.expression = expr;
  def.style_override = style;
  return {def, compile_filter(def), {}, true};
}

std::size_t count_kind(const Scene& s, SourceKind k) {
  std::size_t n = 0;
  for (const auto& node : s.nodes)
    if (node.source.kind == k) ++n;
  return n;
}

// Source references of event objects, expanding point sets per point.
std::set<std::pair<int, std::int64_t>> event_sources(const Scene& s) {
  std::set<std::pair<int, std::int64_t>> out;
  for (const auto& n : s.nodes) {
    if (const auto* ps = std::get_if<PointSet>(&n.geometry)) {
      for (auto id : ps->source_ids) out.insert({static_cast<int>(SourceKind::hit), id});
    } else if (n.source.kind != SourceKind::volume) {
      out.insert({static_cast<int>(n.source.kind), n.source.id});
    }
  }
  return out;
}

std::vector<Vec3> all_vertices(const Scene& s) {
  std::vector<Vec3> out;
  for (const auto& n : s.nodes) {
    if (const auto* m = std::get_if<Mesh>(&n.geometry)) out.insert(out.end(), m->vertices.begin(), m->vertices.end());
    if (const auto* l = std::get_if<Polyline3>(&n.geometry)) out.insert(out.end(), l->points.begin(), l->points.end());
    if (const auto* p = std::get_if<PointSet>(&n.geometry)) out.insert(out.end(), p->points.begin(), p->points.end());
  }
  return out;
}

}  // namespace

TEST(DefaultStyle, Table) {
  EXPECT_EQ(default_style(StyleKind::track).color, (Rgba{1, 1, 0, 1}));
  EXPECT_EQ(default_style(StyleKind::track).line_width, 2);
  EXPECT_EQ(default_style(StyleKind::hit).point_size, 3);
  EXPECT_EQ(default_style(StyleKind::segment).color, (Rgba{0, 1, 1, 1}));
  const Rgba c{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(default_style(StyleKind::volume, c).color, c);
  EXPECT_EQ(default_style(StyleKind::volume, c).line_width, 1);
}

TEST(MakeScene, ToyNodeCounts) {
  const Toy t = toy();
  SceneStats stats;
  const Scene s = make_scene(t.detector, t.event(), {}, {}, t.events.b_field, &stats);
  // 4 layers + 5 tracks + one hit group per layer (all hits share one style).
  std::set<int> detectors;
  for (const auto& h : t.event().hits) detectors.insert(h.detector);
  EXPECT_EQ(s.nodes.size(), 4 + 5 + detectors.size());
  EXPECT_EQ(stats.counts.total(), s.nodes.size());
  EXPECT_EQ(s.name, "event 0");
  for (std::size_t i = 0; i < s.nodes.size(); ++i) EXPECT_EQ(s.nodes[i].id, static_cast<std::int64_t>(i));
}

TEST(MakeScene, NodeOrder) {
  const Toy t = toy();
  const Scene s = make_scene(t.detector, t.event(), {}, {}, t.events.b_field);
  EXPECT_EQ(s.nodes[0].path, "detector/barrel/layer1");
  EXPECT_EQ(s.nodes[3].path, "detector/barrel/layer4");
  for (int i = 0; i < 5; ++i) EXPECT_EQ(s.nodes[4 + i].path, "event/tracks/" + std::to_string(i + 1));
  EXPECT_EQ(s.nodes[9].path, "event/hits/1");
  EXPECT_EQ(s.nodes.back().path, "event/hits/4");
}

TEST(MakeScene, HighPtCutRemovesTracksOnly) {
  const Toy t = toy();
  const Scene base = make_scene(t.detector, t.event(), {}, {}, t.events.b_field);
  FilterChain c{{link("hard", AppliesTo::track, "pt > 10")}};
  const Scene cut = make_scene(t.detector, t.event(), c, {}, t.events.b_field);
  EXPECT_EQ(count_kind(cut, SourceKind::track), 0u);
  EXPECT_EQ(count_kind(cut, SourceKind::hit), count_kind(base, SourceKind::hit));
  EXPECT_EQ(count_kind(cut, SourceKind::segment), count_kind(base, SourceKind::segment));
}

TEST(MakeScene, EmptySceneHasDegenerateBounds) {
  const Toy t = toy();
  RenderOptions opt;
  opt.kinds = KindSet::none();
  opt.detector_selection = {"nomatch"};
  const Scene s = make_scene(t.detector, t.event(), {}, opt, t.events.b_field);
  EXPECT_TRUE(s.nodes.empty());
  EXPECT_EQ(s.bounds.min, (Vec3{0, 0, 0}));
  EXPECT_EQ(s.bounds.max, (Vec3{0, 0, 0}));
}

TEST(MakeScene, HitOverrideRestylesGroups) {
  const Toy t = toy();
  const StyleOverride green{{0, 1, 0, 1}, 1};
  FilterChain c{{link("tag", AppliesTo::hit, "r > 0", green)}};
  const Scene s = make_scene(t.detector, t.event(), c, {}, t.events.b_field);
  std::size_t groups = 0;
  for (const auto& n : s.nodes)
    if (n.source.kind == SourceKind::hit) {
      ++groups;
      EXPECT_EQ(n.style.color, green.color);
      EXPECT_EQ(n.style.point_size, 3);
    }
  EXPECT_EQ(groups, 4u);
}

TEST(MakeScene, SubsetLawUnderChainExtension) {
  const Toy t = toy();
  const std::vector<ChainLink> links = {link("a", AppliesTo::track, "pt > 0.6"), link("b", AppliesTo::hit, "z > 0"),
                                        link("c", AppliesTo::all, "id > 2"), link("d", AppliesTo::track, "eta < 0.5")};
  FilterChain chain;
  auto prev = event_sources(make_scene(t.detector, t.event(), chain, {}, t.events.b_field));
  for (const auto& l : links) {
    chain.links.push_back(l);
    const auto now = event_sources(make_scene(t.detector, t.event(), chain, {}, t.events.b_field));
    for (const auto& src : now) EXPECT_TRUE(prev.count(src));
    prev = now;
  }
}

TEST(MakeScene, ClippingSoundness) {
  const Toy t = toy();
  for (double R : {5.0, 15.0, 25.0}) {
    RenderOptions opt;
    opt.clip_r = R;
    const Scene s = make_scene(t.detector, t.event(), {}, opt, t.events.b_field);
    for (const auto& n : s.nodes)
      if (const auto* l = std::get_if<Polyline3>(&n.geometry))
        for (const Vec3& p : l->points) EXPECT_LE(std::hypot(p.x, p.y), R + opt.eps);
  }
  RenderOptions z;
  z.clip_z = 1.0;
  const Scene s = make_scene(t.detector, t.event(), {}, z, t.events.b_field);
  for (const auto& n : s.nodes)
    if (n.source.kind == SourceKind::track)
      for (const Vec3& p : std::get<Polyline3>(n.geometry).points) EXPECT_LE(std::fabs(p.z), 1.0 + 1e-9);
}

TEST(MakeScene, KindsExclusion) {
  const Toy t = toy();
  RenderOptions opt;
  opt.kinds = parse_kinds("tracks");
  const Scene s = make_scene(t.detector, t.event(), {}, opt, t.events.b_field);
  EXPECT_EQ(count_kind(s, SourceKind::hit), 0u);
  EXPECT_EQ(count_kind(s, SourceKind::track), 5u);
  EXPECT_THROW(parse_kinds("tracks,jets"), Error);
}

TEST(MakeScene, BoundsAreTight) {
  const Toy t = toy();
  const Scene s = make_scene(t.detector, t.event(), {}, {}, t.events.b_field);
  const auto verts = all_vertices(s);
  for (const Vec3& v : verts) {
    EXPECT_LE(s.bounds.min.x, v.x);
    EXPECT_GE(s.bounds.max.x, v.x);
    EXPECT_LE(s.bounds.min.z, v.z);
    EXPECT_GE(s.bounds.max.z, v.z);
  }
  auto attained = [&](auto get, double target) {
    return std::any_of(verts.begin(), verts.end(), [&](const Vec3& v) { return get(v) == target; });
  };
  EXPECT_TRUE(attained([](const Vec3& v) { return v.x; }, s.bounds.min.x));
  EXPECT_TRUE(attained([](const Vec3& v) { return v.y; }, s.bounds.max.y));
  EXPECT_TRUE(attained([](const Vec3& v) { return v.z; }, s.bounds.max.z));
}

TEST(MakeScene, NodeLimit) {
  const Toy t = toy();
  RenderOptions opt;
  opt.max_nodes = 6;
  try {
    make_scene(t.detector, t.event(), {}, opt, t.events.b_field);
    FAIL();
  } catch (const NodeLimitError& e) {
    EXPECT_EQ(e.limit(), 6u);
    EXPECT_EQ(e.partial().volumes, 4u);
    EXPECT_EQ(e.partial().tracks, 2u);
  }
}

TEST(MakeScene, RejectsUncompiledFilter) {
  const Toy t = toy();
  FilterChain c{{link("a", AppliesTo::track, "pt > 1")}};
  c.links[0].compiled.reset();
  EXPECT_THROW(make_scene(t.detector, t.event(), c, {}, t.events.b_field), Error);
}

TEST(MakeScene, Deterministic) {
  const Toy t = toy();
  EXPECT_EQ(write_scene_json(make_scene(t.detector, t.event(), {}, {}, t.events.b_field)),
            write_scene_json(make_scene(t.detector, t.event(), {}, {}, t.events.b_field)));
}

TEST(Pick, Sources) {
  const Toy t = toy();
  const Scene s = make_scene(t.detector, t.event(), {}, {}, t.events.b_field);
  EXPECT_EQ(pick(s, 0), (SourceRef{SourceKind::volume, 0, "detector/barrel/layer1"}));
  EXPECT_EQ(pick(s, 4), (SourceRef{SourceKind::track, 1, ""}));
  EXPECT_FALSE(pick(s, 999));
  const auto& hits = std::get<PointSet>(s.nodes[9].geometry);
  EXPECT_EQ(pick(s, 9, 0)->id, hits.source_ids[0]);
  EXPECT_FALSE(pick(s, 9, hits.points.size()));
}

TEST(DetectorScene, OnlyVolumes) {
  const Toy t = toy();
  RenderOptions opt;
  opt.detector_selection = {"detector/barrel/layer2"};
  const Scene s = make_detector_scene(t.detector, opt);
  EXPECT_EQ(s.name, "detector");
  ASSERT_EQ(s.nodes.size(), 1u);
  EXPECT_EQ(s.nodes[0].path, "detector/barrel/layer2");
}
