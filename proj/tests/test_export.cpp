#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "evd/error.hpp"
#include "evd/export.hpp"
#include "evd/geometry.hpp"
#include "evd/toy.hpp"

using namespace evd;

namespace {

SceneNode node(std::int64_t id, std::string path, NodeGeometry g) {
  SceneNode n;
  n.id = id;
  n.path = std::move(path);
  n.geometry = std::move(g);
  n.style = default_style(StyleKind::track);
  return n;
}

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Obj, TwoPointPolyline) {
  Scene s;
  s.nodes.push_back(node(0, "event/tracks/1", Polyline3{{{0, 0, 0}, {1, 2.5, -3}}}));
  EXPECT_EQ(write_obj(s),
            "o event/tracks/1\n"
            "v 0.000000 0.000000 0.000000\n"
            "v 1.000000 2.500000 -3.000000\n"
            "l 1 2\n");
}

TEST(Obj, BoxAndGlobalIndices) {
  Scene s;
  s.nodes.push_back(node(0, "a", tessellate_shape(Box{1, 1, 1}, 0.1)));
  s.nodes.push_back(node(1, "b", Polyline3{{{-0.0, 1e-9, 0}, {1, 1, 1}}}));
  s.nodes.push_back(node(2, "c", PointSet{{{5, 5, 5}}, {7}}));
  const std::string obj = write_obj(s);
  EXPECT_EQ(count_lines(obj, "v "), 11u);
  EXPECT_EQ(count_lines(obj, "f "), 12u);
  EXPECT_NE(obj.find("l 9 10\n"), std::string::npos);
  EXPECT_NE(obj.find("p 11\n"), std::string::npos);
  EXPECT_EQ(obj.find("-0.000000"), std::string::npos);
  // Every face index refers to a vertex of the box.
  std::regex face(R"(f (\d+) (\d+) (\d+))");
  for (std::sregex_iterator it(obj.begin(), obj.end(), face), end; it != end; ++it)
    for (int k = 1; k <= 3; ++k) {
      const int i = std::stoi((*it)[k]);
      EXPECT_GE(i, 1);
      EXPECT_LE(i, 8);
    }
}

TEST(Obj, DegenerateGeometry) {
  Scene s;
  s.nodes.push_back(node(0, "one", Polyline3{{{1, 1, 1}}}));
  s.nodes.push_back(node(1, "none", PointSet{}));
  EXPECT_EQ(write_obj(s), "o one\nv 1.000000 1.000000 1.000000\no none\n");
}

TEST(Svg, PointProjection) {
  Scene s;
  SceneNode n = node(0, "event/hits/1", PointSet{{{1, 2, 3}}, {1}});
  n.style = default_style(StyleKind::hit);
  s.nodes.push_back(n);
  const std::string xy = write_svg(s, Projection::xy);
  EXPECT_NE(xy.find(R"(<circle cx="1.000" cy="2.000")"), std::string::npos) << xy;
  const std::string zx = write_svg(s, Projection::zx);
  EXPECT_NE(zx.find(R"(<circle cx="3.000" cy="1.000")"), std::string::npos);
  const std::string rz = write_svg(s, Projection::rz);
  EXPECT_NE(rz.find(R"(<circle cx="3.000" cy="2.236")"), std::string::npos);
}

TEST(Svg, EmptyScene) {
  Scene s;
  s.name = "a<b";
  const std::string svg = write_svg(s, Projection::xy);
  EXPECT_NE(svg.find("<title>a&lt;b</title>"), std::string::npos);
  EXPECT_NE(svg.find("<g id=\"content\" transform=\"scale(1,-1)\">\n</g>"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(Svg, ElementsPerNodeType) {
  const auto [det, events] = generate_toy({});
  const Scene scene = make_scene(det, events.events[0], {}, {}, events.b_field);
  const std::string svg = write_svg(scene, Projection::xy);
  EXPECT_EQ(count_substr(svg, "<g data-path="), scene.nodes.size());
  EXPECT_EQ(count_substr(svg, "<path d="), 5u);
  EXPECT_EQ(count_substr(svg, "<circle "), events.events[0].hits.size());
  EXPECT_EQ(count_substr(svg, "<rect "), 4u);
  EXPECT_EQ(write_svg(scene, Projection::xy), svg);
  EXPECT_EQ(write_obj(scene), write_obj(scene));
}

TEST(Svg, InvisibleNodesAreSkipped) {
  Scene s;
  SceneNode n = node(0, "hidden", Polyline3{{{0, 0, 0}, {1, 1, 0}}});
  n.style.visible = false;
  s.nodes.push_back(n);
  EXPECT_EQ(write_svg(s, Projection::xy).find("data-path"), std::string::npos);
}

TEST(Svg, OpenMeshDrawsBoundary) {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  Scene s;
  s.nodes.push_back(node(0, "tri", m));
  EXPECT_EQ(count_substr(write_svg(s, Projection::xy), "<line "), 3u);
}

TEST(Projection, Parse) {
  EXPECT_EQ(parse_projection("rz"), Projection::rz);
  EXPECT_EQ(to_string(Projection::zx), "zx");
  EXPECT_THROW(parse_projection("yz"), Error);
}
