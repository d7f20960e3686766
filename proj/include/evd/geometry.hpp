#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evd/model.hpp"
#include "evd/vec.hpp"

namespace evd {

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Rigid transform: x -> rotation * x + translation.
struct Transform {
  Mat3 rotation = Mat3::identity();
  Vec3 translation;

  [[nodiscard]] Vec3 apply(Vec3 p) const { return rotation * p + translation; }

  friend bool operator==(const Transform&, const Transform&) = default;
};

/// parent after child: rotation = Rp*Rc, translation = Rp*tc + tp.
Transform compose(const Transform& parent, const Transform& child);
Transform inverse(const Transform& t);

/// Azimuthal segment count for a circle of `radius` at sagitta tolerance eps.
std::size_t azimuthal_segments(double radius, double eps);

/// Closed, outward-oriented triangle mesh of a shape in its local frame.
/// Throws evd::Error when eps <= 0.
Mesh tessellate_shape(const Shape& shape, double eps);

struct PlacedMesh {
  std::string path;
  Mesh mesh;  // world coordinates
  Rgba color;
  bool visible = true;

  friend bool operator==(const PlacedMesh&, const PlacedMesh&) = default;
};

/// Path glob: '*' matches within one path component, a component of '**'
/// matches any number (including zero) of components.
class PathGlob {
 public:
  /// Throws evd::Error naming the glob when it is malformed.
  explicit PathGlob(std::string pattern);

  [[nodiscard]] bool matches(std::string_view path) const;
  [[nodiscard]] const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::vector<std::string> parts_;
};

/// Depth-first list of placed meshes for visible, shape-bearing volumes that
/// match any of `selection` (empty selection selects everything).
std::vector<PlacedMesh> flatten_detector(const DetectorModel& detector,
                                         const std::vector<std::string>& selection, double eps);

// Mesh diagnostics used by tests and `evd validate`.
double signed_volume(const Mesh& mesh);
/// True when every undirected edge is used by exactly two triangles, once in
/// each direction.
bool is_watertight(const Mesh& mesh);
std::size_t edge_count(const Mesh& mesh);

}  // namespace evd
