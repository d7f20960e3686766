#pragma once

// The display maker: combines detector and event geometry, passed through
// the filter chain, into one flat, deterministic scene.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evd/error.hpp"
#include "evd/filter.hpp"
#include "evd/geometry.hpp"
#include "evd/helix.hpp"
#include "evd/model.hpp"

namespace evd {

struct Style {
  Rgba color;
  double line_width = 1.0;
  double point_size = 1.0;
  bool visible = true;

  friend bool operator==(const Style&, const Style&) = default;
  friend auto operator<=>(const Style&, const Style&) = default;
};

struct PointSet {
  std::vector<Vec3> points;
  std::vector<std::int64_t> source_ids;  // per point, parallel to `points`

  friend bool operator==(const PointSet&, const PointSet&) = default;
};

using NodeGeometry = std::variant<Mesh, Polyline3, PointSet>;

enum class SourceKind { volume, track, hit, segment };

std::string_view to_string(SourceKind kind);
SourceKind parse_source_kind(std::string_view name);

struct SourceRef {
  SourceKind kind = SourceKind::volume;
  std::int64_t id = 0;  // object id; unused for volumes
  std::string path;     // volume path; empty for event objects

  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct SceneNode {
  std::int64_t id = 0;
  std::string path;
  NodeGeometry geometry;
  Style style;
  SourceRef source;  // for point sets, kind hit with id -1; see PointSet::source_ids

  friend bool operator==(const SceneNode&, const SceneNode&) = default;
};

struct Bounds {
  Vec3 min;
  Vec3 max;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Scene {
  std::string name;
  Bounds bounds;
  std::vector<SceneNode> nodes;

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct KindSet {
  bool tracks = true;
  bool hits = true;
  bool segments = true;

  static KindSet none() { return {false, false, false}; }
  friend bool operator==(const KindSet&, const KindSet&) = default;
};

/// Parses a comma-separated list of "tracks", "hits", "segments".
KindSet parse_kinds(std::string_view list);

struct RenderOptions {
  double eps = 0.1;
  KindSet kinds;
  std::vector<std::string> detector_selection;
  std::optional<double> clip_r;
  std::optional<double> clip_z;
  std::size_t max_nodes = 100000;
};

struct NodeCounts {
  std::size_t volumes = 0;
  std::size_t tracks = 0;
  std::size_t segments = 0;
  std::size_t hit_groups = 0;

  [[nodiscard]] std::size_t total() const { return volumes + tracks + segments + hit_groups; }
};

class NodeLimitError : public Error {
 public:
  NodeLimitError(std::size_t limit, NodeCounts partial);

  [[nodiscard]] std::size_t limit() const { return limit_; }
  [[nodiscard]] const NodeCounts& partial() const { return partial_; }

 private:
  std::size_t limit_;
  NodeCounts partial_;
};

enum class StyleKind { track, hit, segment, volume };

/// Fixed defaults: tracks yellow width 2, hits red size 3, segments cyan
/// width 2. Volumes keep their declared color at width 1.
Style default_style(StyleKind kind, const Rgba& volume_color = {});

/// Diagnostics gathered while building a scene.
struct SceneStats {
  NodeCounts counts;
  std::size_t missing_attributes = 0;  // objects rejected for lacking an extra attribute
  std::size_t clipped_away = 0;        // accepted tracks entirely outside the clip volume
};

Scene make_scene(const DetectorModel& detector, const Event& event, const FilterChain& chain,
                 const RenderOptions& options, double b_field, SceneStats* stats = nullptr);

/// Detector-only scene.
Scene make_detector_scene(const DetectorModel& detector, const RenderOptions& options);

/// Source of a node, or of one point of a point-set node when `point` is set.
std::optional<SourceRef> pick(const Scene& scene, std::int64_t node_id, std::optional<std::size_t> point = {});

/// Axis-aligned box around every vertex; degenerate at the origin when empty.
Bounds compute_bounds(const std::vector<SceneNode>& nodes);

}  // namespace evd
