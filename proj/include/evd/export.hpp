#pragma once

// Scene exporters for headless inspection. Both are deterministic byte
// functions of the scene.

#include <string>
#include <string_view>

#include "evd/scene.hpp"

namespace evd {

/// Wavefront OBJ: "o <path>" per node, vertices with six decimals, global
/// 1-based indices in emission order. Meshes become "f", polylines "l",
/// point sets "p".
std::string write_obj(const Scene& scene);

enum class Projection { xy, zx, rz };

Projection parse_projection(std::string_view name);
std::string_view to_string(Projection p);

/// Orthographic SVG. xy drops z, zx plots (z, x), rz plots (z, hypot(x, y)).
/// Closed meshes are drawn as their projected bounding rectangle, open
/// meshes as their boundary edges. Coordinates carry three decimals.
std::string write_svg(const Scene& scene, Projection projection);

}  // namespace evd
