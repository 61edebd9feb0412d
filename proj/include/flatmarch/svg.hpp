#pragma once

#include <span>
#include <string>

#include "flatmarch/scene.hpp"
#include "flatmarch/trace2d.hpp"

namespace flatmarch {

/// SVG 1.1 floor plan: polygons, color-matched portal pairs, mirror and solid
/// walls, singular vertices, and the trace as a single path. The viewBox is the
/// polygon bounding box padded by 5% on each side; y points up.
std::string floorplan_svg(const SceneConfig& scene, std::span<const TraceSegment> segments);

/// Writes floorplan_svg to `path`. Throws IoError.
void export_floorplan_svg(const SceneConfig& scene, std::span<const TraceSegment> segments,
                          const std::string& path);

}  // namespace flatmarch
