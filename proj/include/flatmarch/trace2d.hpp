#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "flatmarch/scene.hpp"
#include "flatmarch/vec.hpp"

namespace flatmarch {

/// One straight piece of a traced path, in the coordinates of `polygon`.
struct TraceSegment {
  std::size_t polygon = 0;
  Point2 start{};
  Point2 end{};
  std::size_t index = 0;
};

struct LengthBudget {
  double max_length = 0.0;
};
struct CrossingBudget {
  int max_crossings = 0;
};
using TraceBudget = std::variant<LengthBudget, CrossingBudget>;

enum class TraceStatus {
  budget_reached,
  solid_wall,  // ran into an opaque wall
  hit_vertex,  // reached a cone point or a vertex with no well-defined continuation
  degenerate,  // numerical failure to find an exit
};

std::string_view to_string(TraceStatus status);

struct TraceResult {
  std::vector<TraceSegment> segments;
  TraceStatus status = TraceStatus::budget_reached;
  std::size_t end_polygon = 0;
  Point2 end_point{};
  Direction2 end_direction{};
  double length = 0.0;
  int crossings = 0;  // boundary events applied (portal, mirror, regular vertex)
};

/// Straight-line flow on the flat surface. Portal walls carry the path through
/// their gluing, mirrors reflect it, solid walls stop it. Passing within 1e-9 of
/// a vertex continues only when the vertex is a regular point of the surface
/// (cone angle 2pi, reached through orientation-preserving portals); otherwise
/// the trace stops with `hit_vertex`.
///
/// With a crossing budget the trace stops right after the last boundary event,
/// so `end_point`/`end_direction` describe the state after it.
///
/// Throws SceneError when `start` is not strictly inside `polygon` or `direction`
/// is not unit length.
TraceResult trace_geodesic_2d(const SceneConfig& scene, std::size_t polygon, Point2 start,
                              Direction2 direction, TraceBudget budget);

}  // namespace flatmarch
