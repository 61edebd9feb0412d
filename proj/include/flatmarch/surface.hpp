#pragma once

#include <cstddef>
#include <optional>

#include "flatmarch/isometry.hpp"
#include "flatmarch/scene.hpp"
#include "flatmarch/vec.hpp"

namespace flatmarch {

/// Marching state of one ray.
struct Ray3 {
  Point3 origin{};
  Direction3 direction{1.0, 0.0, 0.0};
  double traveled = 0.0;
  int teleports = 0;  // portal crossings, reflections and vertical wraps
  double transmittance = 1.0;
};

/// Maps the horizontal components by `iso`; z is untouched.
Point3 apply_isometry(const Isometry2& iso, Point3 p);
Direction3 apply_isometry_linear(const Isometry2& iso, Direction3 v);

/// Carries a ray through portal `wall`: the origin is mapped by the gluing,
/// snapped onto the partner wall's plane and pushed 2*epsilon inward; the
/// direction's horizontal part is mapped by the linear part. The push is not
/// counted in `traveled`. Returns nullopt when the teleport budget is spent.
std::optional<Ray3> teleport_ray(const SceneConfig& scene, const Ray3& ray, std::size_t wall);

/// Ideal mirror bounce off a wall with inward unit normal `inward`.
std::optional<Ray3> reflect_ray(const Ray3& ray, Direction3 inward, const RenderSettings& settings);

/// Vertical wrap of a prism room: a ray leaving through the floor re-enters
/// 2*epsilon below the ceiling and vice versa. The side is chosen by which
/// half of the period the origin is in.
std::optional<Ray3> wrap_vertical(const Ray3& ray, double period, const RenderSettings& settings);

}  // namespace flatmarch
