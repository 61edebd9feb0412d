#include "flatmarch/surface.hpp"

namespace flatmarch {

Point3 apply_isometry(const Isometry2& iso, Point3 p) { return lift(iso.apply(p.xy()), p.z); }

Direction3 apply_isometry_linear(const Isometry2& iso, Direction3 v) {
  return lift(iso.apply_linear(v.xy()), v.z);
}

std::optional<Ray3> teleport_ray(const SceneConfig& scene, const Ray3& ray, std::size_t wall) {
  const auto& settings = scene.render;
  if (ray.teleports >= settings.max_teleports) return std::nullopt;
  const auto& rule = scene.walls[wall];
  const DirectedEdge target = scene.wall_edge(rule.partner);
  const Vec2 outward = scene.wall_outward_normal(rule.partner);

  const Point3 mapped = apply_isometry(rule.isometry, ray.origin);
  const double outside = dot(mapped.xy() - target.start, outward);
  const Vec2 placed = mapped.xy() - outward * (outside + 2.0 * settings.epsilon);

  Ray3 out = ray;
  out.origin = {placed.x, placed.y, ray.origin.z};
  out.direction = normalize(apply_isometry_linear(rule.isometry, ray.direction));
  out.teleports += 1;
  out.transmittance *= settings.wall_transmittance;
  return out;
}

std::optional<Ray3> reflect_ray(const Ray3& ray, Direction3 inward,
                                const RenderSettings& settings) {
  if (ray.teleports >= settings.max_teleports) return std::nullopt;
  Ray3 out = ray;
  out.direction = ray.direction - inward * (2.0 * dot(ray.direction, inward));
  out.origin = ray.origin + inward * (2.0 * settings.epsilon);
  out.teleports += 1;
  out.transmittance *= settings.mirror_attenuation;
  return out;
}

std::optional<Ray3> wrap_vertical(const Ray3& ray, double period, const RenderSettings& settings) {
  if (ray.teleports >= settings.max_teleports) return std::nullopt;
  Ray3 out = ray;
  const bool through_floor = ray.origin.z < 0.5 * period;
  out.origin.z = through_floor ? period - 2.0 * settings.epsilon : 2.0 * settings.epsilon;
  out.teleports += 1;
  return out;
}

}  // namespace flatmarch
