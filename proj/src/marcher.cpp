#include "flatmarch/marcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatmarch {

namespace {

const Rgb kFlatShade{0.6, 0.6, 0.6};

// Ray length to the floor or ceiling plane it is heading for.
double distance_to_wrap_plane(const Ray3& ray, double period) {
  const double dz = ray.direction.z;
  if (dz > 0.0) return std::max(0.0, (period - ray.origin.z) / dz);
  if (dz < 0.0) return std::max(0.0, -ray.origin.z / dz);
  return std::numeric_limits<double>::infinity();
}

// Advance onto the plane the ray is about to cross. `outward` is the plane normal
// facing the ray, `gap` the distance to the plane.
void approach_plane(Ray3& r, Vec3 outward, double gap) {
  const double into = dot(r.direction, outward);
  if (into < kAlongRayMinCos || !(gap > 0.0)) return;
  r.origin += r.direction * (gap / into);
  r.traveled += gap / into;
}

// Replace the 2 eps push along `inward` by the same clearance along the new direction.
void leave_plane(Ray3& r, Vec3 inward, double eps) {
  const double into = dot(r.direction, inward);
  if (into < kAlongRayMinCos) return;
  r.origin += r.direction * (2.0 * eps / into) - inward * (2.0 * eps);
  r.traveled += 2.0 * eps / into;
}

HitResult finish(HitStatus status, const Ray3& ray, SurfaceTag tag, int steps) {
  HitResult out;
  out.status = status;
  out.point = ray.origin;
  out.direction = ray.direction;
  out.tag = tag;
  out.traveled = ray.traveled;
  out.teleports = ray.teleports;
  out.transmittance = ray.transmittance;
  out.steps = steps;
  return out;
}

}  // namespace

std::string_view to_string(HitStatus status) {
  switch (status) {
    case HitStatus::hit: return "hit";
    case HitStatus::miss: return "miss";
    case HitStatus::budget_exhausted: return "budget_exhausted";
  }
  return "miss";
}

HitResult march(const SceneConfig& scene, const Ray3& ray, const StepObserver& observer) {
  const auto& settings = scene.render;
  const double eps = settings.epsilon;
  Ray3 r = ray;
  int steps = 0;

  auto stop_on_surface = [&](SurfaceTag tag) {
    // Inside the threshold, keep tracing the same surface a little. Grazing rays
    // otherwise stop up to eps / cos short of it.
    // A ray passing tangent to the surface only dips under eps, so keep the
    // closest point seen.
    Ray3 probe = r, best = r;
    double best_d = eps;
    for (int i = 0; i < kRefineSteps; ++i) {
      const TaggedDistance td = eval_scene_sdf(scene, probe.origin, probe.direction);
      if (!(td.tag == tag) || td.distance > eps) break;
      if (td.distance <= best_d) {
        best = probe;
        best_d = td.distance;
      }
      if (td.distance <= eps * kRefineFraction) break;
      probe.origin += probe.direction * td.distance;
      probe.traveled += td.distance;
      ++steps;
      if (scene.prism.enabled && (probe.origin.z < 0.0 || probe.origin.z > scene.prism.period)) break;
    }
    r = best;
    HitResult out = finish(HitStatus::hit, r, tag, steps);
    out.normal = estimate_normal(scene, r.origin);
    return out;
  };

  while (true) {
    if (steps >= settings.max_steps) return finish(HitStatus::budget_exhausted, r, {}, steps);
    const TaggedDistance td = eval_scene_sdf(scene, r.origin, r.direction);
    ++steps;
    if (observer) observer(r, td);

    if (td.distance <= eps) {
      std::optional<Ray3> next;
      switch (td.tag.kind) {
        case SurfaceTag::Kind::object:
        case SurfaceTag::Kind::floor:
        case SurfaceTag::Kind::ceiling:
          return stop_on_surface(td.tag);
        case SurfaceTag::Kind::wall: {
          const auto& rule = scene.walls[td.tag.index];
          if (rule.kind == WallKind::solid) return stop_on_surface(td.tag);
          const Vec2 n = scene.wall_outward_normal(td.tag.index);
          const double gap = -dot(r.origin.xy() - scene.wall_edge(td.tag.index).start, n);
          Ray3 at_wall = r;
          approach_plane(at_wall, {n.x, n.y, 0.0}, gap);
          if (rule.kind == WallKind::portal) {
            next = teleport_ray(scene, at_wall, td.tag.index);
            if (next) {
              const Vec2 m = scene.wall_outward_normal(rule.partner);
              leave_plane(*next, {-m.x, -m.y, 0.0}, eps);
            }
          } else {
            const Vec3 inward{-n.x, -n.y, 0.0};
            next = reflect_ray(at_wall, inward, settings);
            if (next) leave_plane(*next, inward, eps);
          }
          break;
        }
        case SurfaceTag::Kind::none:
          return finish(HitStatus::miss, r, td.tag, steps);
      }
      if (!next) return finish(HitStatus::budget_exhausted, r, td.tag, steps);
      r = *next;
      continue;
    }

    if (scene.prism.enabled) {
      // The wrap planes are not in the SDF; clip the step against them exactly.
      const double to_plane = distance_to_wrap_plane(r, scene.prism.period);
      if (to_plane <= td.distance) {
        r.origin += r.direction * to_plane;
        r.traveled += to_plane;
        if (r.traveled >= settings.max_distance) return finish(HitStatus::miss, r, {}, steps);
        auto wrapped = wrap_vertical(r, scene.prism.period, settings);
        if (!wrapped) return finish(HitStatus::budget_exhausted, r, {}, steps);
        leave_plane(*wrapped, {0.0, 0.0, r.direction.z > 0.0 ? 1.0 : -1.0}, eps);
        r = *wrapped;
        continue;
      }
    }
    if (!std::isfinite(td.distance)) return finish(HitStatus::miss, r, td.tag, steps);
    r.origin += r.direction * td.distance;
    r.traveled += td.distance;
    if (r.traveled >= settings.max_distance) return finish(HitStatus::miss, r, {}, steps);
  }
}

Rgb blend_fog(Rgb base, double transmittance, Rgb fog) {
  return base * transmittance + fog * (1.0 - transmittance);
}

Rgb shade(const SceneConfig& scene, const HitResult& hit) {
  const auto& settings = scene.render;
  if (hit.status != HitStatus::hit) {
    return blend_fog(settings.background, hit.transmittance, settings.fog_color);
  }

  Rgb material{1.0, 1.0, 1.0};
  if (hit.tag.kind == SurfaceTag::Kind::object) material = object_slot_color(scene, hit.tag.index);

  Rgb base = kFlatShade;
  if (hit.normal) {
    const Vec3 n = *hit.normal;
    base = (n + Vec3{1.0, 1.0, 1.0}) * 0.5;
    if (settings.headlight) {
      // Blinn-Phong with the light at the eye: half vector = view vector.
      const double facing = std::max(0.0, -dot(n, hit.direction));
      const double diffuse = 0.35 + 0.65 * facing;
      const double specular = 0.25 * std::pow(facing, 32.0);
      base = base * diffuse + Vec3{specular, specular, specular};
    }
  }
  base = hadamard(base, material);

  if (hit.tag.kind == SurfaceTag::Kind::floor && settings.floor_style == FloorStyle::checker) {
    const auto cell = static_cast<long long>(std::floor(hit.point.x / kCheckerPeriod)) +
                      static_cast<long long>(std::floor(hit.point.y / kCheckerPeriod));
    if (cell % 2 != 0) base = base * 0.8;
  }
  return blend_fog(base, hit.transmittance, settings.fog_color);
}

}  // namespace flatmarch
