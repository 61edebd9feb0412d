#include "flatmarch/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

namespace flatmarch {

double sdf_sphere(Point3 p, Point3 center, double radius) { return length(p - center) - radius; }

double sdf_box(Point3 p, Point3 center, Vec3 half_extents) {
  const Vec3 q{std::abs(p.x - center.x) - half_extents.x, std::abs(p.y - center.y) - half_extents.y,
               std::abs(p.z - center.z) - half_extents.z};
  const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
  return length(outside) + std::min(std::max({q.x, q.y, q.z}), 0.0);
}

double sdf_vertical_cylinder(Point3 p, Point2 axis, double radius, double z0, double z1) {
  const double half = 0.5 * (z1 - z0);
  const double mid = 0.5 * (z0 + z1);
  const double radial = length(p.xy() - axis) - radius;
  const double vertical = std::abs(p.z - mid) - half;
  return std::min(std::max(radial, vertical), 0.0) +
         std::hypot(std::max(radial, 0.0), std::max(vertical, 0.0));
}

double sdf_wall(Point3 p, const DirectedEdge& edge, double height) {
  const Vec2 ab = edge.end - edge.start;
  const double t = std::clamp(dot(p.xy() - edge.start, ab) / dot(ab, ab), 0.0, 1.0);
  const Vec2 horizontal = p.xy() - (edge.start + ab * t);
  const double vertical = p.z < 0.0 ? -p.z : (p.z > height ? p.z - height : 0.0);
  return std::sqrt(dot(horizontal, horizontal) + vertical * vertical);
}

double eval_csg(const SdfNode& node, Point3 p) {
  switch (node.op) {
    case CsgOp::leaf:
      switch (node.primitive) {
        case PrimitiveKind::sphere: return sdf_sphere(p, node.center, node.radius);
        case PrimitiveKind::box: return sdf_box(p, node.center, node.half_extents);
        case PrimitiveKind::cylinder:
          return sdf_vertical_cylinder(p, node.center.xy(), node.radius, node.z_min, node.z_max);
      }
      return 0.0;
    case CsgOp::join: {
      double d = eval_csg(node.children[0], p);
      for (std::size_t i = 1; i < node.children.size(); ++i) {
        d = std::min(d, eval_csg(node.children[i], p));
      }
      return d;
    }
    case CsgOp::intersect: {
      double d = eval_csg(node.children[0], p);
      for (std::size_t i = 1; i < node.children.size(); ++i) {
        d = std::max(d, eval_csg(node.children[i], p));
      }
      return d;
    }
    case CsgOp::subtract:
      return std::max(eval_csg(node.children[0], p), -eval_csg(node.children[1], p));
  }
  return 0.0;
}

std::size_t object_slot_count(const SceneConfig& scene) {
  return scene.objects.size() + scene.marker_sites.size();
}

double eval_object_slot(const SceneConfig& scene, std::size_t slot, Point3 p) {
  if (slot < scene.objects.size()) return eval_csg(scene.objects[slot], p);
  const Point2 site = scene.marker_sites[slot - scene.objects.size()];
  return sdf_vertical_cylinder(p, site, scene.singularity_markers.radius, 0.0, scene.height);
}

Rgb object_slot_color(const SceneConfig& scene, std::size_t slot) {
  return slot < scene.objects.size() ? scene.objects[slot].color : kMarkerColor;
}

bool floor_present(const SceneConfig& scene) {
  return !scene.prism.enabled && scene.render.floor_style != FloorStyle::none;
}

bool ceiling_present(const SceneConfig& scene) {
  return !scene.prism.enabled && scene.render.ceiling_style != CeilingStyle::none;
}

namespace {

TaggedDistance eval_scene_sdf_impl(const SceneConfig& scene, Point3 p, const Direction3* heading) {
  TaggedDistance best{};
  bool any = false;
  auto consider = [&](double d, SurfaceTag tag) {
    if (!any || d < best.distance) {
      best = {d, tag};
      any = true;
    }
  };
  const std::size_t slots = object_slot_count(scene);
  for (std::size_t i = 0; i < slots; ++i) {
    consider(eval_object_slot(scene, i, p), {SurfaceTag::Kind::object, i});
  }
  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    if (heading && dot(heading->xy(), scene.wall_outward_normal(w)) <= 0.0) continue;
    consider(sdf_wall(p, scene.wall_edge(w), scene.height), {SurfaceTag::Kind::wall, w});
  }
  if (floor_present(scene)) consider(p.z, {SurfaceTag::Kind::floor, 0});
  if (ceiling_present(scene)) consider(scene.height - p.z, {SurfaceTag::Kind::ceiling, 0});
  if (!any) best.distance = std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace

TaggedDistance eval_scene_sdf(const SceneConfig& scene, Point3 p) {
  return eval_scene_sdf_impl(scene, p, nullptr);
}

TaggedDistance eval_scene_sdf(const SceneConfig& scene, Point3 p, const Direction3& heading) {
  return eval_scene_sdf_impl(scene, p, &heading);
}

std::optional<Direction3> estimate_normal(const SceneConfig& scene, Point3 p) {
  const double h = scene.render.normal_step;
  auto d = [&](Vec3 q) { return eval_scene_sdf(scene, q).distance; };
  const Vec3 grad{d(p + Vec3{h, 0, 0}) - d(p - Vec3{h, 0, 0}),
                  d(p + Vec3{0, h, 0}) - d(p - Vec3{0, h, 0}),
                  d(p + Vec3{0, 0, h}) - d(p - Vec3{0, 0, h})};
  const double norm = length(grad);
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  return grad / norm;
}

std::vector<TaggedDistance> eval_scene_sdf_batch(const SceneConfig& scene,
                                                 std::span<const Point3> points, int threads) {
  std::vector<TaggedDistance> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for num_threads(team) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = eval_scene_sdf(scene, points[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<TaggedDistance> eval_scene_sdf_batch_serial(const SceneConfig& scene,
                                                        std::span<const Point3> points) {
  std::vector<TaggedDistance> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(eval_scene_sdf(scene, p));
  return out;
}

}  // namespace flatmarch
