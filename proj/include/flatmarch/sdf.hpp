#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "flatmarch/scene.hpp"
#include "flatmarch/vec.hpp"

namespace flatmarch {

// Exact signed distances, negative inside.
double sdf_sphere(Point3 p, Point3 center, double radius);
double sdf_box(Point3 p, Point3 center, Vec3 half_extents);
/// Capped cylinder with a vertical axis through `axis`, spanning z in [z0, z1].
double sdf_vertical_cylinder(Point3 p, Point2 axis, double radius, double z0, double z1);
/// Unsigned distance to the vertical rectangle `edge` x [0, height].
double sdf_wall(Point3 p, const DirectedEdge& edge, double height);

double eval_csg(const SdfNode& node, Point3 p);

/// What the nearest surface is.
struct SurfaceTag {
  enum class Kind { none, object, wall, floor, ceiling };
  Kind kind = Kind::none;
  /// Object index (user objects first, then singularity markers) or wall index.
  std::size_t index = 0;

  bool operator==(const SurfaceTag&) const = default;
};

struct TaggedDistance {
  double distance = 0.0;
  SurfaceTag tag{};
};

/// Minimum over objects, markers, walls, floor and ceiling, tagged with the argmin.
/// Ties go to the earlier part in that order. Floor and ceiling planes are included
/// when styled solid and never in prism scenes.
TaggedDistance eval_scene_sdf(const SceneConfig& scene, Point3 p);
/// Distance bound for a ray at p moving along `heading`: walls the ray is not
/// leaving through (heading . outward normal <= 0) cannot be reached before some
/// other event, so they are left out.
TaggedDistance eval_scene_sdf(const SceneConfig& scene, Point3 p, const Direction3& heading);

/// Number of object slots: user objects plus singularity markers.
std::size_t object_slot_count(const SceneConfig& scene);
/// Distance to one object slot (user object or marker).
double eval_object_slot(const SceneConfig& scene, std::size_t slot, Point3 p);
/// Color of singularity marker cylinders.
inline constexpr Rgb kMarkerColor{0.95, 0.25, 0.2};

/// Material color of an object slot.
Rgb object_slot_color(const SceneConfig& scene, std::size_t slot);

/// Solid floor/ceiling planes in the SDF. Prism scenes have neither: their
/// floor and ceiling are wrap planes handled by the marcher.
bool floor_present(const SceneConfig& scene);
bool ceiling_present(const SceneConfig& scene);

/// Normalized central-difference gradient of the scene distance; nullopt when the
/// gradient vanishes.
std::optional<Direction3> estimate_normal(const SceneConfig& scene, Point3 p);

// Batch evaluation over many points: OpenMP kernel and the serial reference it is
// tested against. Results are identical for any thread count.
std::vector<TaggedDistance> eval_scene_sdf_batch(const SceneConfig& scene,
                                                 std::span<const Point3> points, int threads = 0);
std::vector<TaggedDistance> eval_scene_sdf_batch_serial(const SceneConfig& scene,
                                                        std::span<const Point3> points);

}  // namespace flatmarch
