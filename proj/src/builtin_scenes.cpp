#include <cmath>
#include <numbers>

#include "flatmarch/scene.hpp"

namespace flatmarch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

/// The standard test object: a cube with a sphere carved out of it.
SdfNode carved_cube(Point3 center, double scale) {
  return SdfNode::combine(CsgOp::subtract, {SdfNode::box(center, Vec3{1, 1, 1} * (0.15 * scale)),
                                            SdfNode::sphere(center, 0.19 * scale)});
}

WallSpec portal(const std::string& a, std::size_t ea, const std::string& b, std::size_t eb,
                GluingKind gluing = GluingKind::translation) {
  return {{a, ea}, WallKind::portal, EdgeRef{b, eb}, gluing};
}

WallSpec mirror(const std::string& poly, std::size_t edge) {
  return {{poly, edge}, WallKind::mirror, std::nullopt, std::nullopt};
}

SceneSpec torus() {
  SceneSpec s;
  s.name = "torus";
  s.polygons = {{"square", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  s.walls = {portal("square", 0, "square", 2), portal("square", 1, "square", 3)};
  s.objects = {carved_cube({0.5, 0.5, 0.5}, 0.8)};
  s.camera = {{0.12, 0.2, 0.5}, std::atan2(0.3, 0.38), 0.0, 75.0};
  return s;
}

// Three unit squares; the two collinear midpoints make every boundary piece a unit edge.
Polygon l_outline() {
  return {"L", {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}, {0, 1}}};
}

std::vector<WallSpec> l_gluings() {
  return {portal("L", 0, "L", 5), portal("L", 1, "L", 3), portal("L", 2, "L", 7),
          portal("L", 4, "L", 6)};
}

SceneSpec l_surface() {
  SceneSpec s;
  s.name = "l_surface";
  s.polygons = {l_outline()};
  s.walls = l_gluings();
  s.objects = {carved_cube({0.5, 0.5, 0.5}, 1.0)};
  s.singularity_markers.enabled = true;
  s.camera = {{1.6, 0.55, 0.5}, kPi, 0.0, 75.0};
  return s;
}

SceneSpec l_prism() {
  SceneSpec s = l_surface();
  s.name = "l_prism";
  s.singularity_markers.enabled = false;
  s.prism_enabled = true;
  s.camera.pitch = 0.25;
  return s;
}

// Two regular unit-side pentagons, the lower one the upper rotated by pi about the
// midpoint of their shared horizontal edge. Edge k of one is parallel to edge k of the other.
std::vector<Polygon> double_pentagon_polygons() {
  std::vector<Point2> upper;
  Point2 cursor{0.0, 0.0};
  for (int k = 0; k < 5; ++k) {
    upper.push_back(cursor);
    const double heading = 72.0 * kDeg * k;
    cursor += Vec2{std::cos(heading), std::sin(heading)};
  }
  std::vector<Point2> lower;
  for (const auto& v : upper) lower.push_back(Point2{1.0, 0.0} - v);
  return {{"upper", upper}, {"lower", lower}};
}

double pentagon_inradius() { return 0.5 / std::tan(36.0 * kDeg); }

SceneSpec double_pentagon() {
  SceneSpec s;
  s.name = "double_pentagon";
  s.polygons = double_pentagon_polygons();
  for (std::size_t k = 0; k < 5; ++k) s.walls.push_back(portal("upper", k, "lower", k));
  const double r = pentagon_inradius();
  s.objects = {carved_cube({0.5, r, 0.5}, 0.9)};
  s.singularity_markers.enabled = true;
  s.camera = {{0.5, -r, 0.5}, kPi / 2, 0.0, 75.0};
  return s;
}

SceneSpec double_pentagon_prism() {
  SceneSpec s = double_pentagon();
  s.name = "double_pentagon_prism";
  s.singularity_markers.enabled = false;
  s.prism_enabled = true;
  s.camera.pitch = 0.25;
  return s;
}

// Cross-shaped net: bottom [1,2]x[0,1], front [1,2]x[1,2], left [0,1]x[1,2],
// right [2,3]x[1,2], top [1,2]x[2,3], back [1,2]x[3,4].
SceneSpec cube_net() {
  SceneSpec s;
  s.name = "cube_net";
  s.polygons = {{"net",
                 {{1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {2, 2}, {2, 3},
                  {2, 4}, {1, 4}, {1, 3}, {1, 2}, {0, 2}, {0, 1}, {1, 1}}}};
  const auto rot = GluingKind::rotation;
  s.walls = {
      portal("net", 0, "net", 7),         // bottom face <-> back face
      portal("net", 1, "net", 2, rot),    // bottom/right, quarter turn about (2,1)
      portal("net", 13, "net", 12, rot),  // bottom/left, quarter turn about (1,1)
      portal("net", 4, "net", 5, rot),    // right/top, quarter turn about (2,2)
      portal("net", 10, "net", 9, rot),   // left/top, quarter turn about (1,2)
      portal("net", 3, "net", 6, rot),    // right/back, half turn
      portal("net", 11, "net", 8, rot),   // left/back, half turn
  };
  s.objects = {carved_cube({1.5, 1.5, 0.5}, 1.0)};
  s.singularity_markers.enabled = true;
  s.camera = {{1.5, 0.45, 0.5}, kPi / 2, 0.0, 75.0};
  return s;
}

SceneSpec mirror_room(std::string name, std::vector<Point2> triangle, Point3 object,
                      CameraSettings camera) {
  SceneSpec s;
  s.name = std::move(name);
  s.polygons = {{"triangle", std::move(triangle)}};
  s.walls = {mirror("triangle", 0), mirror("triangle", 1), mirror("triangle", 2)};
  s.objects = {carved_cube(object, 0.8)};
  s.camera = camera;
  return s;
}

SceneSpec mirror_triangle_equilateral() {
  const double h = std::sqrt(3.0);
  return mirror_room("mirror_triangle_equilateral", {{0, 0}, {2, 0}, {1, h}},
                     {1.0, h / 3.0, 0.5}, {{1.0, 0.2, 0.5}, kPi / 2, 0.0, 75.0});
}

SceneSpec mirror_triangle_30_60_90() {
  const double h = std::sqrt(3.0);
  return mirror_room("mirror_triangle_30_60_90", {{0, 0}, {3, 0}, {0, h}}, {0.7, 0.55, 0.5},
                     {{1.9, 0.25, 0.5}, kPi, 0.0, 75.0});
}

// Angles (60 + sqrt 2) deg at the origin, 75 deg at (2.5, 0), and the remainder at the apex.
SceneSpec mirror_triangle_irrational() {
  const double base = 2.5;
  const double a = (60.0 + std::sqrt(2.0)) * kDeg;
  const double b = 75.0 * kDeg;
  const double c = kPi - a - b;
  const double side = base * std::sin(b) / std::sin(c);
  const Point2 apex{side * std::cos(a), side * std::sin(a)};
  return mirror_room("mirror_triangle_irrational", {{0, 0}, {base, 0}, apex}, {1.3, 1.0, 0.5},
                     {{1.4, 0.25, 0.5}, kPi / 2 + 0.15, 0.0, 75.0});
}

}  // namespace

const std::vector<std::string>& builtin_scene_names() {
  static const std::vector<std::string> names = {
      "torus",
      "l_surface",
      "double_pentagon",
      "cube_net",
      "mirror_triangle_irrational",
      "mirror_triangle_30_60_90",
      "mirror_triangle_equilateral",
      "l_prism",
      "double_pentagon_prism",
  };
  return names;
}

SceneConfig builtin_scene(std::string_view name) {
  if (name == "torus") return build_scene(torus());
  if (name == "l_surface") return build_scene(l_surface());
  if (name == "double_pentagon") return build_scene(double_pentagon());
  if (name == "cube_net") return build_scene(cube_net());
  if (name == "mirror_triangle_irrational") return build_scene(mirror_triangle_irrational());
  if (name == "mirror_triangle_30_60_90") return build_scene(mirror_triangle_30_60_90());
  if (name == "mirror_triangle_equilateral") return build_scene(mirror_triangle_equilateral());
  if (name == "l_prism") return build_scene(l_prism());
  if (name == "double_pentagon_prism") return build_scene(double_pentagon_prism());
  throw SceneError("unknown builtin scene '" + std::string(name) + "'");
}

}  // namespace flatmarch
