#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flatmarch/isometry.hpp"
#include "flatmarch/vec.hpp"

namespace flatmarch {

/// Raised for any malformed or inconsistent scene description.
class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a scene file cannot be read or an output cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counterclockwise simple polygon. Edge i runs from vertex i to vertex i+1 (mod n).
struct Polygon {
  std::string id;
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
  Point2 edge_start(std::size_t edge) const { return vertices[edge]; }
  Point2 edge_end(std::size_t edge) const { return vertices[(edge + 1) % vertices.size()]; }
  double edge_length(std::size_t edge) const { return length(edge_end(edge) - edge_start(edge)); }
  /// Unit normal pointing out of the polygon across `edge`.
  Vec2 outward_normal(std::size_t edge) const;
  /// Interior angle at vertex i, in (0, 2pi).
  double interior_angle(std::size_t vertex) const;
  double signed_area() const;
};

struct EdgeRef {
  std::string polygon;
  std::size_t edge = 0;

  bool operator==(const EdgeRef&) const = default;
};

struct DirectedEdge {
  Point2 start;
  Point2 end;
};

enum class WallKind { portal, mirror, solid };
enum class GluingKind { translation, rotation, reflection };

std::string_view to_string(WallKind kind);
std::string_view to_string(GluingKind kind);

struct WallRule {
  std::size_t polygon = 0;  // index into SceneConfig::polygons
  std::size_t edge = 0;
  WallKind kind = WallKind::solid;
  // Portal only.
  std::size_t partner = 0;  // wall index of the partner rule
  GluingKind gluing = GluingKind::translation;
  Isometry2 isometry{};  // maps this wall's polygon frame into the partner's
};

enum class PrimitiveKind { sphere, box, cylinder };
enum class CsgOp { leaf, join, intersect, subtract };

/// CSG tree node. Leaves carry one primitive; inner nodes combine children.
struct SdfNode {
  CsgOp op = CsgOp::leaf;
  PrimitiveKind primitive = PrimitiveKind::sphere;
  // sphere: center, radius; box: center, half_extents;
  // cylinder: center.xy = axis point, radius, z_min/z_max.
  Point3 center{};
  double radius = 0.0;
  Vec3 half_extents{};
  double z_min = 0.0;
  double z_max = 0.0;
  std::vector<SdfNode> children;
  Rgb color{1.0, 1.0, 1.0};

  static SdfNode sphere(Point3 c, double r, Rgb color = {1, 1, 1});
  static SdfNode box(Point3 c, Vec3 h, Rgb color = {1, 1, 1});
  static SdfNode cylinder(Point2 axis, double r, double z0, double z1, Rgb color = {1, 1, 1});
  static SdfNode combine(CsgOp op, std::vector<SdfNode> children, Rgb color = {1, 1, 1});

  std::size_t leaf_count() const;
};

enum class FloorStyle { checker, solid, none };
enum class CeilingStyle { solid, none };

struct RenderSettings {
  double epsilon = 1e-4;
  int max_steps = 512;
  double max_distance = 100.0;
  int max_teleports = 64;
  double normal_step = 1e-4;
  Rgb fog_color{0.82, 0.86, 0.92};
  Rgb wall_tint_color{0.82, 0.86, 0.92};
  double wall_transmittance = 0.9;
  double mirror_attenuation = 0.97;
  Rgb background{0.06, 0.07, 0.1};
  FloorStyle floor_style = FloorStyle::checker;
  CeilingStyle ceiling_style = CeilingStyle::none;
  bool headlight = false;
};

struct CameraSettings {
  Point3 position{0.5, 0.5, 0.5};
  double yaw = 0.0;    // radians, about +z, 0 looks along +x
  double pitch = 0.0;  // radians, positive looks up
  double fov = 70.0;   // horizontal, degrees
};

struct PrismSettings {
  bool enabled = false;
  double period = 1.0;
};

struct MarkerSettings {
  bool enabled = false;
  double radius = 0.03;
};

/// A polygon vertex, addressed by polygon and vertex index.
struct VertexRef {
  std::size_t polygon = 0;
  std::size_t vertex = 0;

  auto operator<=>(const VertexRef&) const = default;
};

struct VertexClass {
  std::vector<VertexRef> members;  // sorted
  double angle = 0.0;              // sum of interior angles, radians
  bool singular = false;           // |angle - 2pi| > 1e-6
};

inline constexpr double kConeAngleTolerance = 1e-6;
inline constexpr double kLengthTolerance = 1e-9;

/// Immutable, validated description of a flat-surface room.
struct SceneConfig {
  std::string version = "1";
  std::string name;
  std::vector<Polygon> polygons;
  /// One rule per polygon edge, ordered by (polygon, edge).
  std::vector<WallRule> walls;
  double height = 1.0;
  PrismSettings prism;
  MarkerSettings singularity_markers;
  std::vector<SdfNode> objects;
  RenderSettings render;
  CameraSettings camera;

  // Derived during validation.
  std::vector<std::size_t> wall_offset;  // first wall index of each polygon
  std::vector<Point2> marker_sites;      // vertex positions of singular classes

  std::size_t wall_index(std::size_t polygon, std::size_t edge) const {
    return wall_offset[polygon] + edge;
  }
  DirectedEdge wall_edge(std::size_t wall) const;
  /// Unit outward normal (horizontal) of a wall.
  Vec2 wall_outward_normal(std::size_t wall) const;
  std::optional<std::size_t> polygon_index(std::string_view id) const;
  /// Human-readable "polygon.edge" label.
  std::string wall_label(std::size_t wall) const;
};

// --- construction -----------------------------------------------------------

/// Input to `build_scene`: portal partners are named by edge reference and
/// gluing isometries are derived during validation. Edges without a rule are solid.
struct WallSpec {
  EdgeRef edge;
  WallKind kind = WallKind::solid;
  std::optional<EdgeRef> partner;
  std::optional<GluingKind> gluing;  // default: orientation-preserving
};

struct SceneSpec {
  std::string version = "1";
  std::string name;
  std::vector<Polygon> polygons;
  std::vector<WallSpec> walls;
  double height = 1.0;
  bool prism_enabled = false;
  std::optional<double> prism_period;
  MarkerSettings singularity_markers;
  std::vector<SdfNode> objects;
  RenderSettings render;
  CameraSettings camera;
};

/// Validates a spec and derives walls, isometries and marker sites. Throws SceneError.
SceneConfig build_scene(const SceneSpec& spec);

/// Camera inside the room, finite, with a legal fov and pitch. Throws SceneError.
void validate_camera(const SceneConfig& scene);

/// Parses and validates the version "1" JSON scene format. Throws SceneError.
SceneConfig parse_scene(std::string_view json_text);
SceneConfig load_scene_file(const std::string& path);
/// Inverse of parse_scene; both sides of every portal pair are written.
std::string serialize_scene(const SceneConfig& scene);

/// The isometry sending directed edge `from` onto the reversal of `to`
/// (from.start -> to.end, from.end -> to.start). Throws SceneError when the
/// lengths differ or the declared kind does not match.
Isometry2 derive_identification_isometry(const DirectedEdge& from, const DirectedEdge& to,
                                         GluingKind kind);

/// Vertex classes under the portal gluings, with cone angles.
std::vector<VertexClass> cone_angles(const SceneConfig& scene);

/// True when p lies strictly inside the polygon.
bool point_in_polygon(const Polygon& polygon, Point2 p);
/// Index of the first polygon strictly containing p.
std::optional<std::size_t> locate_polygon(const SceneConfig& scene, Point2 p);

// --- builtin gallery ----------------------------------------------------------

const std::vector<std::string>& builtin_scene_names();
/// Throws SceneError for unknown names.
SceneConfig builtin_scene(std::string_view name);

/// Accepts "builtin:NAME" or a path to a JSON scene file.
SceneConfig resolve_scene(const std::string& source);

}  // namespace flatmarch
