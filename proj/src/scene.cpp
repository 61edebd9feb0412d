#include "flatmarch/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace flatmarch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_length(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }
bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

bool in_unit_range(const Rgb& c) {
  return c.x >= 0.0 && c.x <= 1.0 && c.y >= 0.0 && c.y <= 1.0 && c.z >= 0.0 && c.z <= 1.0;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return length(p - (a + ab * t));
}

// Closed-segment intersection test, collinear overlap included.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void validate_polygon(const Polygon& poly) {
  const std::string where = "polygon '" + poly.id + "'";
  const std::size_t n = poly.size();
  if (poly.id.empty()) throw SceneError("polygon with empty id");
  if (n < 3) throw SceneError(where + " needs at least 3 vertices");
  for (const auto& v : poly.vertices) {
    if (!finite(v)) throw SceneError(where + " has a non-finite vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (poly.edge_length(i) <= kLengthTolerance) {
      throw SceneError(where + " has a zero-length edge " + std::to_string(i));
    }
  }
  if (!(poly.signed_area() > 0.0)) {
    throw SceneError(where + " is clockwise or degenerate (vertices must be counterclockwise)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one vertex; reject a fold back onto the previous edge.
        const std::size_t first = (i == 0 && j == n - 1) ? j : i;
        const std::size_t second = (first + 1) % n;
        const Vec2 e1 = poly.edge_end(first) - poly.edge_start(first);
        const Vec2 e2 = poly.edge_end(second) - poly.edge_start(second);
        if (std::abs(cross(e1, e2)) <= 1e-12 * length(e1) * length(e2) && dot(e1, e2) < 0.0) {
          throw SceneError(where + " is not simple (edges " + std::to_string(first) + " and " +
                           std::to_string(second) + " fold back)");
        }
        continue;
      }
      if (segments_intersect(poly.edge_start(i), poly.edge_end(i), poly.edge_start(j),
                             poly.edge_end(j))) {
        throw SceneError(where + " is not simple (edges " + std::to_string(i) + " and " +
                         std::to_string(j) + " intersect)");
      }
    }
  }
}

void validate_node(const SdfNode& node, const std::string& where) {
  if (!in_unit_range(node.color)) throw SceneError(where + ": color components must lie in [0,1]");
  switch (node.op) {
    case CsgOp::leaf:
      if (!node.children.empty()) throw SceneError(where + ": primitive with children");
      if (!finite(node.center)) throw SceneError(where + ": non-finite center");
      switch (node.primitive) {
        case PrimitiveKind::sphere:
          if (!(node.radius > 0.0)) throw SceneError(where + ": sphere radius must be positive");
          break;
        case PrimitiveKind::box:
          if (!(node.half_extents.x > 0.0 && node.half_extents.y > 0.0 &&
                node.half_extents.z > 0.0)) {
            throw SceneError(where + ": box half-extents must be positive");
          }
          break;
        case PrimitiveKind::cylinder:
          if (!(node.radius > 0.0)) throw SceneError(where + ": cylinder radius must be positive");
          if (!(node.z_min < node.z_max)) throw SceneError(where + ": cylinder needs z0 < z1");
          break;
      }
      return;
    case CsgOp::subtract:
      if (node.children.size() != 2) {
        throw SceneError(where + ": difference needs exactly 2 children");
      }
      break;
    case CsgOp::join:
    case CsgOp::intersect:
      if (node.children.size() < 2) {
        throw SceneError(where + ": union/intersection needs at least 2 children");
      }
      break;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    validate_node(node.children[i], where + ".children[" + std::to_string(i) + "]");
  }
}

void validate_render(const RenderSettings& r) {
  if (!(r.epsilon > 0.0)) throw SceneError("render.epsilon must be positive");
  if (r.max_steps < 1) throw SceneError("render.max_steps must be >= 1");
  if (r.max_teleports < 1) throw SceneError("render.max_teleports must be >= 1");
  if (!(r.max_distance > 0.0)) throw SceneError("render.max_distance must be positive");
  if (!(r.normal_step > 0.0)) throw SceneError("render.normal_step must be positive");
  if (!(r.wall_transmittance > 0.0 && r.wall_transmittance <= 1.0)) {
    throw SceneError("render.wall_tint.transmittance must lie in (0,1]");
  }
  if (!(r.mirror_attenuation > 0.0 && r.mirror_attenuation <= 1.0)) {
    throw SceneError("render.mirror_attenuation must lie in (0,1]");
  }
  if (!in_unit_range(r.fog_color) || !in_unit_range(r.wall_tint_color) ||
      !in_unit_range(r.background)) {
    throw SceneError("render colors must lie in [0,1]");
  }
}

GluingKind orientation_preserving_kind(const DirectedEdge& from, const DirectedEdge& to) {
  const Vec2 u = from.end - from.start;
  const Vec2 w = to.start - to.end;
  const double lu = length(u);
  const double lw = length(w);
  const double s = cross(u, w) / (lu * lw);
  const double c = dot(u, w) / (lu * lw);
  return (std::abs(s) <= kLengthTolerance && c > 0.0) ? GluingKind::translation
                                                      : GluingKind::rotation;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

// --- Polygon -----------------------------------------------------------------

Vec2 Polygon::outward_normal(std::size_t edge) const {
  const Vec2 d = normalize(edge_end(edge) - edge_start(edge));
  return {d.y, -d.x};
}

double Polygon::interior_angle(std::size_t vertex) const {
  const std::size_t n = vertices.size();
  const Point2 cur = vertices[vertex];
  const Vec2 to_prev = vertices[(vertex + n - 1) % n] - cur;
  const Vec2 to_next = vertices[(vertex + 1) % n] - cur;
  double angle = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
  if (angle <= 0.0) angle += kTwoPi;
  return angle;
}

double Polygon::signed_area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    twice += cross(edge_start(i), edge_end(i));
  }
  return 0.5 * twice;
}

std::string_view to_string(WallKind kind) {
  switch (kind) {
    case WallKind::portal: return "portal";
    case WallKind::mirror: return "mirror";
    case WallKind::solid: return "solid";
  }
  return "solid";
}

std::string_view to_string(GluingKind kind) {
  switch (kind) {
    case GluingKind::translation: return "translation";
    case GluingKind::rotation: return "rotation";
    case GluingKind::reflection: return "reflection";
  }
  return "translation";
}

// --- SdfNode -----------------------------------------------------------------

SdfNode SdfNode::sphere(Point3 c, double r, Rgb color) {
  SdfNode n;
  n.primitive = PrimitiveKind::sphere;
  n.center = c;
  n.radius = r;
  n.color = color;
  return n;
}

SdfNode SdfNode::box(Point3 c, Vec3 h, Rgb color) {
  SdfNode n;
  n.primitive = PrimitiveKind::box;
  n.center = c;
  n.half_extents = h;
  n.color = color;
  return n;
}

SdfNode SdfNode::cylinder(Point2 axis, double r, double z0, double z1, Rgb color) {
  SdfNode n;
  n.primitive = PrimitiveKind::cylinder;
  n.center = {axis.x, axis.y, 0.5 * (z0 + z1)};
  n.radius = r;
  n.z_min = z0;
  n.z_max = z1;
  n.color = color;
  return n;
}

SdfNode SdfNode::combine(CsgOp op, std::vector<SdfNode> children, Rgb color) {
  SdfNode n;
  n.op = op;
  n.children = std::move(children);
  n.color = color;
  return n;
}

std::size_t SdfNode::leaf_count() const {
  if (op == CsgOp::leaf) return 1;
  std::size_t total = 0;
  for (const auto& c : children) total += c.leaf_count();
  return total;
}

// --- SceneConfig -------------------------------------------------------------

DirectedEdge SceneConfig::wall_edge(std::size_t wall) const {
  const auto& rule = walls[wall];
  const auto& poly = polygons[rule.polygon];
  return {poly.edge_start(rule.edge), poly.edge_end(rule.edge)};
}

Vec2 SceneConfig::wall_outward_normal(std::size_t wall) const {
  const auto& rule = walls[wall];
  return polygons[rule.polygon].outward_normal(rule.edge);
}

std::optional<std::size_t> SceneConfig::polygon_index(std::string_view id) const {
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    if (polygons[i].id == id) return i;
  }
  return std::nullopt;
}

std::string SceneConfig::wall_label(std::size_t wall) const {
  const auto& rule = walls[wall];
  return polygons[rule.polygon].id + "." + std::to_string(rule.edge);
}

// --- gluing ------------------------------------------------------------------

Isometry2 derive_identification_isometry(const DirectedEdge& from, const DirectedEdge& to,
                                         GluingKind kind) {
  const Vec2 u = from.end - from.start;
  // Image of u under the gluing: the reversed target edge.
  const Vec2 w = to.start - to.end;
  const double lu = length(u);
  const double lw = length(w);
  if (std::abs(lu - lw) > kLengthTolerance) {
    throw SceneError("edge length mismatch: " + fmt_length(lu) + " vs " + fmt_length(lw));
  }
  if (lu <= kLengthTolerance) throw SceneError("cannot glue zero-length edges");

  const double c = dot(u, w) / (lu * lw);
  const double s = cross(u, w) / (lu * lw);
  const bool is_identity_turn = std::abs(s) <= kLengthTolerance && c > 0.0;

  Isometry2 iso;
  switch (kind) {
    case GluingKind::translation:
      if (!is_identity_turn) {
        throw SceneError("declared translation gluing, but the edges need a rotation by " +
                         fmt_length(std::atan2(s, c) * 180.0 / std::numbers::pi) + " degrees");
      }
      iso.linear = {1.0, 0.0, 0.0, 1.0};
      break;
    case GluingKind::rotation:
      if (is_identity_turn) {
        throw SceneError("declared rotation gluing, but the edges are related by a translation");
      }
      iso.linear = {c, -s, s, c};
      break;
    case GluingKind::reflection: {
      // Reflection across the line at angle phi sends angle a to 2*phi - a.
      const double two_phi = std::atan2(u.y, u.x) + std::atan2(w.y, w.x);
      const double c2 = std::cos(two_phi);
      const double s2 = std::sin(two_phi);
      iso.linear = {c2, s2, s2, -c2};
      break;
    }
  }
  iso.translation = to.end - iso.apply_linear(from.start);
  return iso;
}

// --- validation ----------------------------------------------------------------

void validate_camera(const SceneConfig& scene) {
  const auto& cam = scene.camera;
  if (!finite(cam.position)) throw SceneError("camera position must be finite");
  if (!(cam.fov > 0.0 && cam.fov < 180.0)) throw SceneError("camera fov must lie in (0,180)");
  if (!(std::abs(cam.pitch) < std::numbers::pi / 2)) {
    throw SceneError("camera pitch must lie in (-pi/2, pi/2)");
  }
  if (!(cam.position.z > 0.0 && cam.position.z < scene.height) ||
      !locate_polygon(scene, cam.position.xy())) {
    throw SceneError("camera outside room");
  }
}

SceneConfig build_scene(const SceneSpec& spec) {
  if (spec.version != "1") throw SceneError("unknown scene version '" + spec.version + "'");

  SceneConfig scene;
  scene.version = spec.version;
  scene.name = spec.name;
  scene.polygons = spec.polygons;
  scene.height = spec.height;
  scene.singularity_markers = spec.singularity_markers;
  scene.objects = spec.objects;
  scene.render = spec.render;
  scene.camera = spec.camera;

  if (scene.polygons.empty()) throw SceneError("scene has no polygons");
  for (const auto& poly : scene.polygons) validate_polygon(poly);
  for (std::size_t i = 0; i < scene.polygons.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.polygons.size(); ++j) {
      if (scene.polygons[i].id == scene.polygons[j].id) {
        throw SceneError("duplicate polygon id '" + scene.polygons[i].id + "'");
      }
    }
  }
  if (!(std::isfinite(scene.height) && scene.height > 0.0)) {
    throw SceneError("height must be positive");
  }

  scene.prism.enabled = spec.prism_enabled;
  scene.prism.period = spec.prism_period.value_or(scene.height);
  if (scene.prism.enabled && std::abs(scene.prism.period - scene.height) > 1e-12) {
    throw SceneError("prism period must equal the room height");
  }
  if (!(scene.prism.period > 0.0)) throw SceneError("prism period must be positive");
  if (scene.singularity_markers.enabled && !(scene.singularity_markers.radius > 0.0)) {
    throw SceneError("singularity marker radius must be positive");
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    validate_node(scene.objects[i], "objects[" + std::to_string(i) + "]");
  }
  validate_render(scene.render);

  // Default every edge to solid, then apply the declared rules.
  scene.wall_offset.resize(scene.polygons.size());
  std::size_t total_edges = 0;
  for (std::size_t p = 0; p < scene.polygons.size(); ++p) {
    scene.wall_offset[p] = total_edges;
    total_edges += scene.polygons[p].size();
  }
  scene.walls.resize(total_edges);
  for (std::size_t p = 0; p < scene.polygons.size(); ++p) {
    for (std::size_t e = 0; e < scene.polygons[p].size(); ++e) {
      auto& rule = scene.walls[scene.wall_index(p, e)];
      rule.polygon = p;
      rule.edge = e;
      rule.kind = WallKind::solid;
    }
  }

  auto resolve = [&](const EdgeRef& ref) {
    const auto poly = scene.polygon_index(ref.polygon);
    if (!poly) throw SceneError("wall references unknown polygon '" + ref.polygon + "'");
    if (ref.edge >= scene.polygons[*poly].size()) {
      throw SceneError("edge index out of range: " + ref.polygon + "." + std::to_string(ref.edge) +
                       " (polygon has " + std::to_string(scene.polygons[*poly].size()) +
                       " edges)");
    }
    return scene.wall_index(*poly, ref.edge);
  };

  std::vector<bool> declared(total_edges, false);
  std::vector<std::optional<GluingKind>> declared_gluing(total_edges);
  for (const auto& ws : spec.walls) {
    const std::size_t w = resolve(ws.edge);
    auto& rule = scene.walls[w];
    if (ws.kind != WallKind::portal && (ws.partner || ws.gluing)) {
      throw SceneError("wall " + scene.wall_label(w) + ": only portal walls take a partner");
    }
    if (ws.kind == WallKind::portal && !ws.partner) {
      throw SceneError("portal wall " + scene.wall_label(w) + " has no partner");
    }
    std::size_t partner = 0;
    if (ws.kind == WallKind::portal) {
      partner = resolve(*ws.partner);
      if (partner == w) throw SceneError("wall " + scene.wall_label(w) + " is glued to itself");
    }
    if (declared[w]) {
      const bool same = rule.kind == ws.kind &&
                        (ws.kind != WallKind::portal || rule.partner == partner);
      if (!same) throw SceneError("conflicting rules for wall " + scene.wall_label(w));
    }
    declared[w] = true;
    rule.kind = ws.kind;
    if (ws.kind == WallKind::portal) {
      rule.partner = partner;
      if (ws.gluing) {
        if (declared_gluing[w] && *declared_gluing[w] != *ws.gluing) {
          throw SceneError("conflicting gluing kinds for wall " + scene.wall_label(w));
        }
        declared_gluing[w] = ws.gluing;
      }
    }
  }

  // Portal partnering must be symmetric; a one-sided declaration implies its mirror image.
  for (std::size_t w = 0; w < total_edges; ++w) {
    if (scene.walls[w].kind != WallKind::portal) continue;
    const std::size_t partner = scene.walls[w].partner;
    auto& other = scene.walls[partner];
    if (declared[partner]) {
      if (other.kind != WallKind::portal || other.partner != w) {
        throw SceneError("portal " + scene.wall_label(w) + " -> " + scene.wall_label(partner) +
                         " is not reciprocated");
      }
    } else {
      other.kind = WallKind::portal;
      other.partner = w;
      declared[partner] = true;
    }
    if (declared_gluing[w] && declared_gluing[partner] &&
        *declared_gluing[w] != *declared_gluing[partner]) {
      throw SceneError("portal " + scene.wall_label(w) + " <-> " + scene.wall_label(partner) +
                       " declares two different gluing kinds");
    }
  }

  for (std::size_t w = 0; w < total_edges; ++w) {
    auto& rule = scene.walls[w];
    if (rule.kind != WallKind::portal || rule.partner < w) continue;
    const std::size_t partner = rule.partner;
    const DirectedEdge from = scene.wall_edge(w);
    const DirectedEdge to = scene.wall_edge(partner);
    const double lf = length(from.end - from.start);
    const double lt = length(to.end - to.start);
    if (std::abs(lf - lt) > kLengthTolerance) {
      throw SceneError("edge length mismatch: " + scene.wall_label(w) + " (length " +
                       fmt_length(lf) + ") vs " + scene.wall_label(partner) + " (length " +
                       fmt_length(lt) + ")");
    }
    const GluingKind kind = declared_gluing[w].value_or(
        declared_gluing[partner].value_or(orientation_preserving_kind(from, to)));
    try {
      rule.isometry = derive_identification_isometry(from, to, kind);
    } catch (const SceneError& e) {
      throw SceneError("portal " + scene.wall_label(w) + " <-> " + scene.wall_label(partner) +
                       ": " + e.what());
    }
    rule.gluing = kind;
    auto& other = scene.walls[partner];
    other.gluing = kind;
    other.isometry = rule.isometry.inverse();
  }

  validate_camera(scene);

  if (scene.singularity_markers.enabled) {
    for (const auto& cls : cone_angles(scene)) {
      if (!cls.singular) continue;
      for (const auto& m : cls.members) {
        const Point2 site = scene.polygons[m.polygon].vertices[m.vertex];
        const bool seen = std::any_of(scene.marker_sites.begin(), scene.marker_sites.end(),
                                      [&](Point2 q) { return length(q - site) <= kLengthTolerance; });
        if (!seen) scene.marker_sites.push_back(site);
      }
    }
  }
  return scene;
}

// --- cone angles -----------------------------------------------------------------

std::vector<VertexClass> cone_angles(const SceneConfig& scene) {
  const std::size_t total = scene.walls.size();  // one vertex per edge
  UnionFind uf(total);
  for (std::size_t w = 0; w < total; ++w) {
    const auto& rule = scene.walls[w];
    if (rule.kind != WallKind::portal) continue;
    const auto& src = scene.polygons[rule.polygon];
    const std::size_t dst_poly = scene.walls[rule.partner].polygon;
    const auto& dst = scene.polygons[dst_poly];
    for (std::size_t k : {rule.edge, (rule.edge + 1) % src.size()}) {
      const Point2 image = rule.isometry.apply(src.vertices[k]);
      for (std::size_t v = 0; v < dst.size(); ++v) {
        if (length(dst.vertices[v] - image) <= kLengthTolerance) {
          uf.unite(scene.wall_index(rule.polygon, k), scene.wall_index(dst_poly, v));
        }
      }
    }
  }

  std::map<std::size_t, VertexClass> by_root;
  for (std::size_t p = 0; p < scene.polygons.size(); ++p) {
    for (std::size_t v = 0; v < scene.polygons[p].size(); ++v) {
      auto& cls = by_root[uf.find(scene.wall_index(p, v))];
      cls.members.push_back({p, v});
      cls.angle += scene.polygons[p].interior_angle(v);
    }
  }
  std::vector<VertexClass> classes;
  classes.reserve(by_root.size());
  for (auto& [root, cls] : by_root) {
    std::sort(cls.members.begin(), cls.members.end());
    cls.singular = std::abs(cls.angle - kTwoPi) > kConeAngleTolerance;
    classes.push_back(std::move(cls));
  }
  std::sort(classes.begin(), classes.end(),
            [](const VertexClass& a, const VertexClass& b) { return a.members[0] < b.members[0]; });
  return classes;
}

// --- point location --------------------------------------------------------------

bool point_in_polygon(const Polygon& polygon, Point2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = polygon.edge_start(i);
    const Point2 b = polygon.edge_end(i);
    if (distance_to_segment(p, a, b) <= 1e-12) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::optional<std::size_t> locate_polygon(const SceneConfig& scene, Point2 p) {
  for (std::size_t i = 0; i < scene.polygons.size(); ++i) {
    if (point_in_polygon(scene.polygons[i], p)) return i;
  }
  return std::nullopt;
}

}  // namespace flatmarch
