#include "flatmarch/trace2d.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace flatmarch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVertexTolerance = 1e-9;
constexpr double kAngleTolerance = 1e-12;

struct Exit {
  std::size_t edge = 0;
  double t = 0.0;  // distance along the direction
  double s = 0.0;  // parameter along the edge
};

// `at_vertex`: the start point is that vertex, so its two incident edges are not exits.
std::optional<Exit> find_exit(const Polygon& poly, Point2 p, Direction2 d,
                              std::optional<std::size_t> at_vertex) {
  std::optional<Exit> best;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (at_vertex && (i == *at_vertex || (i + 1) % n == *at_vertex)) continue;
    if (dot(d, poly.outward_normal(i)) <= 0.0) continue;  // only leaving edges
    const Point2 a = poly.edge_start(i);
    const Vec2 ab = poly.edge_end(i) - a;
    const double denom = cross(d, ab);
    if (denom == 0.0) continue;
    const double t = cross(a - p, ab) / denom;
    const double s = cross(a - p, d) / denom;
    const double slack = kVertexTolerance / length(ab);
    if (t < 0.0 || s < -slack || s > 1.0 + slack) continue;
    if (!best || t < best->t) best = Exit{i, t, s};
  }
  return best;
}

/// Counterclockwise angle from a to b, in [0, 2pi).
double ccw_angle(Vec2 a, Vec2 b) {
  double angle = std::atan2(cross(a, b), dot(a, b));
  if (angle < 0.0) angle += 2.0 * kPi;
  return angle;
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct VertexPass {
  std::size_t polygon = 0;
  std::size_t vertex = 0;
  Direction2 direction{};
};

// Straight continuation through a regular vertex: walk counterclockwise around
// the vertex, sector by sector, until half a turn has been swept from the
// incoming direction.
std::optional<VertexPass> continue_through_vertex(const SceneConfig& scene, std::size_t poly_index,
                                                  std::size_t vertex, Direction2 d) {
  const auto& poly = scene.polygons[poly_index];
  const std::size_t n = poly.size();
  const Point2 v = poly.vertices[vertex];
  const Vec2 to_next = normalize(poly.vertices[(vertex + 1) % n] - v);
  const double back = ccw_angle(to_next, -d);
  double remaining = kPi - (poly.interior_angle(vertex) - back);
  if (remaining <= kAngleTolerance) return std::nullopt;

  std::size_t cur_poly = poly_index;
  std::size_t cur_vertex = vertex;
  for (std::size_t guard = 0; guard <= scene.walls.size(); ++guard) {
    const auto& cur = scene.polygons[cur_poly];
    const std::size_t incoming = (cur_vertex + cur.size() - 1) % cur.size();
    const auto& rule = scene.walls[scene.wall_index(cur_poly, incoming)];
    if (rule.kind != WallKind::portal || rule.gluing == GluingKind::reflection) return std::nullopt;
    const auto& partner = scene.walls[rule.partner];
    const auto& next = scene.polygons[partner.polygon];
    const std::size_t next_vertex = partner.edge;  // the incoming edge's end lands on the partner's start
    const Vec2 boundary = normalize(next.edge_end(next_vertex) - next.edge_start(next_vertex));
    const double sector = next.interior_angle(next_vertex);
    if (remaining <= sector + kAngleTolerance) {
      return VertexPass{partner.polygon, next_vertex, rotate(boundary, remaining)};
    }
    remaining -= sector;
    cur_poly = partner.polygon;
    cur_vertex = next_vertex;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::budget_reached: return "budget_reached";
    case TraceStatus::solid_wall: return "solid_wall";
    case TraceStatus::hit_vertex: return "hit_vertex";
    case TraceStatus::degenerate: return "degenerate";
  }
  return "degenerate";
}

TraceResult trace_geodesic_2d(const SceneConfig& scene, std::size_t polygon, Point2 start,
                              Direction2 direction, TraceBudget budget) {
  if (polygon >= scene.polygons.size() || !point_in_polygon(scene.polygons[polygon], start)) {
    throw SceneError("trace start must lie strictly inside its polygon");
  }
  if (std::abs(length(direction) - 1.0) > 1e-9) {
    throw SceneError("trace direction must be unit length");
  }

  // Vertex -> singular flag, indexed like walls.
  std::vector<bool> singular(scene.walls.size(), false);
  for (const auto& cls : cone_angles(scene)) {
    for (const auto& m : cls.members) singular[scene.wall_index(m.polygon, m.vertex)] = cls.singular;
  }

  const double max_length = std::holds_alternative<LengthBudget>(budget)
                                ? std::get<LengthBudget>(budget).max_length
                                : std::numeric_limits<double>::infinity();
  const int max_crossings = std::holds_alternative<CrossingBudget>(budget)
                                ? std::get<CrossingBudget>(budget).max_crossings
                                : std::numeric_limits<int>::max();

  TraceResult result;
  std::size_t cur = polygon;
  Point2 p = start;
  Direction2 d = direction;
  std::optional<std::size_t> at_vertex;
  auto finish = [&](TraceStatus status) {
    result.status = status;
    result.end_polygon = cur;
    result.end_point = p;
    result.end_direction = d;
    return result;
  };

  if (max_length <= 0.0 || max_crossings <= 0) return finish(TraceStatus::budget_reached);

  while (true) {
    const auto& poly = scene.polygons[cur];
    const auto exit = find_exit(poly, p, d, at_vertex);
    at_vertex.reset();
    if (!exit) return finish(TraceStatus::degenerate);

    const double remaining = max_length - result.length;
    if (exit->t >= remaining) {
      const Point2 end = p + d * remaining;
      result.segments.push_back({cur, p, end, result.segments.size()});
      result.length = max_length;
      p = end;
      return finish(TraceStatus::budget_reached);
    }

    const Point2 hit = p + d * exit->t;
    if (exit->t > 0.0) {
      result.segments.push_back({cur, p, hit, result.segments.size()});
      result.length += exit->t;
    }
    p = hit;

    const double edge_len = poly.edge_length(exit->edge);
    const double along = exit->s * edge_len;
    std::optional<std::size_t> vertex;
    if (along <= kVertexTolerance) vertex = exit->edge;
    else if (edge_len - along <= kVertexTolerance) vertex = (exit->edge + 1) % poly.size();

    if (vertex) {
      p = poly.vertices[*vertex];
      if (singular[scene.wall_index(cur, *vertex)]) return finish(TraceStatus::hit_vertex);
      const auto pass = continue_through_vertex(scene, cur, *vertex, d);
      if (!pass) return finish(TraceStatus::hit_vertex);
      cur = pass->polygon;
      p = scene.polygons[cur].vertices[pass->vertex];
      d = pass->direction;
      at_vertex = pass->vertex;
    } else {
      const auto& rule = scene.walls[scene.wall_index(cur, exit->edge)];
      switch (rule.kind) {
        case WallKind::solid:
          return finish(TraceStatus::solid_wall);
        case WallKind::mirror: {
          const Vec2 n = poly.outward_normal(exit->edge);
          d = d - n * (2.0 * dot(d, n));
          break;
        }
        case WallKind::portal:
          p = rule.isometry.apply(p);
          d = normalize(rule.isometry.apply_linear(d));
          cur = scene.walls[rule.partner].polygon;
          break;
      }
    }
    result.crossings += 1;
    if (result.crossings >= max_crossings) return finish(TraceStatus::budget_reached);
  }
}

}  // namespace flatmarch
