#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "flatmarch/scene.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace flatmarch;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kTorusJson = R"({
  "version": "1",
  "name": "mini_torus",
  "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
  "walls": [
    {"polygon": "sq", "edge": 0, "kind": "portal", "partner": {"polygon": "sq", "edge": 2}},
    {"polygon": "sq", "edge": 1, "kind": "portal", "partner": {"polygon": "sq", "edge": 3}}
  ],
  "objects": [{"type": "sphere", "center": [0.5,0.5,0.5], "radius": 0.2}],
  "camera": {"position": [0.2,0.2,0.5]}
})";

// Edge 0 has length 2, edge 1 has length 1.
const char* kMismatchJson = R"({
  "version": "1",
  "name": "mismatch",
  "polygons": [{"id": "r", "vertices": [[0,0],[2,0],[2,1],[0,1]]}],
  "walls": [{"polygon": "r", "edge": 0, "kind": "portal", "partner": {"polygon": "r", "edge": 1}}],
  "camera": {"position": [1,0.5,0.5]}
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::string scene_error(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const SceneError& e) {
    return e.what();
  }
  return "";
}

double max_map_error(const Isometry2& a, const Isometry2& b, Point2 p) {
  return length(a(p) - b(p));
}

}  // namespace

TEST_CASE("parse_scene builds the torus with four translation gluings") {
  const SceneConfig s = parse_scene(kTorusJson);
  CHECK(s.name == "mini_torus");
  REQUIRE(s.walls.size() == 4);
  for (const auto& w : s.walls) {
    CHECK(w.kind == WallKind::portal);
    CHECK(w.isometry.orthogonality_error() < 1e-12);
    CHECK(std::abs(w.isometry.linear[0] - 1) < 1e-12);
    CHECK(std::abs(w.isometry.linear[1]) < 1e-12);
    CHECK(std::abs(w.isometry.linear[2]) < 1e-12);
    CHECK(std::abs(w.isometry.linear[3] - 1) < 1e-12);
  }
  // Bottom edge maps up by one, left edge maps right by one.
  CHECK(length(s.walls[0].isometry.translation - Vec2{0, 1}) < 1e-12);
  CHECK(length(s.walls[3].isometry.translation - Vec2{1, 0}) < 1e-12);
  CHECK(s.walls[0].partner == 2);
  CHECK(s.walls[2].partner == 0);
}

TEST_CASE("omitted render block takes the defaults") {
  const SceneConfig s = parse_scene(kTorusJson);
  CHECK(s.render.epsilon == 1e-4);
  CHECK(s.render.max_steps == 512);
  CHECK(s.render.max_distance == 100.0);
  CHECK(s.render.max_teleports == 64);
  CHECK(s.render.normal_step == 1e-4);
  CHECK(s.render.ceiling_style == CeilingStyle::none);
  CHECK(s.height == 1.0);
}

TEST_CASE("edge length mismatch is rejected") {
  const std::string msg = scene_error(kMismatchJson);
  CHECK(msg.find("edge length mismatch") != std::string::npos);
  CHECK(msg.find("r.0") != std::string::npos);
  CHECK(msg.find("r.1") != std::string::npos);
}

TEST_CASE("parse_scene error paths") {
  const std::string base = kTorusJson;
  CHECK(scene_error("{ not json").size() > 0);
  CHECK(scene_error(replace(base, "\"version\": \"1\"", "\"version\": \"2\"")).find("version") !=
        std::string::npos);
  CHECK(scene_error(replace(base, "[[0,0],[1,0],[1,1],[0,1]]", "[[0,0],[0,1],[1,1],[1,0]]"))
            .find("clockwise") != std::string::npos);
  CHECK(scene_error(replace(base, "[[0,0],[1,0],[1,1],[0,1]]", "[[0,0],[1,1],[1,0],[0,1]]")).size() > 0);
  CHECK(scene_error(replace(base, "\"edge\": 0", "\"edge\": 7")).find("out of range") !=
        std::string::npos);
  CHECK(scene_error(replace(base, "\"kind\": \"portal\"", "\"kind\": \"window\"")).find("wall kind") !=
        std::string::npos);
  CHECK(scene_error(replace(base, "[0.2,0.2,0.5]", "[2,0.2,0.5]")).find("camera outside room") !=
        std::string::npos);
  CHECK(scene_error(replace(base, "[0.2,0.2,0.5]", "[0.2,0.2,1.5]")).find("camera outside room") !=
        std::string::npos);
  CHECK(scene_error(replace(base, "\"radius\": 0.2", "\"radius\": -1")).find("radius") !=
        std::string::npos);
  CHECK_THROWS_AS(load_scene_file("/nonexistent/scene.json"), IoError);
}

TEST_CASE("unlisted edges default to solid") {
  const std::string text = replace(kTorusJson,
      R"(,
    {"polygon": "sq", "edge": 1, "kind": "portal", "partner": {"polygon": "sq", "edge": 3}})",
      "");
  const SceneConfig s = parse_scene(text);
  CHECK(s.walls[1].kind == WallKind::solid);
  CHECK(s.walls[3].kind == WallKind::solid);
  CHECK(s.walls[0].kind == WallKind::portal);
}

TEST_CASE("derive_identification_isometry") {
  SUBCASE("torus top/bottom is a unit translation") {
    const Isometry2 g = derive_identification_isometry({{0, 0}, {1, 0}}, {{1, 1}, {0, 1}},
                                                       GluingKind::translation);
    CHECK(std::abs(g.linear[0] - 1) < 1e-12);
    CHECK(std::abs(g.linear[3] - 1) < 1e-12);
    CHECK(length(g.translation - Vec2{0, 1}) < 1e-12);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(derive_identification_isometry({{0, 0}, {1, 0}}, {{2, 1}, {0, 1}},
                                                   GluingKind::translation),
                    SceneError);
  }
  SUBCASE("declared kind must match") {
    CHECK_THROWS_AS(derive_identification_isometry({{0, 0}, {1, 0}}, {{1, 1}, {0, 1}},
                                                   GluingKind::rotation),
                    SceneError);
    CHECK_THROWS_AS(derive_identification_isometry({{2, 0}, {2, 1}}, {{1, 1}, {0, 1}},
                                                   GluingKind::translation),
                    SceneError);
  }
  SUBCASE("reflection has determinant -1") {
    const Isometry2 g = derive_identification_isometry({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}},
                                                       GluingKind::reflection);
    CHECK(std::abs(g.determinant() + 1) < 1e-12);
    CHECK(length(g({0, 0}) - Vec2{1, 1}) < 1e-12);
    CHECK(length(g({1, 0}) - Vec2{0, 1}) < 1e-12);
  }
}

TEST_CASE("cube net quarter-turn gluings send endpoints where expected") {
  const SceneConfig s = builtin_scene("cube_net");
  const Polygon& net = s.polygons[0];
  std::size_t quarter_turns = 0;
  for (std::size_t w = 0; w < s.walls.size(); ++w) {
    const WallRule& rule = s.walls[w];
    REQUIRE(rule.kind == WallKind::portal);
    const DirectedEdge from = s.wall_edge(w);
    const DirectedEdge to = s.wall_edge(rule.partner);
    // Direct endpoint arithmetic with the raw matrix entries.
    const auto& L = rule.isometry.linear;
    const auto& t = rule.isometry.translation;
    const Point2 a{L[0] * from.start.x + L[1] * from.start.y + t.x,
                   L[2] * from.start.x + L[3] * from.start.y + t.y};
    const Point2 b{L[0] * from.end.x + L[1] * from.end.y + t.x,
                   L[2] * from.end.x + L[3] * from.end.y + t.y};
    CHECK(length(a - to.end) < 1e-9);
    CHECK(length(b - to.start) < 1e-9);
    if (std::abs(L[0]) < 1e-12 && std::abs(std::abs(L[1]) - 1) < 1e-12) {
      ++quarter_turns;
      CHECK(std::abs(L[2] + L[1]) < 1e-12);  // rotation, not reflection
    }
  }
  CHECK(quarter_turns == 8);  // four quarter-turn pairs, both directions
  CHECK(net.size() == 14);
}

TEST_CASE("cone angles of the gallery surfaces") {
  SUBCASE("torus") {
    const auto classes = cone_angles(builtin_scene("torus"));
    REQUIRE(classes.size() == 1);
    CHECK(std::abs(classes[0].angle - 2 * kPi) < 1e-6);
    CHECK_FALSE(classes[0].singular);
    CHECK(classes[0].members.size() == 4);
  }
  SUBCASE("L surface") {
    const auto classes = cone_angles(builtin_scene("l_surface"));
    REQUIRE(classes.size() == 1);
    CHECK(std::abs(classes[0].angle - 6 * kPi) < 1e-6);
    CHECK(classes[0].singular);
  }
  SUBCASE("cube net") {
    const auto classes = cone_angles(builtin_scene("cube_net"));
    REQUIRE(classes.size() == 8);
    for (const auto& c : classes) {
      CHECK(std::abs(c.angle - 1.5 * kPi) < 1e-6);
      CHECK(c.singular);
    }
  }
}

TEST_CASE("cone angles agree with the union-find oracle on every builtin") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    const auto got = cone_angles(s);
    const auto want = oracle::cone_classes(s);
    REQUIRE(got.size() == want.size());
    // Match classes by first member; both sides are sorted internally.
    for (const auto& w : want) {
      bool found = false;
      for (const auto& g : got) {
        if (g.members.front().polygon != w.members.front().first ||
            g.members.front().vertex != w.members.front().second) {
          continue;
        }
        found = true;
        REQUIRE(g.members.size() == w.members.size());
        for (std::size_t i = 0; i < g.members.size(); ++i) {
          CHECK(g.members[i].polygon == w.members[i].first);
          CHECK(g.members[i].vertex == w.members[i].second);
        }
        CHECK(std::abs(g.angle - w.angle) < 1e-9);
      }
      CHECK(found);
    }
  }
}

TEST_CASE("total cone angle equals the polygon angle sum") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    double total = 0;
    for (const auto& c : cone_angles(s)) total += c.angle;
    double expected = 0;
    for (const auto& p : s.polygons) expected += (static_cast<double>(p.size()) - 2) * kPi;
    CHECK(std::abs(total - expected) < 1e-6);
  }
}

TEST_CASE("portal isometries invert their partners") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5, 5);
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    for (std::size_t w = 0; w < s.walls.size(); ++w) {
      const WallRule& rule = s.walls[w];
      if (rule.kind != WallKind::portal) continue;
      const WallRule& back = s.walls[rule.partner];
      CHECK(back.partner == w);
      CHECK(std::abs(s.polygons[rule.polygon].edge_length(rule.edge) -
                     s.polygons[back.polygon].edge_length(back.edge)) <= 1e-9);
      const Isometry2 round = back.isometry.compose(rule.isometry);
      const DirectedEdge e = s.wall_edge(w);
      CHECK(max_map_error(round, Isometry2::identity(), e.start) < 1e-9);
      CHECK(max_map_error(round, Isometry2::identity(), e.end) < 1e-9);
      for (int i = 0; i < 100; ++i) {
        const Point2 p{coord(rng), coord(rng)};
        CHECK(max_map_error(round, Isometry2::identity(), p) < 1e-9);
      }
      CHECK(rule.isometry.orthogonality_error() < 1e-9);
    }
  }
}

TEST_CASE("every builtin validates and has the documented shape") {
  CHECK(builtin_scene_names().size() == 9);
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    CHECK(s.name == name);
    CHECK_FALSE(s.objects.empty());
    CHECK(locate_polygon(s, s.camera.position.xy()).has_value());
  }
  const SceneConfig torus = builtin_scene("torus");
  CHECK(torus.walls.size() == 4);
  for (const auto& c : cone_angles(torus)) CHECK_FALSE(c.singular);

  const SceneConfig l = builtin_scene("l_surface");
  CHECK(l.polygons[0].size() == 8);
  CHECK(l.singularity_markers.enabled);
  for (const auto& w : l.walls) {
    CHECK(w.kind == WallKind::portal);
    CHECK(w.gluing == GluingKind::translation);
  }

  const SceneConfig eq = builtin_scene("mirror_triangle_equilateral");
  REQUIRE(eq.polygons.size() == 1);
  CHECK(eq.polygons[0].size() == 3);
  for (const auto& w : eq.walls) CHECK(w.kind == WallKind::mirror);

  CHECK(builtin_scene("double_pentagon").singularity_markers.enabled);
  CHECK(builtin_scene("cube_net").singularity_markers.enabled);
  const SceneConfig prism = builtin_scene("l_prism");
  CHECK(prism.prism.enabled);
  CHECK(prism.prism.period == prism.height);
  CHECK_THROWS_AS(builtin_scene("klein_bottle"), SceneError);
}

TEST_CASE("irrational mirror triangle has the chosen angles") {
  const SceneConfig s = builtin_scene("mirror_triangle_irrational");
  const auto& v = s.polygons[0].vertices;
  const double deg = kPi / 180;
  CHECK(std::abs(oracle::interior_angle(v, 0) - (60 + std::sqrt(2.0)) * deg) < 1e-12);
  CHECK(std::abs(oracle::interior_angle(v, 1) - 75 * deg) < 1e-12);
}

TEST_CASE("double pentagon has unit sides and parallel glued edges") {
  const SceneConfig s = builtin_scene("double_pentagon");
  for (const auto& p : s.polygons) {
    for (std::size_t e = 0; e < p.size(); ++e) CHECK(std::abs(p.edge_length(e) - 1) < 1e-9);
  }
  for (const auto& w : s.walls) CHECK(w.gluing == GluingKind::translation);
}

TEST_CASE("serialize then parse reproduces the scene") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig a = builtin_scene(name);
    const std::string text = serialize_scene(a);
    const SceneConfig b = parse_scene(text);
    CHECK(serialize_scene(b) == text);
    CHECK(a.name == b.name);
    REQUIRE(a.polygons.size() == b.polygons.size());
    for (std::size_t i = 0; i < a.polygons.size(); ++i) {
      REQUIRE(a.polygons[i].size() == b.polygons[i].size());
      for (std::size_t k = 0; k < a.polygons[i].size(); ++k) {
        CHECK(length(a.polygons[i].vertices[k] - b.polygons[i].vertices[k]) <= 1e-12);
      }
    }
    REQUIRE(a.walls.size() == b.walls.size());
    for (std::size_t w = 0; w < a.walls.size(); ++w) {
      CHECK(a.walls[w].kind == b.walls[w].kind);
      CHECK(a.walls[w].partner == b.walls[w].partner);
      CHECK(a.walls[w].gluing == b.walls[w].gluing);
      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(a.walls[w].isometry.linear[k] - b.walls[w].isometry.linear[k]) <= 1e-12);
      }
      CHECK(length(a.walls[w].isometry.translation - b.walls[w].isometry.translation) <= 1e-12);
    }
    CHECK(a.height == doctest::Approx(b.height).epsilon(1e-12));
    CHECK(a.prism.enabled == b.prism.enabled);
    CHECK(a.singularity_markers.enabled == b.singularity_markers.enabled);
    CHECK(a.objects.size() == b.objects.size());
    CHECK(length(a.camera.position - b.camera.position) <= 1e-12);
    CHECK(std::abs(a.camera.yaw - b.camera.yaw) <= 1e-12);
    CHECK(a.render.epsilon == b.render.epsilon);
    CHECK(a.marker_sites.size() == b.marker_sites.size());
  }
}

TEST_CASE("documented scene files match the builtins") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const auto path = fmtest::source_dir() / "docs" / "scenes" / (name + ".json");
    const SceneConfig from_file = load_scene_file(path.string());
    CHECK(serialize_scene(from_file) == serialize_scene(builtin_scene(name)));
  }
}

TEST_CASE("resolve_scene accepts builtin names and paths") {
  CHECK(resolve_scene("builtin:torus").name == "torus");
  CHECK_THROWS_AS(resolve_scene("builtin:nope"), SceneError);
  const auto path = fmtest::source_dir() / "docs" / "scenes" / "torus.json";
  CHECK(resolve_scene(path.string()).name == "torus");
}

TEST_CASE("point_in_polygon is strict") {
  const Polygon sq{"sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  CHECK(point_in_polygon(sq, {0.5, 0.5}));
  CHECK_FALSE(point_in_polygon(sq, {1.5, 0.5}));
  CHECK(sq.signed_area() == doctest::Approx(1.0));
  CHECK(sq.interior_angle(0) == doctest::Approx(kPi / 2));
  CHECK(length(sq.outward_normal(0) - Vec2{0, -1}) < 1e-12);
}
