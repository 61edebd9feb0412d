#include <doctest.h>

#include <filesystem>
#include <regex>
#include <set>

#include <unistd.h>

#include "flatmarch/render.hpp"
#include "flatmarch/shader.hpp"
#include "test_support.hpp"

using namespace flatmarch;
using nlohmann::json;

namespace {

std::set<std::string> declared_uniforms(const std::string& source) {
  std::set<std::string> out;
  const std::regex decl(R"(^uniform\s+\w+\s+(\w+)\s*;)", std::regex::multiline);
  for (auto it = std::sregex_iterator(source.begin(), source.end(), decl);
       it != std::sregex_iterator(); ++it) {
    out.insert((*it)[1].str());
  }
  return out;
}

SceneSpec square_room(std::string name) {
  SceneSpec s;
  s.name = std::move(name);
  s.polygons = {{"sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  s.walls = {{{"sq", 0}, WallKind::portal, EdgeRef{"sq", 2}, std::nullopt},
             {{"sq", 1}, WallKind::portal, EdgeRef{"sq", 3}, std::nullopt}};
  return s;
}

}  // namespace

TEST_CASE("shader bundles match the committed goldens") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const ShaderBundle b = synthesize_fragment_shader(builtin_scene(name));
    CHECK(b.name == name);
    const std::string frag_diff = fmtest::check_golden("shaders/" + name + ".frag", b.fragment_source);
    CHECK_MESSAGE(frag_diff.empty(), frag_diff);
    const std::string manifest_diff =
        fmtest::check_golden("shaders/" + name + ".manifest.json", b.manifest_text());
    CHECK_MESSAGE(manifest_diff.empty(), manifest_diff);
  }
}

TEST_CASE("synthesis is deterministic") {
  for (const auto& name : builtin_scene_names()) {
    const SceneConfig s = builtin_scene(name);
    const ShaderBundle a = synthesize_fragment_shader(s);
    const ShaderBundle b = synthesize_fragment_shader(s);
    CHECK(a.fragment_source == b.fragment_source);
    CHECK(a.manifest_text() == b.manifest_text());
  }
}

TEST_CASE("header, dialect and uniforms") {
  const SceneConfig s = builtin_scene("torus");
  const ShaderBundle b = synthesize_fragment_shader(s);
  CHECK(b.fragment_source.starts_with("#version 300 es\n"));
  CHECK(b.fragment_source.find("// flatmarch scene: torus\n") != std::string::npos);
  CHECK(b.fragment_source.find("// fingerprint: " + scene_fingerprint(s)) != std::string::npos);
  CHECK(scene_fingerprint(s) == "sha256:" + sha256_hex(std::string_view(serialize_scene(s))));

  const std::set<std::string> declared = declared_uniforms(b.fragment_source);
  std::set<std::string> listed;
  for (const auto& u : b.manifest["uniforms"]) listed.insert(u["name"].get<std::string>());
  CHECK(declared == listed);
  CHECK(listed == std::set<std::string>{"uResolution", "uCamPos", "uCamYaw", "uCamPitch", "uTime"});
}

TEST_CASE("manifest isometries invert and cover every portal") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    const json m = synthesize_fragment_shader(s).manifest;
    const auto& walls = m["wallPlanes"];
    REQUIRE(walls.size() == s.walls.size());
    for (std::size_t w = 0; w < walls.size(); ++w) {
      const auto& plane = walls[w];
      CHECK(plane["kind"] == std::string(to_string(s.walls[w].kind)));
      if (s.walls[w].kind != WallKind::portal) {
        CHECK(plane["isometry"].is_null());
        continue;
      }
      const std::size_t partner = plane["partnerIndex"].get<std::size_t>();
      CHECK(partner == s.walls[w].partner);
      const auto iso = [](const json& j) {
        Isometry2 g;
        for (int k = 0; k < 4; ++k) g.linear[k] = j["linear"][k].get<double>();
        g.translation = {j["translation"][0].get<double>(), j["translation"][1].get<double>()};
        return g;
      };
      const Isometry2 there = iso(plane["isometry"]);
      const Isometry2 back = iso(walls[partner]["isometry"]);
      const Isometry2 round = back.compose(there);
      for (Point2 p : {Point2{0, 0}, Point2{1, 0}, Point2{0.3, -2.5}, Point2{4, 7}}) {
        CHECK(length(round(p) - p) < 1e-9);
      }
      // The plane equation describes the wall.
      const Vec2 n{plane["normal"][0].get<double>(), plane["normal"][1].get<double>()};
      const Point2 a{plane["point"][0].get<double>(), plane["point"][1].get<double>()};
      CHECK(std::abs(dot(n, a) - plane["offset"].get<double>()) < 1e-12);
    }
  }
}

TEST_CASE("embedded constants reproduce the CPU renders") {
  for (const auto& name : builtin_scene_names()) {
    CAPTURE(name);
    const SceneConfig s = builtin_scene(name);
    const ShaderBundle b = synthesize_fragment_shader(s);
    const SceneConfig back = scene_from_shader(b.fragment_source, b.manifest);
    const CameraFrame cam = CameraFrame::from_scene(s);
    CHECK(image_hash(render_image(back, CameraFrame::from_scene(back), 64, 64)) ==
          image_hash(render_image(s, cam, 64, 64)));
  }
}

TEST_CASE("scene without objects") {
  SceneSpec spec = square_room("empty_room");
  const SceneConfig s = build_scene(spec);
  const ShaderBundle b = synthesize_fragment_shader(s);
  CHECK(b.fragment_source.find("const int OBJECT_COUNT = 0;") != std::string::npos);
  CHECK(b.fragment_source.find("void main()") != std::string::npos);
  const SceneConfig back = scene_from_shader(b.fragment_source, b.manifest);
  CHECK(back.objects.empty());
  CHECK(render_image(back, CameraFrame::from_scene(back), 16, 16) ==
        render_image(s, CameraFrame::from_scene(s), 16, 16));
}

TEST_CASE("limits on embedded constants") {
  SUBCASE("too many CSG leaves") {
    SceneSpec spec = square_room("crowded");
    for (int i = 0; i < 33; ++i) {
      spec.objects.push_back(SdfNode::sphere({0.5, 0.5, 0.5}, 0.01 + 0.001 * i));
    }
    CHECK_THROWS_AS(synthesize_fragment_shader(build_scene(spec)), SceneError);
    spec.objects.pop_back();
    CHECK_NOTHROW(synthesize_fragment_shader(build_scene(spec)));
  }
  SUBCASE("too many walls") {
    SceneSpec spec;
    spec.name = "many_walls";
    Polygon poly{"ring", {}};
    for (int i = 0; i < 65; ++i) {
      const double a = 2 * std::acos(-1.0) * i / 65;
      poly.vertices.push_back({std::cos(a), std::sin(a)});
    }
    spec.polygons = {poly};
    spec.camera.position = {0, 0, 0.5};
    CHECK_THROWS_AS(synthesize_fragment_shader(build_scene(spec)), SceneError);
  }
}

TEST_CASE("glsl_float formatting") {
  CHECK(glsl_float(0.0) == "0.00000000");
  CHECK(glsl_float(-0.0) == "0.00000000");
  CHECK(glsl_float(1.0) == "1.00000000");
  CHECK(glsl_float(-0.5) == "-0.500000000");
  CHECK(glsl_float(123456789.0) == "123456789.");
  CHECK(glsl_float(1234567890.0) == "1.23456789e+09");
  CHECK(glsl_float(3.14159265358979) == "3.14159265");
  CHECK(glsl_float(1e-5) == "1.00000000e-05");
  // Nine significant digits survive a round trip through float parsing.
  for (double v : {0.1, 1.0 / 3.0, -2.718281828, 1e-4, 42.0}) {
    const double back = std::stod(glsl_float(v));
    CHECK(std::abs(back - v) <= std::abs(v) * 1e-8);
  }
}

TEST_CASE("write_bundle") {
  const auto dir = std::filesystem::temp_directory_path() / "flatmarch_bundle_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const ShaderBundle b = synthesize_fragment_shader(builtin_scene("torus"));
  write_bundle(b, dir);
  CHECK(std::filesystem::exists(dir / "torus.frag"));
  CHECK(fmtest::read_text(dir / "torus.frag") == b.fragment_source);
  CHECK(json::parse(fmtest::read_text(dir / "torus.manifest.json")) == b.manifest);

  // A regular file where the directory should be.
  const auto blocker = dir / "blocker";
  fmtest::write_text(blocker, "x");
  CHECK_THROWS_AS(write_bundle(b, blocker / "sub"), IoError);

  // Permission bits do not bind root, so the read-only case only runs unprivileged.
  if (geteuid() != 0) {
    const auto locked = dir / "locked";
    std::filesystem::create_directories(locked);
    std::filesystem::permissions(locked, std::filesystem::perms::owner_read |
                                             std::filesystem::perms::owner_exec);
    CHECK_THROWS_AS(write_bundle(b, locked), IoError);
    std::filesystem::permissions(locked, std::filesystem::perms::owner_all);
  }
  std::filesystem::remove_all(dir);
}
