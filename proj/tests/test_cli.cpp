#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "flatmarch/render.hpp"
#include "test_support.hpp"

using namespace flatmarch;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "flatmarch_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string golden_hash(const std::string& scene) {
  std::istringstream in(fmtest::read_text(fmtest::source_dir() / "tests/goldens/render_sha256.txt"));
  std::string name, hash;
  while (in >> name >> hash) {
    if (name == scene) return hash;
  }
  return "";
}

const char* kMismatchJson = R"({
  "version": "1",
  "name": "mismatch",
  "polygons": [{"id": "r", "vertices": [[0,0],[2,0],[2,1],[0,1]]}],
  "walls": [{"polygon": "r", "edge": 0, "kind": "portal", "partner": {"polygon": "r", "edge": 1}}],
  "camera": {"position": [1,0.5,0.5]}
})";

}  // namespace

TEST_CASE("scenes lists the nine builtins") {
  const Run r = run({"scenes"});
  CHECK(r.code == kExitOk);
  std::istringstream in(r.out);
  std::vector<std::string> names;
  for (std::string line; std::getline(in, line);) names.push_back(line);
  CHECK(names == builtin_scene_names());
}

TEST_CASE("validate") {
  SUBCASE("a builtin") {
    const Run r = run({"validate", "builtin:cube_net"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("ok: cube_net") != std::string::npos);
    CHECK(r.out.find("8 cone points") != std::string::npos);
  }
  SUBCASE("length mismatch names both edges") {
    const auto path = scratch() / "mismatch.json";
    fmtest::write_text(path, kMismatchJson);
    const Run r = run({"validate", path.string()});
    CHECK(r.code == kExitInvalid);
    CHECK(r.err.find("edge length mismatch") != std::string::npos);
    CHECK(r.err.find("r.0") != std::string::npos);
    CHECK(r.err.find("r.1") != std::string::npos);
  }
  SUBCASE("missing file is an I/O error") {
    CHECK(run({"validate", "/nonexistent/scene.json"}).code == kExitIo);
  }
}

TEST_CASE("render writes the golden image") {
  const auto png = scratch() / "l.png";
  const Run r =
      run({"render", "builtin:l_surface", "-o", png.string(), "--width", "64", "--height", "64"});
  REQUIRE(r.code == kExitOk);
  const ImageBuffer img = read_png(png.string());
  CHECK(img.width == 64);
  CHECK(image_hash(img) == golden_hash("l_surface"));
  CHECK(r.out.find(image_hash(img)) != std::string::npos);

  const auto ppm = scratch() / "l.ppm";
  REQUIRE(run({"render", "builtin:l_surface", "-o", ppm.string(), "--width", "64", "--height",
               "64", "--threads", "3"})
              .code == kExitOk);
  CHECK(read_ppm(ppm.string()) == img);
}

TEST_CASE("render options") {
  const auto png = scratch() / "cam.png";
  CHECK(run({"render", "builtin:torus", "-o", png.string(), "--width", "8", "--height", "6",
             "--camera", "0.5,0.5,0.5,1.0,0.1", "--debug-budget"})
            .code == kExitOk);
  CHECK(read_png(png.string()).height == 6);
  CHECK(run({"render", "builtin:torus", "-o", png.string(), "--camera", "1,2"}).code ==
        kExitInvalid);
  CHECK(run({"render", "builtin:torus", "-o", png.string(), "--camera", "9,9,0.5,0,0"}).code ==
        kExitInvalid);
  CHECK(run({"render", "builtin:torus", "-o", "/nonexistent/dir/x.png", "--width", "4",
             "--height", "4"})
            .code == kExitIo);
}

TEST_CASE("floorplan") {
  const auto svg = scratch() / "plan.svg";
  const Run r = run({"floorplan", "builtin:torus", "--start", "0.5,0.5", "--dir", "1,0",
                     "--length", "1", "-o", svg.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("2 segments") != std::string::npos);
  CHECK(fmtest::read_text(svg).find("<path id=\"trace\"") != std::string::npos);

  CHECK(run({"floorplan", "builtin:mirror_triangle_equilateral", "--start", "1,0.5", "--dir",
             "0.3,1", "--crossings", "5", "-o", svg.string()})
            .code == kExitOk);
  CHECK(run({"floorplan", "builtin:torus", "--start", "0.5,0.5", "--dir", "1,0", "-o",
             svg.string()})
            .code == kExitInvalid);
  CHECK(run({"floorplan", "builtin:torus", "--start", "5,5", "--dir", "1,0", "--length", "1",
             "-o", svg.string()})
            .code == kExitInvalid);
}

TEST_CASE("shader") {
  const auto dir = scratch() / "bundle";
  std::filesystem::create_directories(dir);
  CHECK(run({"shader", "builtin:torus", "--dir", dir.string()}).code == kExitOk);
  CHECK(std::filesystem::exists(dir / "torus.frag"));
  CHECK(std::filesystem::exists(dir / "torus.manifest.json"));
  const auto frag = scratch() / "t.frag";
  const auto manifest = scratch() / "t.manifest.json";
  CHECK(run({"shader", "builtin:torus", "-o", frag.string(), "--manifest", manifest.string()})
            .code == kExitOk);
  CHECK(fmtest::read_text(frag) == fmtest::read_text(dir / "torus.frag"));
  CHECK(run({"shader", "builtin:torus", "--dir", (dir / "torus.frag/sub").string()}).code ==
        kExitIo);
}

TEST_CASE("usage errors exit 1 with usage text") {
  const Run unknown = run({"paint", "x"});
  CHECK(unknown.code == kExitInvalid);
  CHECK(unknown.err.find("unknown subcommand 'paint'") != std::string::npos);
  CHECK(unknown.err.find("render") != std::string::npos);

  const Run flag = run({"render", "builtin:torus", "-o", "x.png", "--bogus"});
  CHECK(flag.code == kExitInvalid);
  CHECK(flag.err.find("--width") != std::string::npos);

  CHECK(run({}).code == kExitInvalid);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"--version"}).code == kExitOk);
}
