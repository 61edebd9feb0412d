#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "flatmarch/render.hpp"
#include "flatmarch/scene.hpp"
#include "flatmarch/shader.hpp"
#include "flatmarch/svg.hpp"
#include "flatmarch/trace2d.hpp"

namespace flatmarch {

namespace {

// Comma-separated reals, e.g. "0.5,0.25". Throws SceneError on a count mismatch.
std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      throw SceneError(std::string(what) + ": '" + text + "' is not a list of numbers");
    }
    values.push_back(v);
    pos = comma + 1;
  }
  if (values.size() != count) {
    throw SceneError(std::string(what) + " expects " + std::to_string(count) + " values, got " +
                     std::to_string(values.size()));
  }
  return values;
}

struct RenderArgs {
  std::string scene;
  std::string output;
  int width = 640;
  int height = 480;
  std::string camera;
  int threads = 0;
  bool debug_budget = false;
};

struct FloorplanArgs {
  std::string scene;
  std::string output;
  std::string start;
  std::string dir;
  std::string polygon;
  double length = 0.0;
  int crossings = 0;
};

struct ShaderArgs {
  std::string scene;
  std::string output;
  std::string manifest;
  std::string dir;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  SceneConfig scene = resolve_scene(a.scene);
  if (!a.camera.empty()) {
    const auto v = parse_reals(a.camera, 5, "--camera");
    scene.camera.position = {v[0], v[1], v[2]};
    scene.camera.yaw = v[3];
    scene.camera.pitch = v[4];
    validate_camera(scene);
  }
  const auto cam = CameraFrame::from_scene(scene);
  const ImageBuffer image =
      render_image(scene, cam, a.width, a.height, a.threads, {.debug_budget = a.debug_budget});
  write_image(image, a.output);
  out << "wrote " << a.output << " (" << a.width << "x" << a.height << ", sha256 "
      << image_hash(image) << ")\n";
  return kExitOk;
}

int cmd_floorplan(const FloorplanArgs& a, std::ostream& out) {
  const SceneConfig scene = resolve_scene(a.scene);
  const auto s = parse_reals(a.start, 2, "--start");
  const auto d = parse_reals(a.dir, 2, "--dir");
  const Point2 start{s[0], s[1]};
  Direction2 dir{d[0], d[1]};
  if (!(length(dir) > 0.0)) throw SceneError("--dir must be non-zero");
  dir = normalize(dir);

  std::optional<std::size_t> polygon;
  if (!a.polygon.empty()) {
    polygon = scene.polygon_index(a.polygon);
    if (!polygon) throw SceneError("unknown polygon '" + a.polygon + "'");
  } else {
    polygon = locate_polygon(scene, start);
    if (!polygon) throw SceneError("--start is not inside any polygon");
  }
  TraceBudget budget = LengthBudget{a.length};
  if (a.crossings > 0) budget = CrossingBudget{a.crossings};
  const TraceResult trace = trace_geodesic_2d(scene, *polygon, start, dir, budget);
  export_floorplan_svg(scene, trace.segments, a.output);
  out << "wrote " << a.output << " (" << trace.segments.size() << " segments, length "
      << trace.length << ", " << to_string(trace.status) << ")\n";
  return kExitOk;
}

int cmd_shader(const ShaderArgs& a, std::ostream& out) {
  const SceneConfig scene = resolve_scene(a.scene);
  const ShaderBundle bundle = synthesize_fragment_shader(scene);
  if (!a.dir.empty()) {
    write_bundle(bundle, a.dir);
    out << "wrote " << bundle.name << ".frag and " << bundle.name << ".manifest.json to " << a.dir
        << "\n";
  }
  if (!a.output.empty()) {
    write_text_file(a.output, bundle.fragment_source);
    out << "wrote " << a.output << "\n";
  }
  if (!a.manifest.empty()) {
    write_text_file(a.manifest, bundle.manifest_text());
    out << "wrote " << a.manifest << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& source, std::ostream& out) {
  const SceneConfig scene = resolve_scene(source);
  std::size_t portals = 0, mirrors = 0;
  for (const auto& w : scene.walls) {
    portals += w.kind == WallKind::portal;
    mirrors += w.kind == WallKind::mirror;
  }
  std::size_t singular = 0;
  for (const auto& cls : cone_angles(scene)) singular += cls.singular;
  auto count = [](std::size_t n, const char* noun) {
    return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
  };
  out << "ok: " << scene.name << " (" << count(scene.polygons.size(), "polygon") << ", "
      << count(scene.walls.size(), "wall") << ", " << count(portals / 2, "portal pair") << ", "
      << count(mirrors, "mirror") << ", " << count(singular, "cone point") << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sphere-traced flat surfaces: render, trace, and compile scenes to shaders",
               "flatmarch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flatmarch 1.0.0");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render a scene to PNG (or PPM for .ppm)");
  render_cmd->add_option("scene", render.scene, "scene.json or builtin:NAME")->required();
  render_cmd->add_option("-o,--output", render.output, "output image")->required();
  render_cmd->add_option("--width", render.width, "image width")->check(CLI::Range(1, 16384));
  render_cmd->add_option("--height", render.height, "image height")->check(CLI::Range(1, 16384));
  render_cmd->add_option("--camera", render.camera, "camera override x,y,z,yaw,pitch");
  render_cmd->add_option("--threads", render.threads, "worker threads (0 = all)")
      ->check(CLI::Range(0, 1024));
  render_cmd->add_flag("--debug-budget", render.debug_budget,
                       "paint rays that exhaust the step/teleport budget magenta");

  FloorplanArgs plan;
  auto* plan_cmd = app.add_subcommand("floorplan", "Trace a 2D geodesic and write an SVG plan");
  plan_cmd->add_option("scene", plan.scene, "scene.json or builtin:NAME")->required();
  plan_cmd->add_option("-o,--output", plan.output, "output SVG")->required();
  plan_cmd->add_option("--start", plan.start, "start point x,y")->required();
  plan_cmd->add_option("--dir", plan.dir, "direction dx,dy (normalized)")->required();
  plan_cmd->add_option("--polygon", plan.polygon, "polygon containing the start point");
  auto* length_opt =
      plan_cmd->add_option("--length", plan.length, "path length")->check(CLI::PositiveNumber);
  auto* crossings_opt = plan_cmd->add_option("--crossings", plan.crossings, "boundary events")
                            ->check(CLI::PositiveNumber);
  length_opt->excludes(crossings_opt);

  ShaderArgs shader;
  auto* shader_cmd = app.add_subcommand("shader", "Compile a scene to a GLSL fragment shader");
  shader_cmd->add_option("scene", shader.scene, "scene.json or builtin:NAME")->required();
  auto* frag_opt = shader_cmd->add_option("-o,--output", shader.output, "output .frag");
  shader_cmd->add_option("--manifest", shader.manifest, "output .manifest.json");
  auto* dir_opt =
      shader_cmd->add_option("--dir", shader.dir, "write <name>.frag and <name>.manifest.json");
  frag_opt->excludes(dir_opt);

  app.add_subcommand("scenes", "List builtin scenes");

  std::string validate_source;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scene file and summarize it");
  validate_cmd->add_option("scene", validate_source, "scene.json or builtin:NAME")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (plan_cmd->parsed() && length_opt->count() == 0 && crossings_opt->count() == 0) {
      throw CLI::RequiredError("--length or --crossings");
    }
    if (shader_cmd->parsed() && frag_opt->count() == 0 && dir_opt->count() == 0) {
      throw CLI::RequiredError("-o or --dir");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    if (!args.empty() && !args.front().starts_with("-") && !app.get_subcommand_no_throw(args.front())) {
      message = "unknown subcommand '" + args.front() + "'";
    }
    const CLI::App* context = &app;
    for (const auto* sub : app.get_subcommands()) context = sub;
    err << "error: " << message << "\n\n" << context->help();
    return kExitInvalid;
  }

  try {
    if (render_cmd->parsed()) return cmd_render(render, out);
    if (plan_cmd->parsed()) return cmd_floorplan(plan, out);
    if (shader_cmd->parsed()) return cmd_shader(shader, out);
    if (validate_cmd->parsed()) return cmd_validate(validate_source, out);
    for (const auto& name : builtin_scene_names()) out << name << "\n";
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SceneError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace flatmarch
