#include "flatmarch/shader.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "flatmarch/marcher.hpp"
#include "flatmarch/render.hpp"
#include "flatmarch/sdf.hpp"

namespace flatmarch {

namespace {

constexpr std::string_view kShaderBody =
#include "shader_template.inc"
    ;

enum CsgCode : int { op_sphere, op_box, op_cylinder, op_union, op_intersect, op_difference };

struct CsgInstr {
  int op = op_sphere;
  std::array<double, 4> a{};
  std::array<double, 4> b{};
};

// Everything the shader embeds, in one place: emitted as text and parsed back.
struct ShaderTables {
  double height = 1.0;
  bool prism = false;
  double prism_period = 1.0;
  double epsilon = 1e-4;
  int max_steps = 512;
  double max_distance = 100.0;
  int max_teleports = 64;
  double normal_step = 1e-4;
  double wall_transmittance = 0.9;
  double mirror_attenuation = 0.97;
  Rgb fog{};
  Rgb background{};
  int floor_style = 0;
  bool ceiling_solid = false;
  bool headlight = false;
  double camera_fov = 70.0;

  std::vector<std::array<double, 4>> wall_segment;
  std::vector<std::array<double, 2>> wall_normal;
  std::vector<int> wall_kind;
  std::vector<int> wall_partner;
  std::vector<std::array<double, 4>> wall_linear;
  std::vector<std::array<double, 2>> wall_translation;

  std::vector<std::array<int, 2>> object_range;
  std::vector<Rgb> object_color;
  std::vector<CsgInstr> csg;
  int csg_stack = 1;

  std::vector<std::array<double, 2>> marker_site;
  double marker_radius = 0.03;
  Rgb marker_color = kMarkerColor;
};

int floor_code(FloorStyle style) {
  switch (style) {
    case FloorStyle::checker: return 0;
    case FloorStyle::solid: return 1;
    case FloorStyle::none: return 2;
  }
  return 2;
}

int wall_code(WallKind kind) {
  switch (kind) {
    case WallKind::portal: return 0;
    case WallKind::mirror: return 1;
    case WallKind::solid: return 2;
  }
  return 2;
}

// Postfix encoding; returns the stack depth the subtree needs.
int emit_csg(const SdfNode& node, std::vector<CsgInstr>& out) {
  if (node.op == CsgOp::leaf) {
    CsgInstr in;
    switch (node.primitive) {
      case PrimitiveKind::sphere:
        in.op = op_sphere;
        in.a = {node.center.x, node.center.y, node.center.z, node.radius};
        break;
      case PrimitiveKind::box:
        in.op = op_box;
        in.a = {node.center.x, node.center.y, node.center.z, 0.0};
        in.b = {node.half_extents.x, node.half_extents.y, node.half_extents.z, 0.0};
        break;
      case PrimitiveKind::cylinder:
        in.op = op_cylinder;
        in.a = {node.center.x, node.center.y, node.radius, 0.0};
        in.b = {node.z_min, node.z_max, 0.0, 0.0};
        break;
    }
    out.push_back(in);
    return 1;
  }
  const int code = node.op == CsgOp::join        ? op_union
                   : node.op == CsgOp::intersect ? op_intersect
                                                 : op_difference;
  int depth = emit_csg(node.children[0], out);
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    depth = std::max(depth, 1 + emit_csg(node.children[i], out));
    out.push_back({code, {}, {}});
  }
  return depth;
}

ShaderTables build_tables(const SceneConfig& scene) {
  if (scene.walls.size() > kShaderMaxWalls) {
    throw SceneError("scene '" + scene.name + "' has " + std::to_string(scene.walls.size()) +
                     " walls; shaders support at most " + std::to_string(kShaderMaxWalls));
  }
  std::size_t leaves = 0;
  for (const auto& obj : scene.objects) leaves += obj.leaf_count();
  if (leaves > kShaderMaxCsgLeaves) {
    throw SceneError("scene '" + scene.name + "' has " + std::to_string(leaves) +
                     " CSG leaves; shaders support at most " +
                     std::to_string(kShaderMaxCsgLeaves));
  }

  const auto& r = scene.render;
  ShaderTables t;
  t.height = scene.height;
  t.prism = scene.prism.enabled;
  t.prism_period = scene.prism.period;
  t.epsilon = r.epsilon;
  t.max_steps = r.max_steps;
  t.max_distance = r.max_distance;
  t.max_teleports = r.max_teleports;
  t.normal_step = r.normal_step;
  t.wall_transmittance = r.wall_transmittance;
  t.mirror_attenuation = r.mirror_attenuation;
  t.fog = r.fog_color;
  t.background = r.background;
  t.floor_style = floor_code(r.floor_style);
  t.ceiling_solid = r.ceiling_style == CeilingStyle::solid;
  t.headlight = r.headlight;
  t.camera_fov = scene.camera.fov;

  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    const auto& rule = scene.walls[w];
    const DirectedEdge e = scene.wall_edge(w);
    const Vec2 n = scene.wall_outward_normal(w);
    const bool portal = rule.kind == WallKind::portal;
    const Isometry2 iso = portal ? rule.isometry : Isometry2::identity();
    t.wall_segment.push_back({e.start.x, e.start.y, e.end.x, e.end.y});
    t.wall_normal.push_back({n.x, n.y});
    t.wall_kind.push_back(wall_code(rule.kind));
    t.wall_partner.push_back(portal ? static_cast<int>(rule.partner) : -1);
    t.wall_linear.push_back(iso.linear);
    t.wall_translation.push_back({iso.translation.x, iso.translation.y});
  }

  for (const auto& obj : scene.objects) {
    const int begin = static_cast<int>(t.csg.size());
    t.csg_stack = std::max(t.csg_stack, emit_csg(obj, t.csg));
    t.object_range.push_back({begin, static_cast<int>(t.csg.size()) - begin});
    t.object_color.push_back(obj.color);
  }

  for (const auto& site : scene.marker_sites) t.marker_site.push_back({site.x, site.y});
  t.marker_radius = scene.singularity_markers.radius;
  return t;
}

// --- emission -------------------------------------------------------------------

std::string glsl_bool(bool v) { return v ? "true" : "false"; }

template <std::size_t N>
std::string glsl_vec(const std::array<double, N>& v) {
  std::string s = "vec" + std::to_string(N) + "(";
  for (std::size_t i = 0; i < N; ++i) s += (i ? ", " : "") + glsl_float(v[i]);
  return s + ")";
}

std::string glsl_vec3(Rgb c) { return glsl_vec<3>({c.x, c.y, c.z}); }

std::string glsl_ivec2(const std::array<int, 2>& v) {
  return "ivec2(" + std::to_string(v[0]) + ", " + std::to_string(v[1]) + ")";
}

// Arrays may not be empty in GLSL, so unused tables get one zero entry.
template <typename T, typename F>
void emit_array(std::ostringstream& out, const char* type, const char* name,
                const std::vector<T>& values, const T& filler, F format) {
  const std::vector<T>& rows = values.empty() ? std::vector<T>{filler} : values;
  out << "const " << type << " " << name << "[" << rows.size() << "] = " << type << "[](";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << (i ? ",\n    " : "\n    ") << format(rows[i]);
  }
  out << ");\n";
}

std::string sanitize_comment(std::string_view text) {
  std::string out;
  for (char c : text) out += (c >= 0x20 && c < 0x7f) ? c : '?';
  return out;
}

std::string emit_source(const SceneConfig& scene, const ShaderTables& t,
                        const std::string& fingerprint) {
  std::ostringstream out;
  out << "#version 300 es\n";
  out << "// flatmarch scene: " << sanitize_comment(scene.name) << "\n";
  out << "// fingerprint: " << fingerprint << "\n";
  out << "precision highp float;\nprecision highp int;\n\n";
  for (const auto& u : shader_uniforms()) out << "uniform " << u.type << " " << u.name << ";\n";
  out << "\nout vec4 fragColor;\n\n";

  out << "const float ROOM_HEIGHT = " << glsl_float(t.height) << ";\n";
  out << "const bool PRISM = " << glsl_bool(t.prism) << ";\n";
  out << "const float PRISM_PERIOD = " << glsl_float(t.prism_period) << ";\n";
  out << "const float EPSILON = " << glsl_float(t.epsilon) << ";\n";
  out << "const int MAX_STEPS = " << t.max_steps << ";\n";
  out << "const float MAX_DISTANCE = " << glsl_float(t.max_distance) << ";\n";
  out << "const int MAX_TELEPORTS = " << t.max_teleports << ";\n";
  out << "const float ALONG_RAY_MIN_COS = " << glsl_float(kAlongRayMinCos) << ";\n";
  out << "const int REFINE_STEPS = " << kRefineSteps << ";\n";
  out << "const float REFINE_FRACTION = " << glsl_float(kRefineFraction) << ";\n";
  out << "const float NORMAL_STEP = " << glsl_float(t.normal_step) << ";\n";
  out << "const float WALL_TRANSMITTANCE = " << glsl_float(t.wall_transmittance) << ";\n";
  out << "const float MIRROR_ATTENUATION = " << glsl_float(t.mirror_attenuation) << ";\n";
  out << "const vec3 FOG_COLOR = " << glsl_vec3(t.fog) << ";\n";
  out << "const vec3 BACKGROUND = " << glsl_vec3(t.background) << ";\n";
  out << "const int FLOOR_STYLE = " << t.floor_style << ";\n";
  out << "const bool CEILING_SOLID = " << glsl_bool(t.ceiling_solid) << ";\n";
  out << "const bool HEADLIGHT = " << glsl_bool(t.headlight) << ";\n";
  out << "const float CAMERA_FOV = " << glsl_float(t.camera_fov) << ";\n\n";

  out << "const int WALL_COUNT = " << t.wall_segment.size() << ";\n";
  auto v4 = [](const std::array<double, 4>& v) { return glsl_vec<4>(v); };
  auto v2 = [](const std::array<double, 2>& v) { return glsl_vec<2>(v); };
  auto i1 = [](int v) { return std::to_string(v); };
  emit_array(out, "vec4", "WALL_SEGMENT", t.wall_segment, {}, v4);
  emit_array(out, "vec2", "WALL_NORMAL", t.wall_normal, {}, v2);
  emit_array(out, "int", "WALL_KIND", t.wall_kind, 0, i1);
  emit_array(out, "int", "WALL_PARTNER", t.wall_partner, 0, i1);
  emit_array(out, "vec4", "WALL_LINEAR", t.wall_linear, {}, v4);
  emit_array(out, "vec2", "WALL_TRANSLATION", t.wall_translation, {}, v2);
  out << "\n";

  out << "const int OBJECT_COUNT = " << t.object_range.size() << ";\n";
  out << "const int CSG_LENGTH = " << std::max<std::size_t>(t.csg.size(), 1) << ";\n";
  out << "const int CSG_STACK = " << t.csg_stack << ";\n";
  emit_array(out, "ivec2", "OBJECT_RANGE", t.object_range, {}, glsl_ivec2);
  emit_array(out, "vec3", "OBJECT_COLOR", t.object_color, {}, glsl_vec3);
  std::vector<int> ops;
  std::vector<std::array<double, 4>> as, bs;
  for (const auto& in : t.csg) {
    ops.push_back(in.op);
    as.push_back(in.a);
    bs.push_back(in.b);
  }
  emit_array(out, "int", "CSG_OP", ops, 0, i1);
  emit_array(out, "vec4", "CSG_A", as, {}, v4);
  emit_array(out, "vec4", "CSG_B", bs, {}, v4);
  out << "\n";

  out << "const int MARKER_COUNT = " << t.marker_site.size() << ";\n";
  out << "const float MARKER_RADIUS = " << glsl_float(t.marker_radius) << ";\n";
  out << "const vec3 MARKER_COLOR = " << glsl_vec3(t.marker_color) << ";\n";
  emit_array(out, "vec2", "MARKER_SITE", t.marker_site, {}, v2);

  out << kShaderBody;
  return out.str();
}

// --- manifest -------------------------------------------------------------------

nlohmann::json vec_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }
nlohmann::json vec_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

std::string_view floor_name(FloorStyle s) {
  switch (s) {
    case FloorStyle::checker: return "checker";
    case FloorStyle::solid: return "solid";
    case FloorStyle::none: return "none";
  }
  return "none";
}

nlohmann::json build_manifest(const SceneConfig& scene, const std::string& fingerprint) {
  using nlohmann::json;
  json m;
  m["version"] = scene.version;
  m["name"] = scene.name;
  m["fragment"] = scene.name + ".frag";
  m["fingerprint"] = fingerprint;

  json uniforms = json::array();
  for (const auto& u : shader_uniforms()) uniforms.push_back({{"name", u.name}, {"type", u.type}});
  m["uniforms"] = uniforms;

  Point2 lo = scene.polygons.front().vertices.front();
  Point2 hi = lo;
  for (const auto& poly : scene.polygons) {
    for (const auto& v : poly.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
  }
  m["bounds"] = {{"min", json::array({lo.x, lo.y, 0.0})},
                 {"max", json::array({hi.x, hi.y, scene.height})}};
  m["height"] = scene.height;
  m["prism"] = {{"enabled", scene.prism.enabled}, {"period", scene.prism.period}};

  json walls = json::array();
  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    const auto& rule = scene.walls[w];
    const DirectedEdge e = scene.wall_edge(w);
    const Vec2 n = scene.wall_outward_normal(w);
    json plane = {
        {"index", w},
        {"label", scene.wall_label(w)},
        {"kind", std::string(to_string(rule.kind))},
        {"point", vec_json(e.start)},
        {"end", vec_json(e.end)},
        {"normal", vec_json(n)},
        {"offset", dot(n, e.start)},
    };
    if (rule.kind == WallKind::portal) {
      plane["partnerIndex"] = rule.partner;
      plane["gluing"] = std::string(to_string(rule.gluing));
      plane["isometry"] = {
          {"linear", rule.isometry.linear},
          {"translation", vec_json(rule.isometry.translation)},
          {"rotation", rule.isometry.rotation_angle()},
          {"determinant", rule.isometry.determinant()},
      };
    } else {
      plane["partnerIndex"] = nullptr;
      plane["isometry"] = nullptr;
    }
    walls.push_back(plane);
  }
  m["wallPlanes"] = walls;

  const auto& c = scene.camera;
  m["camera"] = {{"position", vec_json(c.position)},
                 {"yaw", c.yaw},
                 {"pitch", c.pitch},
                 {"fov", c.fov}};

  const auto& r = scene.render;
  m["settings"] = {
      {"epsilon", r.epsilon},
      {"maxSteps", r.max_steps},
      {"maxDistance", r.max_distance},
      {"maxTeleports", r.max_teleports},
      {"normalStep", r.normal_step},
      {"fogColor", vec_json(r.fog_color)},
      {"wallTint", {{"color", vec_json(r.wall_tint_color)},
                    {"transmittance", r.wall_transmittance}}},
      {"mirrorAttenuation", r.mirror_attenuation},
      {"background", vec_json(r.background)},
      {"floorStyle", std::string(floor_name(r.floor_style))},
      {"ceilingStyle", r.ceiling_style == CeilingStyle::solid ? "solid" : "none"},
      {"headlight", r.headlight},
  };
  return m;
}

// --- parsing the tables back ----------------------------------------------------------

// Numbers (and true/false) in a constant initializer, in order. Identifiers such
// as `vec4` are skipped whole so their digits are not mistaken for values.
std::vector<double> initializer_values(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && ident(text[j])) ++j;
      const std::string_view word = text.substr(i, j - i);
      if (word == "true") out.push_back(1.0);
      if (word == "false") out.push_back(0.0);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               ((c == '-' || c == '.') && i + 1 < text.size() &&
                (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '.'))) {
      double v = 0.0;
      const auto res = std::from_chars(text.data() + i, text.data() + text.size(), v);
      if (res.ec != std::errc()) throw SceneError("unparsable shader constant near offset " +
                                                  std::to_string(i));
      out.push_back(v);
      i = static_cast<std::size_t>(res.ptr - text.data());
    } else {
      ++i;
    }
  }
  return out;
}

class ConstantTable {
 public:
  explicit ConstantTable(std::string_view source) {
    std::size_t pos = 0;
    while ((pos = source.find("const ", pos)) != std::string_view::npos) {
      if (pos > 0 && source[pos - 1] != '\n') {
        pos += 6;
        continue;
      }
      const std::size_t eq = source.find('=', pos);
      const std::size_t semi = source.find(';', pos);
      if (eq == std::string_view::npos || semi == std::string_view::npos || eq > semi) break;
      std::istringstream decl(std::string(source.substr(pos + 6, eq - pos - 6)));
      std::string type, name;
      decl >> type >> name;
      name = name.substr(0, name.find('['));
      values_[name] = initializer_values(source.substr(eq + 1, semi - eq - 1));
      pos = semi;
    }
  }

  const std::vector<double>& values(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw SceneError("shader lacks constant " + name);
    return it->second;
  }
  double scalar(const std::string& name) const { return values(name).at(0); }
  int integer(const std::string& name) const { return static_cast<int>(scalar(name)); }
  bool flag(const std::string& name) const { return scalar(name) != 0.0; }
  Rgb rgb(const std::string& name) const {
    const auto& v = values(name);
    return {v.at(0), v.at(1), v.at(2)};
  }
  // Row `row` of an array whose entries have `width` components.
  double at(const std::string& name, std::size_t row, std::size_t width, std::size_t k) const {
    return values(name).at(row * width + k);
  }

 private:
  std::map<std::string, std::vector<double>> values_;
};

SdfNode rebuild_csg(const ConstantTable& c, int begin, int count, Rgb color) {
  std::vector<SdfNode> stack;
  for (int i = begin; i < begin + count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const int op = static_cast<int>(c.at("CSG_OP", k, 1, 0));
    auto a = [&](std::size_t j) { return c.at("CSG_A", k, 4, j); };
    auto b = [&](std::size_t j) { return c.at("CSG_B", k, 4, j); };
    switch (op) {
      case op_sphere: stack.push_back(SdfNode::sphere({a(0), a(1), a(2)}, a(3))); break;
      case op_box: stack.push_back(SdfNode::box({a(0), a(1), a(2)}, {b(0), b(1), b(2)})); break;
      case op_cylinder: stack.push_back(SdfNode::cylinder({a(0), a(1)}, a(2), b(0), b(1))); break;
      default: {
        if (stack.size() < 2) throw SceneError("malformed CSG program in shader");
        SdfNode rhs = std::move(stack.back());
        stack.pop_back();
        SdfNode lhs = std::move(stack.back());
        stack.pop_back();
        const CsgOp cop = op == op_union       ? CsgOp::join
                          : op == op_intersect ? CsgOp::intersect
                                               : CsgOp::subtract;
        stack.push_back(SdfNode::combine(cop, {std::move(lhs), std::move(rhs)}));
      }
    }
  }
  if (stack.size() != 1) throw SceneError("malformed CSG program in shader");
  stack.front().color = color;
  return std::move(stack.front());
}

}  // namespace

const std::vector<ShaderUniform>& shader_uniforms() {
  static const std::vector<ShaderUniform> uniforms = {
      {"uResolution", "vec2"}, {"uCamPos", "vec3"}, {"uCamYaw", "float"},
      {"uCamPitch", "float"},  {"uTime", "float"},
  };
  return uniforms;
}

std::string ShaderBundle::manifest_text() const { return manifest.dump(2) + "\n"; }

std::string glsl_float(double value) {
  if (!std::isfinite(value)) throw SceneError("non-finite constant cannot be embedded in a shader");
  if (value == 0.0) value = 0.0;
  // Same layout as printf("%#.9g"), but via to_chars so the locale cannot interfere.
  char buf[64];
  const auto sci = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 8);
  const std::string s(buf, sci.ptr);
  const int exponent = std::stoi(s.substr(s.find('e') + 1));
  if (exponent < -4 || exponent >= 9) return s;
  const auto fixed =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 8 - exponent);
  std::string f(buf, fixed.ptr);
  if (f.find('.') == std::string::npos) f += '.';
  return f;
}

std::string scene_fingerprint(const SceneConfig& scene) {
  return "sha256:" + sha256_hex(serialize_scene(scene));
}

ShaderBundle synthesize_fragment_shader(const SceneConfig& scene) {
  const ShaderTables tables = build_tables(scene);
  const std::string fingerprint = scene_fingerprint(scene);
  ShaderBundle bundle;
  bundle.name = scene.name;
  bundle.fragment_source = emit_source(scene, tables, fingerprint);
  bundle.manifest = build_manifest(scene, fingerprint);
  return bundle;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_bundle(const ShaderBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_text_file(dir / (bundle.name + ".frag"), bundle.fragment_source);
  write_text_file(dir / (bundle.name + ".manifest.json"), bundle.manifest_text());
}

SceneConfig scene_from_shader(std::string_view fragment_source, const nlohmann::json& manifest) {
  const ConstantTable c(fragment_source);
  SceneConfig scene;
  scene.name = manifest.at("name").get<std::string>();
  scene.height = c.scalar("ROOM_HEIGHT");
  scene.prism = {c.flag("PRISM"), c.scalar("PRISM_PERIOD")};

  auto& r = scene.render;
  r.epsilon = c.scalar("EPSILON");
  r.max_steps = c.integer("MAX_STEPS");
  r.max_distance = c.scalar("MAX_DISTANCE");
  r.max_teleports = c.integer("MAX_TELEPORTS");
  r.normal_step = c.scalar("NORMAL_STEP");
  r.wall_transmittance = c.scalar("WALL_TRANSMITTANCE");
  r.mirror_attenuation = c.scalar("MIRROR_ATTENUATION");
  r.fog_color = c.rgb("FOG_COLOR");
  r.wall_tint_color = r.fog_color;
  r.background = c.rgb("BACKGROUND");
  const int floor = c.integer("FLOOR_STYLE");
  r.floor_style = floor == 0 ? FloorStyle::checker : floor == 1 ? FloorStyle::solid : FloorStyle::none;
  r.ceiling_style = c.flag("CEILING_SOLID") ? CeilingStyle::solid : CeilingStyle::none;
  r.headlight = c.flag("HEADLIGHT");

  // Polygons are the closed runs of consecutive wall segments.
  const auto walls = static_cast<std::size_t>(c.integer("WALL_COUNT"));
  Polygon current;
  for (std::size_t w = 0; w < walls; ++w) {
    const Point2 start{c.at("WALL_SEGMENT", w, 4, 0), c.at("WALL_SEGMENT", w, 4, 1)};
    const Point2 end{c.at("WALL_SEGMENT", w, 4, 2), c.at("WALL_SEGMENT", w, 4, 3)};
    if (current.vertices.empty()) scene.wall_offset.push_back(w);
    current.vertices.push_back(start);
    if (end.x == current.vertices.front().x && end.y == current.vertices.front().y) {
      current.id = "p" + std::to_string(scene.polygons.size());
      scene.polygons.push_back(std::move(current));
      current = {};
    }
  }
  if (!current.vertices.empty()) throw SceneError("shader wall table does not close");

  for (std::size_t p = 0; p < scene.polygons.size(); ++p) {
    for (std::size_t e = 0; e < scene.polygons[p].size(); ++e) {
      const std::size_t w = scene.wall_offset[p] + e;
      WallRule rule;
      rule.polygon = p;
      rule.edge = e;
      const int kind = static_cast<int>(c.at("WALL_KIND", w, 1, 0));
      rule.kind = kind == 0 ? WallKind::portal : kind == 1 ? WallKind::mirror : WallKind::solid;
      if (rule.kind == WallKind::portal) {
        rule.partner = static_cast<std::size_t>(c.at("WALL_PARTNER", w, 1, 0));
        for (std::size_t k = 0; k < 4; ++k) rule.isometry.linear[k] = c.at("WALL_LINEAR", w, 4, k);
        rule.isometry.translation = {c.at("WALL_TRANSLATION", w, 2, 0),
                                     c.at("WALL_TRANSLATION", w, 2, 1)};
        rule.gluing = rule.isometry.determinant() < 0.0 ? GluingKind::reflection
                      : rule.isometry.orthogonality_error() < 1e-6 &&
                              std::abs(rule.isometry.rotation_angle()) < 1e-9
                          ? GluingKind::translation
                          : GluingKind::rotation;
      }
      scene.walls.push_back(rule);
    }
  }

  const auto objects = static_cast<std::size_t>(c.integer("OBJECT_COUNT"));
  for (std::size_t k = 0; k < objects; ++k) {
    const int begin = static_cast<int>(c.at("OBJECT_RANGE", k, 2, 0));
    const int count = static_cast<int>(c.at("OBJECT_RANGE", k, 2, 1));
    const Rgb color{c.at("OBJECT_COLOR", k, 3, 0), c.at("OBJECT_COLOR", k, 3, 1),
                    c.at("OBJECT_COLOR", k, 3, 2)};
    scene.objects.push_back(rebuild_csg(c, begin, count, color));
  }

  const auto markers = static_cast<std::size_t>(c.integer("MARKER_COUNT"));
  scene.singularity_markers = {markers > 0, c.scalar("MARKER_RADIUS")};
  for (std::size_t k = 0; k < markers; ++k) {
    scene.marker_sites.push_back({c.at("MARKER_SITE", k, 2, 0), c.at("MARKER_SITE", k, 2, 1)});
  }

  const auto& cam = manifest.at("camera");
  const auto& pos = cam.at("position");
  scene.camera = {{pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()},
                  cam.at("yaw").get<double>(),
                  cam.at("pitch").get<double>(),
                  c.scalar("CAMERA_FOV")};
  return scene;
}

}  // namespace flatmarch
