#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "flatmarch/scene.hpp"

namespace flatmarch {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw SceneError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw SceneError(where + ": unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SceneError(where + ": missing '" + key + "'");
  return *it;
}

double read_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SceneError(where + " must be a number");
  return v.get<double>();
}

int read_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SceneError(where + " must be an integer");
  return v.get<int>();
}

std::size_t read_index(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw SceneError(where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

bool read_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw SceneError(where + " must be a boolean");
  return v.get<bool>();
}

std::string read_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SceneError(where + " must be a string");
  return v.get<std::string>();
}

std::vector<double> read_numbers(const json& v, std::size_t count, const std::string& where) {
  if (!v.is_array() || v.size() != count) {
    throw SceneError(where + " must be an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(read_number(v[i], where));
  return out;
}

Vec2 read_vec2(const json& v, const std::string& where) {
  const auto n = read_numbers(v, 2, where);
  return {n[0], n[1]};
}

Vec3 read_vec3(const json& v, const std::string& where) {
  const auto n = read_numbers(v, 3, where);
  return {n[0], n[1], n[2]};
}

template <typename F>
void optional_field(const json& obj, const char* key, F&& apply) {
  const auto it = obj.find(key);
  if (it != obj.end()) apply(*it);
}

EdgeRef read_edge_ref(const json& v, const std::string& where) {
  check_keys(v, {"polygon", "edge"}, where);
  return {read_string(require(v, "polygon", where), where + ".polygon"),
          read_index(require(v, "edge", where), where + ".edge")};
}

WallKind read_wall_kind(const json& v, const std::string& where) {
  const std::string s = read_string(v, where);
  if (s == "portal") return WallKind::portal;
  if (s == "mirror") return WallKind::mirror;
  if (s == "solid") return WallKind::solid;
  throw SceneError("unknown wall kind '" + s + "' at " + where);
}

GluingKind read_gluing(const json& v, const std::string& where) {
  const std::string s = read_string(v, where);
  if (s == "translation") return GluingKind::translation;
  if (s == "rotation") return GluingKind::rotation;
  if (s == "reflection") return GluingKind::reflection;
  throw SceneError("unknown gluing kind '" + s + "' at " + where);
}

SdfNode read_node(const json& v, const std::string& where) {
  if (!v.is_object()) throw SceneError(where + " must be an object");
  const std::string type = read_string(require(v, "type", where), where + ".type");
  SdfNode node;
  optional_field(v, "color", [&](const json& c) { node.color = read_vec3(c, where + ".color"); });
  if (type == "sphere") {
    check_keys(v, {"type", "color", "center", "radius"}, where);
    node.primitive = PrimitiveKind::sphere;
    node.center = read_vec3(require(v, "center", where), where + ".center");
    node.radius = read_number(require(v, "radius", where), where + ".radius");
  } else if (type == "box") {
    check_keys(v, {"type", "color", "center", "half_extents"}, where);
    node.primitive = PrimitiveKind::box;
    node.center = read_vec3(require(v, "center", where), where + ".center");
    node.half_extents = read_vec3(require(v, "half_extents", where), where + ".half_extents");
  } else if (type == "cylinder") {
    check_keys(v, {"type", "color", "axis", "radius", "z_range"}, where);
    node.primitive = PrimitiveKind::cylinder;
    const Vec2 axis = read_vec2(require(v, "axis", where), where + ".axis");
    const Vec2 zr = read_vec2(require(v, "z_range", where), where + ".z_range");
    node.radius = read_number(require(v, "radius", where), where + ".radius");
    node.z_min = zr.x;
    node.z_max = zr.y;
    node.center = {axis.x, axis.y, 0.5 * (zr.x + zr.y)};
  } else if (type == "union" || type == "intersection" || type == "difference") {
    check_keys(v, {"type", "color", "children"}, where);
    node.op = type == "union" ? CsgOp::join : type == "intersection" ? CsgOp::intersect
                                                                      : CsgOp::subtract;
    const json& kids = require(v, "children", where);
    if (!kids.is_array()) throw SceneError(where + ".children must be an array");
    for (std::size_t i = 0; i < kids.size(); ++i) {
      node.children.push_back(read_node(kids[i], where + ".children[" + std::to_string(i) + "]"));
    }
  } else {
    throw SceneError(where + ": unknown object type '" + type + "'");
  }
  return node;
}

RenderSettings read_render(const json& v) {
  const std::string where = "render";
  check_keys(v,
             {"epsilon", "max_steps", "max_distance", "max_teleports", "normal_step", "fog_color",
              "wall_tint", "mirror_attenuation", "background", "floor_style", "ceiling_style",
              "headlight"},
             where);
  RenderSettings r;
  optional_field(v, "epsilon", [&](const json& x) { r.epsilon = read_number(x, "render.epsilon"); });
  optional_field(v, "max_steps", [&](const json& x) { r.max_steps = read_int(x, "render.max_steps"); });
  optional_field(v, "max_distance",
                 [&](const json& x) { r.max_distance = read_number(x, "render.max_distance"); });
  optional_field(v, "max_teleports",
                 [&](const json& x) { r.max_teleports = read_int(x, "render.max_teleports"); });
  optional_field(v, "normal_step",
                 [&](const json& x) { r.normal_step = read_number(x, "render.normal_step"); });
  optional_field(v, "wall_tint", [&](const json& x) {
    check_keys(x, {"color", "transmittance"}, "render.wall_tint");
    optional_field(x, "color", [&](const json& c) {
      r.wall_tint_color = read_vec3(c, "render.wall_tint.color");
      r.fog_color = r.wall_tint_color;
    });
    optional_field(x, "transmittance", [&](const json& t) {
      r.wall_transmittance = read_number(t, "render.wall_tint.transmittance");
    });
  });
  // Fog defaults to the wall tint color when not given separately.
  optional_field(v, "fog_color", [&](const json& x) { r.fog_color = read_vec3(x, "render.fog_color"); });
  optional_field(v, "mirror_attenuation", [&](const json& x) {
    r.mirror_attenuation = read_number(x, "render.mirror_attenuation");
  });
  optional_field(v, "background",
                 [&](const json& x) { r.background = read_vec3(x, "render.background"); });
  optional_field(v, "floor_style", [&](const json& x) {
    const std::string s = read_string(x, "render.floor_style");
    if (s == "checker") r.floor_style = FloorStyle::checker;
    else if (s == "solid") r.floor_style = FloorStyle::solid;
    else if (s == "none") r.floor_style = FloorStyle::none;
    else throw SceneError("unknown floor_style '" + s + "'");
  });
  optional_field(v, "ceiling_style", [&](const json& x) {
    const std::string s = read_string(x, "render.ceiling_style");
    if (s == "solid") r.ceiling_style = CeilingStyle::solid;
    else if (s == "none") r.ceiling_style = CeilingStyle::none;
    else throw SceneError("unknown ceiling_style '" + s + "'");
  });
  optional_field(v, "headlight", [&](const json& x) { r.headlight = read_bool(x, "render.headlight"); });
  return r;
}

ordered_json write_vec(Vec2 v) { return ordered_json::array({v.x, v.y}); }
ordered_json write_vec(Vec3 v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json write_node(const SdfNode& n) {
  ordered_json out;
  switch (n.op) {
    case CsgOp::leaf:
      switch (n.primitive) {
        case PrimitiveKind::sphere:
          out["type"] = "sphere";
          out["center"] = write_vec(n.center);
          out["radius"] = n.radius;
          break;
        case PrimitiveKind::box:
          out["type"] = "box";
          out["center"] = write_vec(n.center);
          out["half_extents"] = write_vec(n.half_extents);
          break;
        case PrimitiveKind::cylinder:
          out["type"] = "cylinder";
          out["axis"] = write_vec(n.center.xy());
          out["radius"] = n.radius;
          out["z_range"] = ordered_json::array({n.z_min, n.z_max});
          break;
      }
      break;
    case CsgOp::join:
    case CsgOp::intersect:
    case CsgOp::subtract: {
      out["type"] = n.op == CsgOp::join ? "union" : n.op == CsgOp::intersect ? "intersection"
                                                                             : "difference";
      ordered_json kids = ordered_json::array();
      for (const auto& c : n.children) kids.push_back(write_node(c));
      out["children"] = std::move(kids);
      break;
    }
  }
  out["color"] = write_vec(n.color);
  return out;
}

}  // namespace

SceneConfig parse_scene(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc,
             {"version", "name", "polygons", "walls", "height", "prism", "singularity_markers",
              "objects", "render", "camera"},
             "scene");

  SceneSpec spec;
  spec.version = read_string(require(doc, "version", "scene"), "version");
  if (spec.version != "1") throw SceneError("unknown scene version '" + spec.version + "'");
  spec.name = read_string(require(doc, "name", "scene"), "name");

  const json& polys = require(doc, "polygons", "scene");
  if (!polys.is_array()) throw SceneError("polygons must be an array");
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const std::string where = "polygons[" + std::to_string(i) + "]";
    check_keys(polys[i], {"id", "vertices"}, where);
    Polygon poly;
    poly.id = read_string(require(polys[i], "id", where), where + ".id");
    const json& verts = require(polys[i], "vertices", where);
    if (!verts.is_array()) throw SceneError(where + ".vertices must be an array");
    for (std::size_t k = 0; k < verts.size(); ++k) {
      poly.vertices.push_back(read_vec2(verts[k], where + ".vertices[" + std::to_string(k) + "]"));
    }
    spec.polygons.push_back(std::move(poly));
  }

  optional_field(doc, "walls", [&](const json& walls) {
    if (!walls.is_array()) throw SceneError("walls must be an array");
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const std::string where = "walls[" + std::to_string(i) + "]";
      check_keys(walls[i], {"polygon", "edge", "kind", "partner", "gluing"}, where);
      WallSpec ws;
      ws.edge.polygon = read_string(require(walls[i], "polygon", where), where + ".polygon");
      ws.edge.edge = read_index(require(walls[i], "edge", where), where + ".edge");
      ws.kind = read_wall_kind(require(walls[i], "kind", where), where + ".kind");
      optional_field(walls[i], "partner",
                     [&](const json& p) { ws.partner = read_edge_ref(p, where + ".partner"); });
      optional_field(walls[i], "gluing",
                     [&](const json& g) { ws.gluing = read_gluing(g, where + ".gluing"); });
      spec.walls.push_back(std::move(ws));
    }
  });

  optional_field(doc, "height", [&](const json& h) { spec.height = read_number(h, "height"); });
  optional_field(doc, "prism", [&](const json& p) {
    check_keys(p, {"enabled", "period"}, "prism");
    optional_field(p, "enabled", [&](const json& e) { spec.prism_enabled = read_bool(e, "prism.enabled"); });
    optional_field(p, "period", [&](const json& e) { spec.prism_period = read_number(e, "prism.period"); });
  });
  optional_field(doc, "singularity_markers", [&](const json& m) {
    check_keys(m, {"enabled", "radius"}, "singularity_markers");
    optional_field(m, "enabled", [&](const json& e) {
      spec.singularity_markers.enabled = read_bool(e, "singularity_markers.enabled");
    });
    optional_field(m, "radius", [&](const json& e) {
      spec.singularity_markers.radius = read_number(e, "singularity_markers.radius");
    });
  });
  optional_field(doc, "objects", [&](const json& objs) {
    if (!objs.is_array()) throw SceneError("objects must be an array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      spec.objects.push_back(read_node(objs[i], "objects[" + std::to_string(i) + "]"));
    }
  });
  optional_field(doc, "render", [&](const json& r) { spec.render = read_render(r); });
  optional_field(doc, "camera", [&](const json& c) {
    check_keys(c, {"position", "yaw", "pitch", "fov"}, "camera");
    optional_field(c, "position",
                   [&](const json& x) { spec.camera.position = read_vec3(x, "camera.position"); });
    optional_field(c, "yaw", [&](const json& x) { spec.camera.yaw = read_number(x, "camera.yaw"); });
    optional_field(c, "pitch", [&](const json& x) { spec.camera.pitch = read_number(x, "camera.pitch"); });
    optional_field(c, "fov", [&](const json& x) { spec.camera.fov = read_number(x, "camera.fov"); });
  });
  return build_scene(spec);
}

SceneConfig load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scene file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string serialize_scene(const SceneConfig& scene) {
  ordered_json doc;
  doc["version"] = scene.version;
  doc["name"] = scene.name;

  ordered_json polys = ordered_json::array();
  for (const auto& p : scene.polygons) {
    ordered_json verts = ordered_json::array();
    for (const auto& v : p.vertices) verts.push_back(write_vec(v));
    polys.push_back({{"id", p.id}, {"vertices", std::move(verts)}});
  }
  doc["polygons"] = std::move(polys);

  ordered_json walls = ordered_json::array();
  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    const auto& rule = scene.walls[w];
    ordered_json entry;
    entry["polygon"] = scene.polygons[rule.polygon].id;
    entry["edge"] = rule.edge;
    entry["kind"] = std::string(to_string(rule.kind));
    if (rule.kind == WallKind::portal) {
      const auto& other = scene.walls[rule.partner];
      entry["partner"] = {{"polygon", scene.polygons[other.polygon].id}, {"edge", other.edge}};
      entry["gluing"] = std::string(to_string(rule.gluing));
    }
    walls.push_back(std::move(entry));
  }
  doc["walls"] = std::move(walls);
  doc["height"] = scene.height;
  doc["prism"] = {{"enabled", scene.prism.enabled}, {"period", scene.prism.period}};
  doc["singularity_markers"] = {{"enabled", scene.singularity_markers.enabled},
                                {"radius", scene.singularity_markers.radius}};
  ordered_json objs = ordered_json::array();
  for (const auto& o : scene.objects) objs.push_back(write_node(o));
  doc["objects"] = std::move(objs);

  const auto& r = scene.render;
  ordered_json render;
  render["epsilon"] = r.epsilon;
  render["max_steps"] = r.max_steps;
  render["max_distance"] = r.max_distance;
  render["max_teleports"] = r.max_teleports;
  render["normal_step"] = r.normal_step;
  render["fog_color"] = write_vec(r.fog_color);
  render["wall_tint"] = {{"color", write_vec(r.wall_tint_color)},
                         {"transmittance", r.wall_transmittance}};
  render["mirror_attenuation"] = r.mirror_attenuation;
  render["background"] = write_vec(r.background);
  render["floor_style"] = r.floor_style == FloorStyle::checker ? "checker"
                          : r.floor_style == FloorStyle::solid ? "solid"
                                                               : "none";
  render["ceiling_style"] = r.ceiling_style == CeilingStyle::solid ? "solid" : "none";
  render["headlight"] = r.headlight;
  doc["render"] = std::move(render);

  doc["camera"] = {{"position", write_vec(scene.camera.position)},
                   {"yaw", scene.camera.yaw},
                   {"pitch", scene.camera.pitch},
                   {"fov", scene.camera.fov}};
  return doc.dump(2) + "\n";
}

SceneConfig resolve_scene(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_scene(source.substr(prefix.size()));
  return load_scene_file(source);
}

}  // namespace flatmarch
