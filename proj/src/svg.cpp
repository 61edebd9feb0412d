#include "flatmarch/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace flatmarch {

namespace {

constexpr std::array<const char*, 10> kPairColors = {
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
    "#42d4f4", "#f032e6", "#9a6324", "#808000", "#469990",
};

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point(Point2 p) { return num(p.x) + "," + num(p.y); }

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string floorplan_svg(const SceneConfig& scene, std::span<const TraceSegment> segments) {
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi = -lo;
  for (const auto& poly : scene.polygons) {
    for (const auto& v : poly.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
  }
  const Vec2 size = hi - lo;
  const Vec2 pad = size * 0.05;
  const Point2 vmin = lo - pad;
  const Vec2 vsize = size + pad * 2.0;
  const double stroke = std::max(vsize.x, vsize.y) * 0.006;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  // y is flipped inside the group, so the viewBox covers [-ymax, -ymin].
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << num(vmin.x)
      << " " << num(-(vmin.y + vsize.y)) << " " << num(vsize.x) << " " << num(vsize.y) << "\">\n";
  svg << "<title>" << xml_escape(scene.name) << "</title>\n";
  svg << "<g transform=\"scale(1,-1)\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";

  for (const auto& poly : scene.polygons) {
    svg << "<polygon id=\"poly-" << poly.id << "\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) svg << (i ? " " : "") << point(poly.vertices[i]);
    svg << "\" fill=\"#f4f1ea\" stroke=\"none\"/>\n";
  }

  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    const auto& rule = scene.walls[w];
    const DirectedEdge e = scene.wall_edge(w);
    std::string color = "#222222";
    std::string extra;
    std::string cls = "solid";
    if (rule.kind == WallKind::mirror) {
      color = "#5b6d8a";
      cls = "mirror";
      extra = " stroke-dasharray=\"" + num(stroke * 3) + "," + num(stroke * 1.5) + "\"";
    } else if (rule.kind == WallKind::portal) {
      // Color by pair, numbered in order of the lower wall index.
      std::size_t index = 0;
      for (std::size_t k = 0; k < std::min(w, rule.partner); ++k) {
        if (scene.walls[k].kind == WallKind::portal && scene.walls[k].partner > k) ++index;
      }
      color = kPairColors[index % kPairColors.size()];
      cls = "portal pair-" + std::to_string(index);
    }
    svg << "<line class=\"" << cls << "\" x1=\"" << num(e.start.x) << "\" y1=\"" << num(e.start.y)
        << "\" x2=\"" << num(e.end.x) << "\" y2=\"" << num(e.end.y) << "\" stroke=\"" << color
        << "\" stroke-width=\"" << num(stroke * 2) << "\"" << extra << "/>\n";
  }

  for (const auto& cls : cone_angles(scene)) {
    if (!cls.singular) continue;
    for (const auto& m : cls.members) {
      const Point2 v = scene.polygons[m.polygon].vertices[m.vertex];
      svg << "<circle class=\"singular\" cx=\"" << num(v.x) << "\" cy=\"" << num(v.y) << "\" r=\""
          << num(stroke * 2.5) << "\" fill=\"#d62728\"/>\n";
    }
  }

  if (!segments.empty()) {
    svg << "<path id=\"trace\" fill=\"none\" stroke=\"#111111\" stroke-width=\"" << num(stroke)
        << "\" d=\"";
    for (std::size_t i = 0; i < segments.size(); ++i) {
      svg << (i ? " " : "") << "M" << point(segments[i].start) << " L" << point(segments[i].end);
    }
    svg << "\"/>\n";
    const Point2 s = segments.front().start;
    svg << "<circle class=\"trace-start\" cx=\"" << num(s.x) << "\" cy=\"" << num(s.y)
        << "\" r=\"" << num(stroke * 2) << "\" fill=\"#2ca02c\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void export_floorplan_svg(const SceneConfig& scene, std::span<const TraceSegment> segments,
                          const std::string& path) {
  const std::string text = floorplan_svg(scene, segments);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace flatmarch
