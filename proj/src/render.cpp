#include "flatmarch/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <omp.h>

namespace flatmarch {

namespace {

constexpr double kPitchLimit = std::numbers::pi / 2 - 1e-6;
constexpr std::array<std::uint8_t, 3> kBudgetDebugColor{255, 0, 255};

}  // namespace

CameraFrame CameraFrame::make(Point3 position, double yaw, double pitch, double fov) {
  CameraFrame cam;
  cam.position = position;
  cam.yaw = yaw;
  cam.pitch = std::clamp(pitch, -kPitchLimit, kPitchLimit);
  cam.fov = fov;
  const double cp = std::cos(cam.pitch);
  cam.forward = {cp * std::cos(yaw), cp * std::sin(yaw), std::sin(cam.pitch)};
  cam.right = {std::sin(yaw), -std::cos(yaw), 0.0};
  cam.up = cross(cam.right, cam.forward);
  return cam;
}

CameraFrame CameraFrame::from_scene(const SceneConfig& scene) {
  const auto& c = scene.camera;
  return make(c.position, c.yaw, c.pitch, c.fov);
}

Ray3 generate_camera_ray(const CameraFrame& cam, int px, int py, int width, int height) {
  const double half = std::tan(0.5 * cam.fov * std::numbers::pi / 180.0);
  const double sx = ((2.0 * px + 1.0) / width - 1.0) * half;
  const double sy = (1.0 - (2.0 * py + 1.0) / height) * half * height / width;
  Ray3 ray;
  ray.origin = cam.position;
  ray.direction = normalize(cam.forward + cam.right * sx + cam.up * sy);
  return ray;
}

ImageBuffer::ImageBuffer(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be >= 1");
  pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

std::array<std::uint8_t, 3> encode_srgb(Rgb color) {
  auto channel = [](double v) {
    const double g = std::pow(std::clamp(v, 0.0, 1.0), 1.0 / 2.2);
    return static_cast<std::uint8_t>(std::lround(g * 255.0));
  };
  return {channel(color.x), channel(color.y), channel(color.z)};
}

std::array<std::uint8_t, 3> render_pixel(const SceneConfig& scene, const CameraFrame& cam, int px,
                                         int py, int width, int height,
                                         const RenderOptions& options) {
  const HitResult hit = march(scene, generate_camera_ray(cam, px, py, width, height));
  if (options.debug_budget && hit.status == HitStatus::budget_exhausted) return kBudgetDebugColor;
  return encode_srgb(shade(scene, hit));
}

ImageBuffer render_image(const SceneConfig& scene, const CameraFrame& cam, int width, int height,
                         int threads, const RenderOptions& options) {
  ImageBuffer image(width, height);
  const int team = threads > 0 ? threads : omp_get_max_threads();
  // Rows are independent and each writes only its own slice of the buffer.
#pragma omp parallel for num_threads(team) schedule(dynamic, 1)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto rgb = render_pixel(scene, cam, x, y, width, height, options);
      std::copy(rgb.begin(), rgb.end(), image.at(x, y));
    }
  }
  return image;
}

ImageBuffer render_image_serial(const SceneConfig& scene, const CameraFrame& cam, int width,
                                int height, const RenderOptions& options) {
  ImageBuffer image(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto rgb = render_pixel(scene, cam, x, y, width, height, options);
      std::copy(rgb.begin(), rgb.end(), image.at(x, y));
    }
  }
  return image;
}

}  // namespace flatmarch
