#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flatmarch/marcher.hpp"
#include "flatmarch/scene.hpp"
#include "flatmarch/surface.hpp"

namespace flatmarch {

/// Pinhole camera. Yaw turns about +z (0 looks along +x), pitch tilts up.
struct CameraFrame {
  Point3 position{};
  double yaw = 0.0;
  double pitch = 0.0;  // clamped into (-pi/2, pi/2)
  double fov = 70.0;   // horizontal, degrees
  Direction3 right{};
  Direction3 up{};
  Direction3 forward{};

  static CameraFrame make(Point3 position, double yaw, double pitch, double fov);
  static CameraFrame from_scene(const SceneConfig& scene);
};

/// Ray through the center of pixel (px, py); py = 0 is the top row.
Ray3 generate_camera_ray(const CameraFrame& cam, int px, int py, int width, int height);

/// Row-major 8-bit RGB.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h);
  std::uint8_t* at(int x, int y) { return &pixels[3 * (static_cast<std::size_t>(y) * width + x)]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[3 * (static_cast<std::size_t>(y) * width + x)];
  }
  bool operator==(const ImageBuffer&) const = default;
};

struct RenderOptions {
  /// Paint rays that ran out of steps or teleports magenta instead of background.
  bool debug_budget = false;
};

/// Gamma 2.2 encoding of a linear color to 8 bits per channel.
std::array<std::uint8_t, 3> encode_srgb(Rgb color);

/// shade(march(...)) for one pixel, encoded.
std::array<std::uint8_t, 3> render_pixel(const SceneConfig& scene, const CameraFrame& cam, int px,
                                         int py, int width, int height,
                                         const RenderOptions& options = {});

/// OpenMP kernel, parallel over rows. Output is byte-identical for every thread
/// count; `threads` <= 0 uses the OpenMP default.
ImageBuffer render_image(const SceneConfig& scene, const CameraFrame& cam, int width, int height,
                         int threads = 0, const RenderOptions& options = {});

/// Single-threaded reference implementation of render_image.
ImageBuffer render_image_serial(const SceneConfig& scene, const CameraFrame& cam, int width,
                                int height, const RenderOptions& options = {});

// --- image files -------------------------------------------------------------------

void write_png(const ImageBuffer& image, const std::string& path);
ImageBuffer read_png(const std::string& path);
/// Binary PPM (P6).
void write_ppm(const ImageBuffer& image, const std::string& path);
ImageBuffer read_ppm(const std::string& path);
/// PPM for a ".ppm" extension, PNG otherwise.
void write_image(const ImageBuffer& image, const std::string& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
/// SHA-256 of the raw pixel bytes.
std::string image_hash(const ImageBuffer& image);

}  // namespace flatmarch
