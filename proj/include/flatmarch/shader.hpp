#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flatmarch/scene.hpp"

namespace flatmarch {

/// Loop bounds in the emitted shader are compile-time, so scenes are capped.
inline constexpr std::size_t kShaderMaxWalls = 64;
inline constexpr std::size_t kShaderMaxCsgLeaves = 32;

struct ShaderUniform {
  std::string name;
  std::string type;
};

/// Uniforms declared by every emitted shader, in declaration order.
const std::vector<ShaderUniform>& shader_uniforms();

/// A GLSL ES 3.00 fragment shader for one scene plus the viewer manifest.
struct ShaderBundle {
  std::string name;
  std::string fragment_source;
  nlohmann::json manifest;

  /// Manifest as written to disk: sorted keys, two-space indent, trailing newline.
  std::string manifest_text() const;
};

/// Emits the shader and manifest. Byte-deterministic. Throws SceneError when the
/// scene exceeds kShaderMaxWalls walls or kShaderMaxCsgLeaves CSG leaves.
ShaderBundle synthesize_fragment_shader(const SceneConfig& scene);

/// Writes <dir>/<name>.frag and <dir>/<name>.manifest.json, creating <dir> if
/// needed. Throws IoError.
void write_bundle(const ShaderBundle& bundle, const std::filesystem::path& dir);
/// Writes a single text file. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// GLSL float literal: 9 significant digits, always with a decimal point,
/// negative zero printed as zero. Locale independent.
std::string glsl_float(double value);

/// SHA-256 of the canonical scene serialization, "sha256:<hex>".
std::string scene_fingerprint(const SceneConfig& scene);

/// Rebuilds a renderable scene from the constant tables of an emitted shader
/// (the camera comes from the manifest). Used to check that the embedded
/// constants still describe the scene they were generated from.
SceneConfig scene_from_shader(std::string_view fragment_source, const nlohmann::json& manifest);

}  // namespace flatmarch
