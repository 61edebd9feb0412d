#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "flatmarch/scene.hpp"
#include "flatmarch/sdf.hpp"
#include "flatmarch/surface.hpp"

namespace flatmarch {

enum class HitStatus { hit, miss, budget_exhausted };

std::string_view to_string(HitStatus status);

struct HitResult {
  HitStatus status = HitStatus::miss;
  Point3 point{};
  Direction3 direction{};              // ray direction at termination, base-room frame
  std::optional<Direction3> normal;    // hit only; empty when the gradient degenerates
  SurfaceTag tag{};
  double traveled = 0.0;
  int teleports = 0;
  double transmittance = 1.0;
  int steps = 0;
};

/// Wall and wrap-plane crossings at incidence cosine >= this move along the ray,
/// so `traveled` stays the unfolded path length; below it they push along the normal.
inline constexpr double kAlongRayMinCos = 0.2;
/// After the eps threshold, up to this many extra steps refine a hit to
/// eps * kRefineFraction of the surface it belongs to.
inline constexpr int kRefineSteps = 64;
inline constexpr double kRefineFraction = 1e-3;

/// Called once per SDF evaluation with the current ray state.
using StepObserver = std::function<void(const Ray3&, const TaggedDistance&)>;

/// Sphere traces `ray` through the flat room. Portals, mirrors and prism wrap
/// planes redirect the ray; objects, solid walls and solid floors/ceilings stop it.
HitResult march(const SceneConfig& scene, const Ray3& ray, const StepObserver& observer = {});

/// Normal-map shading: 0.5 * (n + 1) times the material color, checkered on
/// checker floors, blended toward the fog color by the lost transmittance.
Rgb shade(const SceneConfig& scene, const HitResult& hit);

/// base * transmittance + fog * (1 - transmittance).
Rgb blend_fog(Rgb base, double transmittance, Rgb fog);

/// Checker period on floors styled "checker", in scene units.
inline constexpr double kCheckerPeriod = 0.25;

}  // namespace flatmarch
