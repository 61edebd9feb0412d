#pragma once

#include <array>

#include "flatmarch/vec.hpp"

namespace flatmarch {

/// Planar isometry p -> L p + t with L orthogonal. Acts on horizontal
/// coordinates only; heights pass through unchanged.
struct Isometry2 {
  // Row-major: [a b; c d].
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};
  Vec2 translation{};

  static Isometry2 identity() { return {}; }
  static Isometry2 translate(Vec2 t) { return {{1.0, 0.0, 0.0, 1.0}, t}; }
  /// Rotation by `angle` about `center`.
  static Isometry2 rotation_about(Vec2 center, double angle);

  Vec2 apply_linear(Vec2 v) const {
    return {linear[0] * v.x + linear[1] * v.y, linear[2] * v.x + linear[3] * v.y};
  }
  Vec2 apply(Vec2 p) const { return apply_linear(p) + translation; }
  Vec2 operator()(Vec2 p) const { return apply(p); }

  double determinant() const { return linear[0] * linear[3] - linear[1] * linear[2]; }
  /// Rotation angle of the linear part, in (-pi, pi]. Meaningful when det = +1.
  double rotation_angle() const;
  Isometry2 inverse() const;
  /// (*this) after `inner`: x -> this(inner(x)).
  Isometry2 compose(const Isometry2& inner) const;

  /// Max deviation of L^T L from the identity.
  double orthogonality_error() const;
};

}  // namespace flatmarch
