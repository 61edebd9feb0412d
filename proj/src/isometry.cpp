#include "flatmarch/isometry.hpp"

#include <algorithm>
#include <cmath>

namespace flatmarch {

Isometry2 Isometry2::rotation_about(Vec2 center, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Isometry2 iso{{c, -s, s, c}, {}};
  iso.translation = center - iso.apply_linear(center);
  return iso;
}

double Isometry2::rotation_angle() const { return std::atan2(linear[2], linear[0]); }

Isometry2 Isometry2::inverse() const {
  // Orthogonal: L^-1 = L^T.
  Isometry2 inv{{linear[0], linear[2], linear[1], linear[3]}, {}};
  inv.translation = -inv.apply_linear(translation);
  return inv;
}

Isometry2 Isometry2::compose(const Isometry2& inner) const {
  const auto& a = linear;
  const auto& b = inner.linear;
  Isometry2 out{{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                 a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]},
                {}};
  out.translation = apply(inner.translation);
  return out;
}

double Isometry2::orthogonality_error() const {
  const auto& m = linear;
  const double e00 = m[0] * m[0] + m[2] * m[2] - 1.0;
  const double e11 = m[1] * m[1] + m[3] * m[3] - 1.0;
  const double e01 = m[0] * m[1] + m[2] * m[3];
  return std::max({std::abs(e00), std::abs(e11), std::abs(e01)});
}

}  // namespace flatmarch
