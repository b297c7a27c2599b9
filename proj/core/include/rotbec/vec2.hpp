#pragma once

#include <cmath>

namespace rotbec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  /// Rotation by +90 degrees: (x, y) -> (-y, x).
  [[nodiscard]] constexpr Vec2 perp() const { return {-y, x}; }
  [[nodiscard]] constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double norm_sq() const { return x * x + y * y; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
};

}  // namespace rotbec
