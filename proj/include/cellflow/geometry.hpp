#pragma once

#include <cmath>

namespace cellflow {

/// Plain 2D vector / point in micrometres (or evolution units inside the smoother).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return a *= (1.0 / s); }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Wedge product a ∧ b = det[a b].
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Rotation used for normals: (a, b)^⊥ = (b, −a).
constexpr Vec2 perp(const Vec2& a) { return {a.y, -a.x}; }

inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(b - a); }

constexpr Vec2 lerp(const Vec2& a, const Vec2& b, double t) { return a + (b - a) * t; }

}  // namespace cellflow
