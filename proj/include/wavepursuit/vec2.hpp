#pragma once

#include <cmath>

namespace wavepursuit {

/// Plain 2-D vector in workspace coordinates (meters, or meters/second for velocities).
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
  friend constexpr Vec2 operator/(Vec2 a, double s) { return Vec2{a.x / s, a.y / s}; }
  friend constexpr Vec2 operator-(const Vec2& a) { return Vec2{-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

}  // namespace wavepursuit
