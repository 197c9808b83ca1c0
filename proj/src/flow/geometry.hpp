#pragma once

#include <cmath>

namespace pcy::flow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 unit() const {
    double n = norm();
    return {x / n, y / n};
  }
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Mat2 operator-() const { return {-a11, -a12, -a21, -a22}; }
  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};

}  // namespace pcy::flow
