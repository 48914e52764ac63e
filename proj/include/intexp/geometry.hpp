#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace intexp {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Axis-aligned box in world meters; y is up.
struct Box {
  Vec3 lo, hi;

  constexpr bool operator==(const Box&) const = default;
  Vec3 center() const { return (lo + hi) * 0.5; }
  bool contains(const Vec3& p, double eps = 0) const {
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps &&
           p.z >= lo.z - eps && p.z <= hi.z + eps;
  }
};

struct RayHit {
  double t = 0;  // distance along a unit direction
  int axis = 0;  // 0/1/2 = x/y/z face that was entered
  bool positive_face = false;
};

// Slab test. Returns the entry distance for rays starting outside the box;
// rays starting inside are treated as misses (the camera never sits in a box).
inline std::optional<RayHit> intersect(const Vec3& origin, const Vec3& dir, const Box& b) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis = 0;
  bool positive = false;
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
  const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[a];
    double t0 = (lo[a] - o[a]) * inv;
    double t1 = (hi[a] - o[a]) * inv;
    bool pos = false;
    if (t0 > t1) {
      std::swap(t0, t1);
      pos = true;  // entering through the high face
    }
    if (t0 > t_near) {
      t_near = t0;
      axis = a;
      positive = pos;
    }
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near <= 1e-9) return std::nullopt;
  return RayHit{t_near, axis, positive};
}

}  // namespace intexp
