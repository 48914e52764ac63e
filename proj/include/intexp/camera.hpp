#pragma once

#include <cmath>
#include <optional>

#include "intexp/geometry.hpp"

namespace intexp {

inline constexpr int kFrameWidth = 80;
inline constexpr int kFrameHeight = 80;
inline constexpr double kHorizontalFovDeg = 90.0;
inline constexpr double kEyeHeight = 1.5;

inline double deg2rad(double d) { return d * M_PI / 180.0; }

struct PixelCoord {
  double u = 0;  // column, continuous (pixel j spans [j, j+1))
  double v = 0;  // row
  double distance = 0;
};

// Pinhole camera. Yaw is measured from +x toward +z (grid rows grow along +z),
// pitch is positive when looking up. The principal point sits on the center of
// pixel (H/2, W/2), so that pixel's ray is exactly the optical axis and is the
// same ray worldsim uses to pick interaction targets.
struct Camera {
  Vec3 eye;
  double yaw_deg = 0;
  double pitch_deg = 0;
  int width = kFrameWidth;
  int height = kFrameHeight;
  double hfov_deg = kHorizontalFovDeg;

  double fx() const { return (width / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0); }
  double fy() const { return fx(); }
  double cx() const { return width / 2 + 0.5; }
  double cy() const { return height / 2 + 0.5; }
  int center_row() const { return height / 2; }
  int center_col() const { return width / 2; }

  Vec3 forward() const {
    const double y = deg2rad(yaw_deg), p = deg2rad(pitch_deg);
    return {std::cos(p) * std::cos(y), std::sin(p), std::cos(p) * std::sin(y)};
  }
  Vec3 right() const {
    const double y = deg2rad(yaw_deg);
    return {-std::sin(y), 0.0, std::cos(y)};
  }
  Vec3 up() const {
    const double y = deg2rad(yaw_deg), p = deg2rad(pitch_deg);
    return {-std::sin(p) * std::cos(y), std::cos(p), -std::sin(p) * std::sin(y)};
  }

  // Unit direction through continuous image coordinates (u, v).
  Vec3 ray(double u, double v) const {
    const Vec3 d = forward() + right() * ((u - cx()) / fx()) + up() * (-(v - cy()) / fy());
    return d.normalized();
  }
  Vec3 pixel_ray(int row, int col) const { return ray(col + 0.5, row + 0.5); }

  std::optional<PixelCoord> project(const Vec3& p) const {
    const Vec3 q = p - eye;
    const double zc = q.dot(forward());
    if (zc <= 1e-9) return std::nullopt;
    const double xc = q.dot(right());
    const double yc = q.dot(up());
    return PixelCoord{cx() + fx() * xc / zc, cy() - fy() * yc / zc, q.norm()};
  }

  Vec3 unproject(double u, double v, double distance) const { return eye + ray(u, v) * distance; }

  bool in_image(double u, double v) const { return u >= 0 && v >= 0 && u < width && v < height; }
};

}  // namespace intexp
