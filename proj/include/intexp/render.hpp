#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intexp/camera.hpp"
#include "intexp/world.hpp"

namespace intexp {

// One rendered observation. RGB is stored quantized to 8 bits (values k/255);
// depth is the Euclidean hit distance in meters.
struct Frame {
  int width = kFrameWidth;
  int height = kFrameHeight;
  std::vector<std::uint8_t> rgb;     // H*W*3, row-major
  std::vector<float> depth;          // H*W
  std::vector<InstanceId> instance;  // H*W, 0 = architecture
  Camera camera;                     // pose the frame was rendered from
  Camera reported;                   // odometry pose, used for unprojection

  size_t index(int row, int col) const { return static_cast<size_t>(row) * width + col; }
  float rgb_unit(int row, int col, int c) const { return rgb[index(row, col) * 3 + c] / 255.0f; }
  float depth_at(int row, int col) const { return depth[index(row, col)]; }
  InstanceId instance_at(int row, int col) const { return instance[index(row, col)]; }
  int pixel_count(InstanceId id) const;
};

Frame render(const WorldState& world);
// Renders from an explicit camera; `reported` defaults to the same camera.
Frame render(const WorldState& world, const Camera& camera);
Frame render(const WorldState& world, const Camera& camera, const Camera& reported);

// World point seen through pixel (row, col), using the frame's reported camera.
// Throws IndexError for out-of-bounds pixels.
Vec3 unproject(const Frame& frame, int row, int col);

struct Visibility {
  bool visible = false;
  int row = -1, col = -1;
};

// Occlusion-tested visibility of world points (in the reported frame).
std::vector<Visibility> visible_points(const Frame& frame, const std::vector<Vec3>& points,
                                       double tolerance = 0.10);

// |A_I| x H x W binary mask: pixel set where the hit instance would permit the
// interaction in its current state, ignoring inventory and reach.
std::vector<std::uint8_t> ground_truth_affordances(const WorldState& world, const Frame& frame);

void write_ppm(const std::string& path, const Frame& frame);
// 16-bit big-endian PGM of depth in millimeters (clamped to 65535).
void write_depth_pgm(const std::string& path, const Frame& frame);
void write_pgm8(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels);
std::vector<std::uint8_t> read_pgm8(const std::string& path, int& width, int& height);
std::vector<std::uint8_t> read_ppm(const std::string& path, int& width, int& height);

}  // namespace intexp
