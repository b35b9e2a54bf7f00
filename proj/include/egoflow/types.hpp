// Copyright 2026 The egoflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Value types shared by every stage of the ego-motion pipeline.

#ifndef EGOFLOW_TYPES_HPP
#define EGOFLOW_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace egoflow {

/// Maps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// SAD value reserved to mark a macroblock that carries no usable vector
/// (textureless block rejected by the matcher). Real SADs saturate one below.
inline constexpr std::uint32_t kInvalidSad = 0xFFFF;
inline constexpr std::uint32_t kMaxSad = 0xFFFE;

/// Per-macroblock displacement in whole pixels from frame t to frame t+dt.
/// The in-memory type is wider than the wire record; the codec range-checks.
struct MotionVector {
  int du = 0;
  int dv = 0;
  std::uint32_t sad = 0;

  bool usable() const { return sad != kInvalidSad; }
  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

/// Grid of motion vectors for one encoded frame. `timestamp` is the capture
/// time of the frame the vectors point into.
struct FlowField {
  std::uint32_t frame_index = 0;
  double timestamp = 0.0;
  int grid_w = 0;
  int grid_h = 0;
  int macroblock_size = 16;
  std::vector<MotionVector> vectors;  // row-major, grid_w * grid_h

  const MotionVector& at(int col, int row) const {
    return vectors[static_cast<std::size_t>(row) * grid_w + col];
  }
  MotionVector& at(int col, int row) {
    return vectors[static_cast<std::size_t>(row) * grid_w + col];
  }
  /// Pixel coordinates of a macroblock center (top-left + size/2).
  double center_u(int col) const {
    return col * macroblock_size + macroblock_size / 2.0;
  }
  double center_v(int row) const {
    return row * macroblock_size + macroblock_size / 2.0;
  }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Pinhole intrinsics. `focal_px` is the focal length divided by the pixel
/// pitch, the only form the metric conversion needs.
struct CameraIntrinsics {
  double focal_px = 640.0;
  double cx = 239.5;
  double cy = 239.5;
  int image_w = 480;
  int image_h = 480;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Body rates in rad/s about the camera axes (z = optical axis).
struct GyroSample {
  double timestamp = 0.0;
  double wx = 0.0;
  double wy = 0.0;
  double wz = 0.0;
};

/// Camera-to-ground distance in meters.
struct RangeSample {
  double timestamp = 0.0;
  double z = 0.0;
};

/// Image-plane rigid motion: dst = R(theta) * src + (tx, ty).
struct RigidTransform2D {
  double theta = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  double apply_u(double u, double v) const {
    return std::cos(theta) * u - std::sin(theta) * v + tx;
  }
  double apply_v(double u, double v) const {
    return std::sin(theta) * u + std::cos(theta) * v + ty;
  }
};

/// Metric ego-motion for one frame interval, in the camera/body frame.
struct VelocityEstimate {
  double timestamp = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
  double z_used = 0.0;
  int inlier_count = 0;
  int valid_count = 0;
  bool valid = true;
  // Range was stale for this interval and the last valid one was reused.
  bool degraded = false;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Pose tagged with the time it refers to.
struct StampedPose {
  double timestamp = 0.0;
  Pose2D pose;
};

}  // namespace egoflow

#endif  // EGOFLOW_TYPES_HPP
