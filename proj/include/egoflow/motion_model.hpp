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

// Robust image-plane motion model: a 2D rigid transform fitted to the
// motion-vector field with RANSAC, plus removal of the flow induced by
// roll/pitch rotation measured by a gyroscope.

#ifndef EGOFLOW_MOTION_MODEL_HPP
#define EGOFLOW_MOTION_MODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "egoflow/types.hpp"

namespace egoflow {

struct RansacParams {
  int iterations = 210;
  double inlier_threshold = 3.0;  // pixels
  int min_inliers = 6;
  double confidence = 0.99;  // only consumed by ransac_iterations()
  std::uint64_t seed = 0;

  void validate() const;
};

/// Point pair: macroblock center in frame t and where it moved to.
struct Correspondence {
  double src_u = 0.0;
  double src_v = 0.0;
  double dst_u = 0.0;
  double dst_v = 0.0;
};

/// Closed-form least-squares rigid fit (no scale) minimizing
/// sum |R(theta) src + t - dst|^2. Throws DegenerateSampleError for fewer
/// than two pairs or coincident source points.
RigidTransform2D fit_rigid_2d(std::span<const Correspondence> pairs);

/// Least-squares rotation about the origin, sum |R(theta) src - dst|^2.
/// Throws DegenerateSampleError when every source point is the origin.
double fit_rotation_about_origin(std::span<const Correspondence> pairs);

/// Correspondences for every usable vector in `field`, in grid order.
/// `indices`, when given, receives the grid index of each entry.
std::vector<Correspondence> correspondences_from_field(
    const FlowField& field, std::vector<std::size_t>* indices = nullptr);

struct RansacResult {
  RigidTransform2D transform;
  std::vector<bool> inlier_mask;  // one entry per input (or grid cell)
  int inlier_count = 0;
  int valid_count = 0;  // entries that took part in the fit
};

/// Two-point RANSAC over correspondences. Hypotheses rank by inlier count,
/// then by lower summed inlier residual, then by earlier iteration. The
/// winner is refit on its inliers. Deterministic for a fixed seed. Throws
/// NoConsensusError when fewer than min_inliers support the best model.
RansacResult ransac_rigid(std::span<const Correspondence> pairs,
                          const RansacParams& params);

/// Same, over the usable vectors of a flow field. Coordinates are raw pixel
/// positions, so the rotation is about the image origin.
RansacResult ransac_rigid(const FlowField& field, const RansacParams& params);

/// Standard iteration count for reaching `confidence` of drawing at least
/// one outlier-free sample: ceil(log(1 - p) / log(1 - (1 - e)^s)).
int ransac_iterations(double outlier_ratio, int sample_size,
                      double confidence);

struct GyroRates {
  double wx = 0.0;
  double wy = 0.0;
  double wz = 0.0;
};

/// Time-weighted mean rate over [t0, t1] of the piecewise-linear signal
/// through `samples` (held constant beyond the first and last sample).
GyroRates average_gyro(std::span<const GyroSample> samples, double t0,
                       double t1);

struct PixelShift {
  double tx = 0.0;
  double ty = 0.0;
};

/// Removes the image shift induced by rotation about the camera x/y axes:
/// (tx - f tan(wy dt), ty - f tan(wx dt)).
PixelShift compensate_rotation(PixelShift t, double wx, double wy, double dt,
                               const CameraIntrinsics& cam);

/// Small-angle form of compensate_rotation: (tx - f wy dt, ty - f wx dt).
PixelShift compensate_rotation_linear(PixelShift t, double wx, double wy,
                                      double dt, const CameraIntrinsics& cam);

/// Re-expresses a transform fitted in raw pixel coordinates as rotation about
/// the principal point, which is where camera yaw rotates the image.
RigidTransform2D recenter_transform(const RigidTransform2D& xf, double cx,
                                    double cy);

}  // namespace egoflow

#endif  // EGOFLOW_MOTION_MODEL_HPP
