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

#ifndef EGOFLOW_METRIC_SCALE_HPP
#define EGOFLOW_METRIC_SCALE_HPP

#include "egoflow/block_match.hpp"
#include "egoflow/types.hpp"

namespace egoflow {

/// Pinhole scaling of a rotation-compensated image transform:
///   vx = -(tx / f) z / dt,  vy = -(ty / f) z / dt,  wz = -theta / dt.
/// The image rotates opposite to the camera, hence the sign on wz.
VelocityEstimate flow_to_velocity(const RigidTransform2D& xf, double z,
                                  double dt, double timestamp,
                                  const CameraIntrinsics& cam,
                                  int inlier_count, int valid_count);

struct VelocityEnvelope {
  double v_min = 0.0;  // one matcher step per frame
  double v_max = 0.0;  // the full search range per frame
};

VelocityEnvelope velocity_envelope(const CameraIntrinsics& cam, double z,
                                   double fps, const MatchParams& params);

/// Advances a planar pose by one interval, rotating the body-frame
/// displacement with the midpoint heading.
Pose2D integrate_pose(const Pose2D& pose, const VelocityEstimate& v,
                      double dt);

}  // namespace egoflow

#endif  // EGOFLOW_METRIC_SCALE_HPP
