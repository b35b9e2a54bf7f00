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

#include "egoflow/metric_scale.hpp"

#include <cmath>

#include "egoflow/error.hpp"

namespace egoflow {

void CameraIntrinsics::validate() const {
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
    throw DomainError("focal_px must be positive");
  }
  if (image_w <= 0 || image_h <= 0) {
    throw DomainError("image size must be positive");
  }
  if (!(cx >= 0.0 && cx < image_w) || !(cy >= 0.0 && cy < image_h)) {
    throw DomainError("principal point must lie inside the image");
  }
}

VelocityEstimate flow_to_velocity(const RigidTransform2D& xf, double z,
                                  double dt, double timestamp,
                                  const CameraIntrinsics& cam,
                                  int inlier_count, int valid_count) {
  if (!(z > 0.0)) throw DomainError("ground distance must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(cam.focal_px > 0.0)) throw DomainError("focal_px must be positive");
  VelocityEstimate v;
  v.timestamp = timestamp;
  v.vx = -(xf.tx / cam.focal_px) * z / dt;
  v.vy = -(xf.ty / cam.focal_px) * z / dt;
  v.wz = -xf.theta / dt;
  v.z_used = z;
  v.inlier_count = inlier_count;
  v.valid_count = valid_count;
  v.valid = true;
  return v;
}

VelocityEnvelope velocity_envelope(const CameraIntrinsics& cam, double z,
                                   double fps, const MatchParams& params) {
  if (!(z > 0.0)) throw DomainError("ground distance must be positive");
  if (!(fps > 0.0)) throw DomainError("frame rate must be positive");
  if (!(cam.focal_px > 0.0)) throw DomainError("focal_px must be positive");
  params.validate();
  if (params.step >= params.search_range) {
    throw DomainError("search range must exceed the step");
  }
  return {params.step / cam.focal_px * z * fps,
          params.search_range / cam.focal_px * z * fps};
}

Pose2D integrate_pose(const Pose2D& pose, const VelocityEstimate& v,
                      double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const double mid = pose.heading + 0.5 * v.wz * dt;
  const double c = std::cos(mid), s = std::sin(mid);
  const double bx = v.vx * dt, by = v.vy * dt;
  Pose2D out;
  out.x = pose.x + c * bx - s * by;
  out.y = pose.y + s * bx + c * by;
  out.heading = normalize_angle(pose.heading + v.wz * dt);
  return out;
}

}  // namespace egoflow
