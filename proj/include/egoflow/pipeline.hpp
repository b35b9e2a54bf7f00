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

// End-to-end estimation over a motion-vector stream and its evaluation
// against a reference.

#ifndef EGOFLOW_PIPELINE_HPP
#define EGOFLOW_PIPELINE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoflow/block_match.hpp"
#include "egoflow/motion_model.hpp"
#include "egoflow/simulator.hpp"
#include "egoflow/types.hpp"

namespace egoflow {

struct PipelineConfig {
  CameraIntrinsics cam;
  MatchParams match;
  RansacParams ransac;
  bool compensation_enabled = true;
  /// A range sample farther than this from the interval midpoint counts as
  /// missing.
  double max_range_age = 0.5;

  void validate() const;
};

struct PipelineResult {
  std::vector<VelocityEstimate> velocities;  // one per field after the first
  std::vector<StampedPose> poses;            // one per field, from the origin
};

/// Field k (k >= 1) describes the motion from the frame at
/// fields[k-1].timestamp to the frame at fields[k].timestamp; field 0 only
/// anchors the time base. Each interval runs RANSAC, rotation compensation
/// with the averaged gyro rates, metric scaling with the range sample nearest
/// the interval midpoint, and pose integration. Intervals without consensus
/// repeat the last valid velocity flagged invalid and leave the pose alone.
PipelineResult run_pipeline(std::span<const FlowField> fields,
                            std::span<const GyroSample> gyro,
                            std::span<const RangeSample> range,
                            const PipelineConfig& cfg);

/// Estimates one interval. Throws NoConsensusError / DomainError when the
/// interval cannot produce a valid estimate.
VelocityEstimate estimate_interval(const FlowField& field, double t0,
                                   double t1, std::span<const GyroSample> gyro,
                                   double z, const PipelineConfig& cfg,
                                   std::uint64_t seed);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

/// Planar speed error of every valid estimate against truth linearly
/// interpolated at the estimate timestamp. Estimates whose bracketing truth
/// rows are corner-flagged, or that fall outside the truth span, are skipped.
ErrorStats velocity_error_stats(std::span<const VelocityEstimate> est,
                                std::span<const GroundTruthSample> truth);

struct Alignment {
  std::vector<StampedPose> aligned;  // every estimate pose, transformed
  double rotation = 0.0;             // radians
  double tx = 0.0;                   // aligned = R(rotation) p + t
  double ty = 0.0;
  int matched = 0;
  double rms_residual = 0.0;  // over matched pairs
  double final_error = 0.0;   // last matched pair distance
};

/// Moves the first matched estimate onto its reference and rotates about it
/// to minimize the summed squared distance over all matched pairs. Samples
/// match on the nearest reference timestamp within `tolerance` seconds.
/// With `rotate` false only the common origin is applied.
Alignment align_trajectories(std::span<const StampedPose> est,
                             std::span<const StampedPose> ref,
                             double tolerance = 1e-3, bool rotate = true);

struct LocalXY {
  double x = 0.0;  // east, m
  double y = 0.0;  // north, m
};

/// Local tangent-plane coordinates on the WGS-84 ellipsoid using the
/// meridional and prime-vertical radii of curvature at the origin.
LocalXY geodetic_to_local(double lat_deg, double lon_deg, double origin_lat_deg,
                          double origin_lon_deg);

struct EvalReport {
  ErrorStats velocity;
  int n_valid = 0;
  int n_invalid = 0;
  double alignment_rotation_rad = 0.0;  // NaN without a pose series
  double final_position_error_m = 0.0;  // NaN without a pose series
};

EvalReport evaluate(std::span<const VelocityEstimate> est,
                    std::span<const GroundTruthSample> truth,
                    std::optional<std::span<const StampedPose>> poses,
                    bool align);

std::string format_eval_report_text(const EvalReport& report);
/// `metric,value` twin of the text report.
std::string format_eval_report_csv(const EvalReport& report);

}  // namespace egoflow

#endif  // EGOFLOW_PIPELINE_HPP
