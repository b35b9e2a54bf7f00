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

// CSV logs with a fixed header line:
//
//   gyro      timestamp,wx,wy,wz
//   range     timestamp,z
//   velocity  timestamp,vx,vy,wz,z_used,inlier_count,valid_count
//   pose      timestamp,x,y,heading
//   truth     timestamp,x,y,heading,vx,vy,wz,z,corner_flag
//
// A velocity row with z_used = 0 is an estimate without consensus.

#ifndef EGOFLOW_CSV_IO_HPP
#define EGOFLOW_CSV_IO_HPP

#include <span>
#include <string>
#include <vector>

#include "egoflow/simulator.hpp"
#include "egoflow/types.hpp"

namespace egoflow {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

std::string format_gyro_csv(std::span<const GyroSample> samples);
std::string format_range_csv(std::span<const RangeSample> samples);
std::string format_velocity_csv(std::span<const VelocityEstimate> series);
std::string format_pose_csv(std::span<const StampedPose> series);
std::string format_truth_csv(std::span<const GroundTruthSample> series);

// Parsers throw FormatError carrying the byte offset of the offending field,
// or of the line when the column count is wrong.
std::vector<GyroSample> parse_gyro_csv(const std::string& text);
std::vector<RangeSample> parse_range_csv(const std::string& text);
std::vector<VelocityEstimate> parse_velocity_csv(const std::string& text);
std::vector<StampedPose> parse_pose_csv(const std::string& text);
std::vector<GroundTruthSample> parse_truth_csv(const std::string& text);

}  // namespace egoflow

#endif  // EGOFLOW_CSV_IO_HPP
