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

// Synthetic downward-looking camera over a procedural ground texture.
//
// The world is the ground plane (x, y). A pose places the ground point under
// the principal point at (x, y) and rotates the image axes by `heading`:
// pixel (u, v) sees the ground at
//
//   (x, y) + R(heading) * ((u - cx) / f * z, (v - cy) / f * z).
//
// Every random quantity is drawn from an explicitly seeded generator.

#ifndef EGOFLOW_SIMULATOR_HPP
#define EGOFLOW_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "egoflow/image.hpp"
#include "egoflow/motion_model.hpp"
#include "egoflow/types.hpp"

namespace egoflow {

enum class TrajectoryKind { kCircle, kSquare, kLine };
enum class YawMode { kFixed, kTangent };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kCircle;
  double radius = 1.0;    // circle, m
  double period = 12.566370614359172;  // circle, s (0.5 m/s at r = 1)
  double side = 2.0;      // square, m
  double speed = 0.5;     // square, m/s
  double velocity_x = 0.5;  // line, m/s
  double velocity_y = 0.0;
  YawMode yaw_mode = YawMode::kFixed;
  double duration = 10.0;  // s

  void validate() const;
};

/// A pulse of roll/pitch rate, w(t) = A sin^2(pi (t - start) / duration),
/// applied both to the gyro log and, through the rotation-induced shift, to
/// the rendered images.
struct RotationInjection {
  double wx_amplitude = 0.0;  // rad/s
  double wy_amplitude = 0.0;
  double start = 0.0;
  double duration = 0.0;  // 0 disables

  bool enabled() const {
    return duration > 0.0 && (wx_amplitude != 0.0 || wy_amplitude != 0.0);
  }
  /// Rates at time t.
  double wx(double t) const;
  double wy(double t) const;
  /// Accumulated angles since the pulse started.
  double angle_x(double t) const;
  double angle_y(double t) const;
};

struct SimConfig {
  TrajectorySpec trajectory;
  double altitude = 1.0;
  CameraIntrinsics cam;
  double fps = 30.0;
  std::uint64_t texture_seed = 1;
  double texture_scale = 0.05;  // m per base noise cell
  double gyro_noise_std = 0.0;
  double gyro_bias = 0.0;  // added to wz
  double range_noise_std = 0.0;
  double gyro_rate = 200.0;
  double range_rate = 30.0;
  std::uint64_t noise_seed = 1;
  RotationInjection injection;

  void validate() const;
};

struct GroundTruthSample {
  double timestamp = 0.0;
  Pose2D pose;
  double vx = 0.0;  // body frame
  double vy = 0.0;
  double wz = 0.0;
  double z = 0.0;
  // Within the exclusion window of a velocity discontinuity.
  bool corner_flag = false;
};

inline constexpr int kTextureOctaves = 4;
inline constexpr double kTextureContrast = 2.0;

/// Multi-octave value noise in [0, 255]; smooth (C2) in x and y.
double texture_value(std::uint64_t seed, double x, double y, double scale);

/// texture_value rounded to an 8-bit intensity.
std::uint8_t texture_sample(std::uint64_t seed, double x, double y,
                            double scale);

/// Upper bound on |d texture_value / dx| (and / dy), intensity per meter.
double texture_lipschitz_bound(double scale);

/// Renders the camera view. `shift` moves the image content by the given
/// pixels, which is how roll/pitch-induced flow is emulated.
GrayImage render_frame(const Pose2D& pose, double z, const SimConfig& cfg,
                       PixelShift shift = {});

/// Closed-form state at time t in [0, duration]. Samples within
/// `corner_window` seconds of a square corner carry corner_flag.
GroundTruthSample trajectory_state(const TrajectorySpec& spec, double t,
                                   double corner_window = 0.0);

/// Everything except the images; cheap to compute.
struct SimulationLogs {
  std::vector<double> frame_times;
  std::vector<GroundTruthSample> truth;  // one per frame
  /// Injected image shift of each interval (frame k-1 to k); zero at k = 0.
  std::vector<PixelShift> interval_shifts;
  /// Running ground-plane offset, in meters, that realizes the interval
  /// shifts in the body frame of the later frame. Frame k is rendered from
  /// truth[k].pose moved by -ground_offsets[k].
  std::vector<PixelShift> ground_offsets;
  std::vector<GyroSample> gyro;
  std::vector<RangeSample> range;
};

SimulationLogs simulate_logs(const SimConfig& cfg);

/// Frame k of a simulation described by `logs`.
GrayImage render_sim_frame(const SimConfig& cfg, const SimulationLogs& logs,
                           std::size_t k);

struct Simulation {
  SimulationLogs logs;
  std::vector<GrayImage> frames;
};

Simulation simulate_sequence(const SimConfig& cfg);

/// Writes frame_%06d.pgm, truth.csv, gyro.csv and range.csv into `dir`
/// (created if missing). Frames are rendered and written one at a time.
void simulate_to_directory(const SimConfig& cfg, const std::string& dir);

/// Flat key=value configuration. Keys are the SimConfig field names (camera
/// and trajectory fields flattened, injection fields prefixed `inject_`).
/// Unknown keys and malformed values throw InvalidArgumentError.
SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);
void set_sim_config_value(SimConfig& cfg, const std::string& key,
                          const std::string& value);
std::string format_sim_config(const SimConfig& cfg);

}  // namespace egoflow

#endif  // EGOFLOW_SIMULATOR_HPP
