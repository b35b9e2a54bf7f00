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

#include "egoflow/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "egoflow/csv_io.hpp"
#include "egoflow/error.hpp"

namespace egoflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, int octave, std::int64_t ix,
               std::int64_t iy) {
  std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(octave) << 56));
  h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Quintic fade: C2 continuous, slope at most 15/8.
double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(std::uint64_t seed, int octave, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double sx = fade(x - fx), sy = fade(y - fy);
  const double v00 = lattice(seed, octave, ix, iy);
  const double v10 = lattice(seed, octave, ix + 1, iy);
  const double v01 = lattice(seed, octave, ix, iy + 1);
  const double v11 = lattice(seed, octave, ix + 1, iy + 1);
  const double a = v00 + sx * (v10 - v00);
  const double b = v01 + sx * (v11 - v01);
  return a + sy * (b - a);
}

double amplitude_sum() {
  double s = 0.0, a = 1.0;
  for (int k = 0; k < kTextureOctaves; ++k, a *= 0.5) s += a;
  return s;
}

}  // namespace

double texture_value(std::uint64_t seed, double x, double y, double scale) {
  double sum = 0.0, amp = 1.0, freq = 1.0 / scale;
  for (int k = 0; k < kTextureOctaves; ++k) {
    sum += amp * value_noise(seed, k, x * freq, y * freq);
    amp *= 0.5;
    freq *= 2.0;
  }
  const double n = sum / amplitude_sum();
  return std::clamp(127.5 + kTextureContrast * 255.0 * (n - 0.5), 0.0, 255.0);
}

std::uint8_t texture_sample(std::uint64_t seed, double x, double y,
                            double scale) {
  return static_cast<std::uint8_t>(std::lround(texture_value(seed, x, y, scale)));
}

double texture_lipschitz_bound(double scale) {
  // Each octave contributes amp_k * (15/8) * 2^k / scale = (15/8) / scale.
  return kTextureContrast * 255.0 * kTextureOctaves * (15.0 / 8.0) / scale /
         amplitude_sum();
}

GrayImage render_frame(const Pose2D& pose, double z, const SimConfig& cfg,
                       PixelShift shift) {
  if (!(z > 0.0)) throw DomainError("ground distance must be positive");
  const CameraIntrinsics& cam = cfg.cam;
  GrayImage img(cam.image_w, cam.image_h);
  const double k = z / cam.focal_px;
  const double c = std::cos(pose.heading), s = std::sin(pose.heading);
  for (int v = 0; v < cam.image_h; ++v) {
    const double py = (v - cam.cy - shift.ty) * k;
    for (int u = 0; u < cam.image_w; ++u) {
      const double px = (u - cam.cx - shift.tx) * k;
      const double gx = pose.x + c * px - s * py;
      const double gy = pose.y + s * px + c * py;
      img.at(u, v) = texture_sample(cfg.texture_seed, gx, gy, cfg.texture_scale);
    }
  }
  return img;
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0)) throw DomainError("duration must be positive");
  switch (kind) {
    case TrajectoryKind::kCircle:
      if (!(radius > 0.0) || !(period > 0.0)) {
        throw DomainError("circle radius and period must be positive");
      }
      break;
    case TrajectoryKind::kSquare:
      if (!(side > 0.0) || !(speed > 0.0)) {
        throw DomainError("square side and speed must be positive");
      }
      break;
    case TrajectoryKind::kLine:
      if (!std::isfinite(velocity_x) || !std::isfinite(velocity_y)) {
        throw DomainError("line velocity must be finite");
      }
      break;
  }
}

GroundTruthSample trajectory_state(const TrajectorySpec& spec, double t,
                                   double corner_window) {
  spec.validate();
  if (!(t >= 0.0 && t <= spec.duration)) {
    throw DomainError("time outside the trajectory duration");
  }
  GroundTruthSample g;
  g.timestamp = t;
  double wvx = 0.0, wvy = 0.0;  // world-frame velocity
  double tangent_heading = 0.0;
  double tangent_rate = 0.0;

  switch (spec.kind) {
    case TrajectoryKind::kCircle: {
      const double w = 2.0 * kPi / spec.period;
      g.pose.x = spec.radius * std::cos(w * t);
      g.pose.y = spec.radius * std::sin(w * t);
      wvx = -spec.radius * w * std::sin(w * t);
      wvy = spec.radius * w * std::cos(w * t);
      tangent_heading = w * t + kPi / 2.0;
      tangent_rate = w;
      break;
    }
    case TrajectoryKind::kSquare: {
      const double edge_time = spec.side / spec.speed;
      const double d = std::fmod(spec.speed * t, 4.0 * spec.side);
      const int edge = std::min(3, static_cast<int>(d / spec.side));
      const double along = d - edge * spec.side;
      static constexpr double kCornerX[4] = {0.0, 1.0, 1.0, 0.0};
      static constexpr double kCornerY[4] = {0.0, 0.0, 1.0, 1.0};
      static constexpr double kDirX[4] = {1.0, 0.0, -1.0, 0.0};
      static constexpr double kDirY[4] = {0.0, 1.0, 0.0, -1.0};
      g.pose.x = spec.side * kCornerX[edge] + along * kDirX[edge];
      g.pose.y = spec.side * kCornerY[edge] + along * kDirY[edge];
      wvx = spec.speed * kDirX[edge];
      wvy = spec.speed * kDirY[edge];
      tangent_heading = edge * kPi / 2.0;
      const double nearest = std::round(t / edge_time);
      if (nearest >= 1.0 &&
          std::abs(t - nearest * edge_time) <= corner_window) {
        g.corner_flag = true;
      }
      break;
    }
    case TrajectoryKind::kLine:
      g.pose.x = spec.velocity_x * t;
      g.pose.y = spec.velocity_y * t;
      wvx = spec.velocity_x;
      wvy = spec.velocity_y;
      tangent_heading = std::atan2(wvy, wvx);
      break;
  }

  if (spec.yaw_mode == YawMode::kTangent) {
    g.pose.heading = normalize_angle(tangent_heading);
    g.wz = tangent_rate;
  } else {
    g.pose.heading = 0.0;
    g.wz = 0.0;
  }
  const double c = std::cos(g.pose.heading), s = std::sin(g.pose.heading);
  g.vx = c * wvx + s * wvy;
  g.vy = -s * wvx + c * wvy;
  return g;
}

namespace {

double pulse_rate(double amplitude, double start, double duration, double t) {
  if (duration <= 0.0 || t < start || t > start + duration) return 0.0;
  const double s = std::sin(kPi * (t - start) / duration);
  return amplitude * s * s;
}

double pulse_angle(double amplitude, double start, double duration, double t) {
  if (duration <= 0.0 || t <= start) return 0.0;
  const double tau = std::min(t - start, duration);
  return amplitude *
         (0.5 * tau - duration / (4.0 * kPi) * std::sin(2.0 * kPi * tau / duration));
}

}  // namespace

double RotationInjection::wx(double t) const {
  return pulse_rate(wx_amplitude, start, duration, t);
}
double RotationInjection::wy(double t) const {
  return pulse_rate(wy_amplitude, start, duration, t);
}
double RotationInjection::angle_x(double t) const {
  return pulse_angle(wx_amplitude, start, duration, t);
}
double RotationInjection::angle_y(double t) const {
  return pulse_angle(wy_amplitude, start, duration, t);
}

void SimConfig::validate() const {
  trajectory.validate();
  cam.validate();
  if (!(altitude > 0.0)) throw DomainError("altitude must be positive");
  if (!(fps > 0.0)) throw DomainError("fps must be positive");
  if (!(texture_scale > 0.0)) throw DomainError("texture_scale must be positive");
  if (!(gyro_noise_std >= 0.0) || !(range_noise_std >= 0.0)) {
    throw DomainError("noise standard deviations must be non-negative");
  }
  if (!(gyro_rate > 0.0) || !(range_rate > 0.0)) {
    throw DomainError("sensor rates must be positive");
  }
  if (injection.duration < 0.0) {
    throw DomainError("injection duration must be non-negative");
  }
}

namespace {

std::size_t sample_count(double duration, double rate) {
  return static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
}

std::mt19937_64 channel_rng(std::uint64_t seed, std::uint64_t channel) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(channel)};
  return std::mt19937_64(seq);
}

}  // namespace

SimulationLogs simulate_logs(const SimConfig& cfg) {
  cfg.validate();
  const TrajectorySpec& traj = cfg.trajectory;
  SimulationLogs logs;

  const std::size_t frames = sample_count(traj.duration, cfg.fps);
  const double frame_dt = 1.0 / cfg.fps;
  logs.frame_times.reserve(frames);
  logs.truth.reserve(frames);
  logs.interval_shifts.reserve(frames);
  logs.ground_offsets.reserve(frames);
  PixelShift offset;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = static_cast<double>(k) / cfg.fps;
    logs.frame_times.push_back(t);
    GroundTruthSample g = trajectory_state(traj, t, frame_dt * (1.0 + 1e-9));
    g.z = cfg.altitude;
    logs.truth.push_back(g);
    PixelShift shift;
    if (k > 0 && cfg.injection.enabled()) {
      const double t0 = logs.frame_times[k - 1];
      const RotationInjection& inj = cfg.injection;
      shift.tx = cfg.cam.focal_px * std::tan(inj.angle_y(t) - inj.angle_y(t0));
      shift.ty = cfg.cam.focal_px * std::tan(inj.angle_x(t) - inj.angle_x(t0));
      const double m = cfg.altitude / cfg.cam.focal_px;
      const double c = std::cos(g.pose.heading), s = std::sin(g.pose.heading);
      offset.tx += (c * shift.tx - s * shift.ty) * m;
      offset.ty += (s * shift.tx + c * shift.ty) * m;
    }
    logs.interval_shifts.push_back(shift);
    logs.ground_offsets.push_back(offset);
  }

  auto gyro_rng = channel_rng(cfg.noise_seed, 1);
  std::normal_distribution<double> gyro_noise(0.0, cfg.gyro_noise_std);
  const std::size_t gyro_n = sample_count(traj.duration, cfg.gyro_rate) + 1;
  logs.gyro.reserve(gyro_n);
  for (std::size_t j = 0; j < gyro_n; ++j) {
    const double t = std::min(static_cast<double>(j) / cfg.gyro_rate,
                              traj.duration);
    const GroundTruthSample g = trajectory_state(traj, t);
    GyroSample s;
    s.timestamp = t;
    s.wx = cfg.injection.wx(t);
    s.wy = cfg.injection.wy(t);
    s.wz = g.wz + cfg.gyro_bias;
    if (cfg.gyro_noise_std > 0.0) {
      s.wx += gyro_noise(gyro_rng);
      s.wy += gyro_noise(gyro_rng);
      s.wz += gyro_noise(gyro_rng);
    }
    if (!logs.gyro.empty() && !(t > logs.gyro.back().timestamp)) break;
    logs.gyro.push_back(s);
  }

  auto range_rng = channel_rng(cfg.noise_seed, 2);
  std::normal_distribution<double> range_noise(0.0, cfg.range_noise_std);
  const std::size_t range_n = sample_count(traj.duration, cfg.range_rate) + 1;
  logs.range.reserve(range_n);
  for (std::size_t j = 0; j < range_n; ++j) {
    const double t = std::min(static_cast<double>(j) / cfg.range_rate,
                              traj.duration);
    if (!logs.range.empty() && !(t > logs.range.back().timestamp)) break;
    RangeSample r;
    r.timestamp = t;
    r.z = cfg.altitude;
    if (cfg.range_noise_std > 0.0) r.z += range_noise(range_rng);
    logs.range.push_back(r);
  }
  return logs;
}

GrayImage render_sim_frame(const SimConfig& cfg, const SimulationLogs& logs,
                           std::size_t k) {
  Pose2D pose = logs.truth.at(k).pose;
  pose.x -= logs.ground_offsets.at(k).tx;
  pose.y -= logs.ground_offsets.at(k).ty;
  return render_frame(pose, cfg.altitude, cfg);
}

Simulation simulate_sequence(const SimConfig& cfg) {
  Simulation sim;
  sim.logs = simulate_logs(cfg);
  sim.frames.reserve(sim.logs.truth.size());
  for (std::size_t k = 0; k < sim.logs.truth.size(); ++k) {
    sim.frames.push_back(render_sim_frame(cfg, sim.logs, k));
  }
  return sim;
}

void simulate_to_directory(const SimConfig& cfg, const std::string& dir) {
  const SimulationLogs logs = simulate_logs(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir);
  }
  const std::filesystem::path base(dir);
  for (std::size_t k = 0; k < logs.truth.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", k);
    write_pgm((base / name).string(), render_sim_frame(cfg, logs, k),
              logs.frame_times[k]);
  }
  write_text_file((base / "truth.csv").string(), format_truth_csv(logs.truth));
  write_text_file((base / "gyro.csv").string(), format_gyro_csv(logs.gyro));
  write_text_file((base / "range.csv").string(), format_range_csv(logs.range));
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw InvalidArgumentError("invalid number for " + key + ": '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgumentError("invalid integer for " + key + ": '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v > 1u << 20) throw InvalidArgumentError(key + " is too large");
  return static_cast<int>(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_sim_config_value(SimConfig& cfg, const std::string& key,
                          const std::string& value) {
  TrajectorySpec& t = cfg.trajectory;
  if (key == "trajectory") {
    if (value == "circle") t.kind = TrajectoryKind::kCircle;
    else if (value == "square") t.kind = TrajectoryKind::kSquare;
    else if (value == "line") t.kind = TrajectoryKind::kLine;
    else throw InvalidArgumentError("unknown trajectory kind '" + value + "'");
  } else if (key == "yaw_mode") {
    if (value == "fixed") t.yaw_mode = YawMode::kFixed;
    else if (value == "tangent") t.yaw_mode = YawMode::kTangent;
    else throw InvalidArgumentError("unknown yaw_mode '" + value + "'");
  } else if (key == "radius") {
    t.radius = parse_double(key, value);
  } else if (key == "period") {
    t.period = parse_double(key, value);
  } else if (key == "side") {
    t.side = parse_double(key, value);
  } else if (key == "speed") {
    t.speed = parse_double(key, value);
  } else if (key == "velocity_x") {
    t.velocity_x = parse_double(key, value);
  } else if (key == "velocity_y") {
    t.velocity_y = parse_double(key, value);
  } else if (key == "duration") {
    t.duration = parse_double(key, value);
  } else if (key == "altitude") {
    cfg.altitude = parse_double(key, value);
  } else if (key == "focal_px") {
    cfg.cam.focal_px = parse_double(key, value);
  } else if (key == "cx") {
    cfg.cam.cx = parse_double(key, value);
  } else if (key == "cy") {
    cfg.cam.cy = parse_double(key, value);
  } else if (key == "image_w") {
    cfg.cam.image_w = parse_int(key, value);
  } else if (key == "image_h") {
    cfg.cam.image_h = parse_int(key, value);
  } else if (key == "fps") {
    cfg.fps = parse_double(key, value);
  } else if (key == "texture_seed") {
    cfg.texture_seed = parse_u64(key, value);
  } else if (key == "texture_scale") {
    cfg.texture_scale = parse_double(key, value);
  } else if (key == "gyro_noise_std") {
    cfg.gyro_noise_std = parse_double(key, value);
  } else if (key == "gyro_bias") {
    cfg.gyro_bias = parse_double(key, value);
  } else if (key == "range_noise_std") {
    cfg.range_noise_std = parse_double(key, value);
  } else if (key == "gyro_rate") {
    cfg.gyro_rate = parse_double(key, value);
  } else if (key == "range_rate") {
    cfg.range_rate = parse_double(key, value);
  } else if (key == "noise_seed") {
    cfg.noise_seed = parse_u64(key, value);
  } else if (key == "inject_wx") {
    cfg.injection.wx_amplitude = parse_double(key, value);
  } else if (key == "inject_wy") {
    cfg.injection.wy_amplitude = parse_double(key, value);
  } else if (key == "inject_start") {
    cfg.injection.start = parse_double(key, value);
  } else if (key == "inject_duration") {
    cfg.injection.duration = parse_double(key, value);
  } else {
    throw InvalidArgumentError("unknown configuration key '" + key + "'");
  }
}

SimConfig parse_sim_config(const std::string& text) {
  SimConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgumentError("line " + std::to_string(line_no) +
                                 ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw InvalidArgumentError("line " + std::to_string(line_no) +
                                 ": duplicate key '" + key + "'");
    }
    try {
      set_sim_config_value(cfg, key, value);
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError("line " + std::to_string(line_no) + ": " +
                                 e.what());
    }
  }
  // An unset principal point follows the image center.
  if (!seen.count("cx")) cfg.cam.cx = (cfg.cam.image_w - 1) / 2.0;
  if (!seen.count("cy")) cfg.cam.cy = (cfg.cam.image_h - 1) / 2.0;
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  return parse_sim_config(read_text_file(path));
}

std::string format_sim_config(const SimConfig& cfg) {
  const TrajectorySpec& t = cfg.trajectory;
  std::ostringstream o;
  o.precision(17);
  const char* kind = t.kind == TrajectoryKind::kCircle   ? "circle"
                     : t.kind == TrajectoryKind::kSquare ? "square"
                                                         : "line";
  o << "trajectory=" << kind << "\n"
    << "yaw_mode=" << (t.yaw_mode == YawMode::kTangent ? "tangent" : "fixed")
    << "\n"
    << "radius=" << t.radius << "\nperiod=" << t.period << "\nside=" << t.side
    << "\nspeed=" << t.speed << "\nvelocity_x=" << t.velocity_x
    << "\nvelocity_y=" << t.velocity_y << "\nduration=" << t.duration
    << "\naltitude=" << cfg.altitude << "\nfocal_px=" << cfg.cam.focal_px
    << "\ncx=" << cfg.cam.cx << "\ncy=" << cfg.cam.cy
    << "\nimage_w=" << cfg.cam.image_w << "\nimage_h=" << cfg.cam.image_h
    << "\nfps=" << cfg.fps << "\ntexture_seed=" << cfg.texture_seed
    << "\ntexture_scale=" << cfg.texture_scale
    << "\ngyro_noise_std=" << cfg.gyro_noise_std
    << "\ngyro_bias=" << cfg.gyro_bias
    << "\nrange_noise_std=" << cfg.range_noise_std
    << "\ngyro_rate=" << cfg.gyro_rate << "\nrange_rate=" << cfg.range_rate
    << "\nnoise_seed=" << cfg.noise_seed
    << "\ninject_wx=" << cfg.injection.wx_amplitude
    << "\ninject_wy=" << cfg.injection.wy_amplitude
    << "\ninject_start=" << cfg.injection.start
    << "\ninject_duration=" << cfg.injection.duration << "\n";
  return o.str();
}

}  // namespace egoflow
