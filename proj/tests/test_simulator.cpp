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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "egoflow/block_match.hpp"
#include "egoflow/csv_io.hpp"
#include "egoflow/error.hpp"
#include "egoflow/image.hpp"
#include "egoflow/simulator.hpp"

namespace {

using egoflow::SimConfig;
using egoflow::TrajectoryKind;
using egoflow::TrajectorySpec;

constexpr double kPi = std::numbers::pi;

TEST(Texture, DeterministicAndSeedSensitive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(-50, 50);
  int differ = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = pos(rng), y = pos(rng);
    EXPECT_EQ(egoflow::texture_sample(1, x, y, 0.05),
              egoflow::texture_sample(1, x, y, 0.05));
    if (egoflow::texture_sample(1, x, y, 0.05) !=
        egoflow::texture_sample(2, x, y, 0.05)) {
      ++differ;
    }
  }
  EXPECT_GE(differ, 990);
}

TEST(Texture, ContinuityOnFineGrid) {
  const double scale = 0.05, h = 0.001;
  const double bound = egoflow::texture_lipschitz_bound(scale) * h;
  double worst = 0.0;
  for (int j = 0; j < 300; ++j) {
    for (int i = 0; i < 300; ++i) {
      const double x = 0.37 + i * h, y = -1.2 + j * h;
      const double v = egoflow::texture_value(7, x, y, scale);
      worst = std::max({worst, std::abs(egoflow::texture_value(7, x + h, y, scale) - v),
                        std::abs(egoflow::texture_value(7, x, y + h, scale) - v)});
    }
  }
  EXPECT_LE(worst, bound);
  EXPECT_GT(worst, 0.0);
}

TEST(Texture, FullDynamicRangeOverPatch) {
  // A 10 x 10 cell patch reaches both ends of the intensity range.
  const double scale = 0.05;
  int lo = 255, hi = 0;
  for (int j = 0; j < 200; ++j) {
    for (int i = 0; i < 200; ++i) {
      const int v = egoflow::texture_sample(3, 2.0 + i * scale / 20,
                                            -4.0 + j * scale / 20, scale);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  EXPECT_EQ(lo, 0);
  EXPECT_EQ(hi, 255);
}

TEST(Render, DeterministicAndShiftConsistent) {
  SimConfig cfg;
  cfg.cam.image_w = cfg.cam.image_h = 96;
  cfg.cam.cx = cfg.cam.cy = 47.5;
  const egoflow::Pose2D p{0.2, -0.1, 0.0};
  const auto a = egoflow::render_frame(p, 1.0, cfg);
  EXPECT_EQ(a, egoflow::render_frame(p, 1.0, cfg));
  const auto b = egoflow::render_frame({p.x + 1.0 / cfg.cam.focal_px, p.y, 0.0},
                                       1.0, cfg);
  for (int v = 0; v < 96; ++v) {
    for (int u = 0; u < 95; ++u) {
      EXPECT_LE(std::abs(int(b.at(u, v)) - int(a.at(u + 1, v))), 1);
    }
  }
}

TEST(Render, HalfTurnRotatesAboutPrincipalPoint) {
  SimConfig cfg;
  cfg.cam.image_w = cfg.cam.image_h = 64;
  cfg.cam.cx = cfg.cam.cy = 31.5;
  const auto a = egoflow::render_frame({0.5, 0.5, 0.0}, 1.0, cfg);
  const auto b = egoflow::render_frame({0.5, 0.5, kPi}, 1.0, cfg);
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 64; ++u) {
      EXPECT_LE(std::abs(int(b.at(u, v)) - int(a.at(63 - u, 63 - v))), 1);
    }
  }
  EXPECT_THROW(egoflow::render_frame({}, 0.0, cfg), egoflow::DomainError);
}

TEST(Trajectory, CircleLineSquare) {
  TrajectorySpec c;
  c.kind = TrajectoryKind::kCircle;
  c.radius = 1.0;
  c.period = 2 * kPi;
  const auto g = egoflow::trajectory_state(c, 0.0);
  EXPECT_NEAR(g.pose.x, 1.0, 1e-15);
  EXPECT_NEAR(g.pose.y, 0.0, 1e-15);
  EXPECT_NEAR(std::hypot(g.vx, g.vy), 1.0, 1e-15);

  TrajectorySpec l;
  l.kind = TrajectoryKind::kLine;
  l.velocity_x = 0.5;
  const auto gl = egoflow::trajectory_state(l, 2.0);
  EXPECT_NEAR(gl.pose.x, 1.0, 1e-15);
  EXPECT_EQ(gl.pose.y, 0.0);
  EXPECT_EQ(gl.vx, 0.5);
  EXPECT_EQ(gl.vy, 0.0);

  TrajectorySpec s;
  s.kind = TrajectoryKind::kSquare;
  s.side = 2.0;
  s.speed = 1.0;
  for (auto yaw : {egoflow::YawMode::kFixed, egoflow::YawMode::kTangent}) {
    s.yaw_mode = yaw;
    const auto gs = egoflow::trajectory_state(s, 1.0, 0.05);
    EXPECT_NEAR(std::hypot(gs.vx, gs.vy), 1.0, 1e-15);
    EXPECT_EQ(gs.wz, 0.0);
    EXPECT_FALSE(gs.corner_flag);
  }
  EXPECT_TRUE(egoflow::trajectory_state(s, 2.01, 0.05).corner_flag);
  EXPECT_FALSE(egoflow::trajectory_state(s, 0.01, 0.05).corner_flag);
  const auto closed = egoflow::trajectory_state(s, 8.0);
  EXPECT_NEAR(closed.pose.x, 0.0, 1e-12);
  EXPECT_NEAR(closed.pose.y, 0.0, 1e-12);

  EXPECT_THROW(egoflow::trajectory_state(s, -0.1), egoflow::DomainError);
  EXPECT_THROW(egoflow::trajectory_state(s, s.duration + 0.1), egoflow::DomainError);
}

TEST(Trajectory, TangentCircleHasConstantYawRateAndForwardVelocity) {
  TrajectorySpec c;
  c.yaw_mode = egoflow::YawMode::kTangent;
  for (double t = 0.0; t < 10.0; t += 0.7) {
    const auto g = egoflow::trajectory_state(c, t);
    EXPECT_NEAR(g.wz, 2 * kPi / c.period, 1e-15);
    EXPECT_NEAR(g.vx, 2 * kPi * c.radius / c.period, 1e-12);
    EXPECT_NEAR(g.vy, 0.0, 1e-12);
  }
}

TEST(Trajectory, FiniteDifferencesMatchVelocity) {
  for (auto kind : {TrajectoryKind::kCircle, TrajectoryKind::kSquare,
                    TrajectoryKind::kLine}) {
    for (auto yaw : {egoflow::YawMode::kFixed, egoflow::YawMode::kTangent}) {
      TrajectorySpec s;
      s.kind = kind;
      s.yaw_mode = yaw;
      s.velocity_y = -0.3;
      const double dt = 1.0 / 30;
      for (double t = 0.5; t + 2 * dt < s.duration; t += 0.31) {
        // Five-point central difference with step 1/fps.
        double px[5], py[5];
        bool corner = false;
        for (int i = 0; i < 5; ++i) {
          const auto g = egoflow::trajectory_state(s, t + (i - 2) * dt, 2.5 * dt);
          px[i] = g.pose.x;
          py[i] = g.pose.y;
          corner = corner || g.corner_flag;
        }
        if (corner) continue;
        const auto m = egoflow::trajectory_state(s, t);
        const double wvx = (px[0] - 8 * px[1] + 8 * px[3] - px[4]) / (12 * dt);
        const double wvy = (py[0] - 8 * py[1] + 8 * py[3] - py[4]) / (12 * dt);
        const double c = std::cos(m.pose.heading), sn = std::sin(m.pose.heading);
        const double tol = 1e-6 * std::hypot(m.vx, m.vy);
        EXPECT_NEAR(c * wvx + sn * wvy, m.vx, tol);
        EXPECT_NEAR(-sn * wvx + c * wvy, m.vy, tol);
      }
    }
  }
}

TEST(Simulate, CountsAndNoiselessGyro) {
  SimConfig cfg;
  cfg.trajectory.duration = 2.0;
  cfg.trajectory.yaw_mode = egoflow::YawMode::kTangent;
  const auto logs = egoflow::simulate_logs(cfg);
  EXPECT_EQ(logs.frame_times.size(), 60u);
  EXPECT_EQ(logs.truth.size(), 60u);
  for (const auto& g : logs.gyro) {
    const auto truth = egoflow::trajectory_state(cfg.trajectory, g.timestamp);
    EXPECT_EQ(g.wz, truth.wz);
    EXPECT_EQ(g.wx, 0.0);
    EXPECT_EQ(g.wy, 0.0);
  }
  for (const auto& r : logs.range) EXPECT_EQ(r.z, cfg.altitude);
  EXPECT_NEAR(logs.gyro.back().timestamp, 2.0, 1e-12);
}

TEST(Simulate, NoiseStatisticsAndBias) {
  SimConfig cfg;
  cfg.trajectory.duration = 20.0;
  cfg.gyro_noise_std = 0.01;
  cfg.gyro_bias = 0.02;
  cfg.range_noise_std = 0.005;
  const auto logs = egoflow::simulate_logs(cfg);
  double sx = 0, sxx = 0, sz = 0;
  for (const auto& g : logs.gyro) {
    sx += g.wz;
    sxx += g.wx * g.wx;
  }
  for (const auto& r : logs.range) sz += r.z - cfg.altitude;
  const double n = static_cast<double>(logs.gyro.size());
  EXPECT_NEAR(sx / n, 0.02, 0.002);
  EXPECT_NEAR(std::sqrt(sxx / n), 0.01, 0.001);
  EXPECT_NEAR(sz / logs.range.size(), 0.0, 0.001);
}

TEST(Simulate, InjectionAddsIntervalShiftsAndGyroPulse) {
  SimConfig cfg;
  cfg.trajectory.duration = 2.0;
  cfg.injection.wy_amplitude = 0.8;
  cfg.injection.start = 0.5;
  cfg.injection.duration = 0.6;
  const auto logs = egoflow::simulate_logs(cfg);
  double total = 0.0;
  for (std::size_t k = 1; k < logs.interval_shifts.size(); ++k) {
    const double t0 = logs.frame_times[k - 1], t1 = logs.frame_times[k];
    const double dphi = cfg.injection.angle_y(t1) - cfg.injection.angle_y(t0);
    EXPECT_NEAR(logs.interval_shifts[k].tx, cfg.cam.focal_px * std::tan(dphi), 1e-9);
    EXPECT_EQ(logs.interval_shifts[k].ty, 0.0);
    total += dphi;
  }
  // Integral of the sin^2 pulse is half the amplitude times its length.
  EXPECT_NEAR(total, 0.8 * 0.6 / 2, 1e-9);
  double peak = 0.0;
  for (const auto& g : logs.gyro) peak = std::max(peak, g.wy);
  EXPECT_NEAR(peak, 0.8, 1e-3);
}

TEST(Simulate, PureTranslationIsRecoveredByMatcher) {
  SimConfig cfg;
  cfg.trajectory.kind = TrajectoryKind::kLine;
  cfg.trajectory.velocity_x = 0.3;
  cfg.trajectory.velocity_y = -0.2;
  cfg.trajectory.duration = 0.1;
  const auto sim = egoflow::simulate_sequence(cfg);
  ASSERT_EQ(sim.frames.size(), 3u);
  const auto f = egoflow::compute_flow_field(sim.frames[0], sim.frames[1], 0, 0,
                                             egoflow::MatchParams{});
  // Camera moves +x: ground content moves -x in the image.
  const double du = -0.3 / 30 * cfg.cam.focal_px;
  const double dv = 0.2 / 30 * cfg.cam.focal_px;
  const int want_u = 2 * static_cast<int>(std::lround(du / 2));
  const int want_v = 2 * static_cast<int>(std::lround(dv / 2));
  int interior = 0, hit = 0;
  for (int r = 1; r < f.grid_h - 1; ++r) {
    for (int c = 1; c < f.grid_w - 1; ++c) {
      ++interior;
      if (f.at(c, r).du == want_u && f.at(c, r).dv == want_v) ++hit;
    }
  }
  EXPECT_GE(hit, interior * 95 / 100);
}

TEST(Simulate, DirectoryOutputIsReproducible) {
  SimConfig cfg;
  cfg.cam.image_w = cfg.cam.image_h = 64;
  cfg.cam.cx = cfg.cam.cy = 31.5;
  cfg.trajectory.duration = 0.2;
  cfg.gyro_noise_std = 0.01;
  const auto tmp = std::filesystem::temp_directory_path();
  const auto a = tmp / "egoflow_sim_a", b = tmp / "egoflow_sim_b";
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  egoflow::simulate_to_directory(cfg, a.string());
  egoflow::simulate_to_directory(cfg, b.string());
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(egoflow::read_text_file(e.path().string()),
              egoflow::read_text_file((b / e.path().filename()).string()));
  }
  EXPECT_EQ(files, 6 + 3);
  std::optional<double> ts;
  egoflow::read_pgm((a / "frame_000003.pgm").string(), &ts);
  ASSERT_TRUE(ts);
  EXPECT_NEAR(*ts, 0.1, 1e-15);
  EXPECT_EQ(egoflow::parse_truth_csv(
                egoflow::read_text_file((a / "truth.csv").string())).size(), 6u);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);

  // A regular file in the way of the output directory.
  const auto blocker = tmp / "egoflow_sim_blocker";
  egoflow::write_text_file(blocker.string(), "x");
  EXPECT_THROW(egoflow::simulate_to_directory(cfg, blocker.string()),
               egoflow::IoError);
  std::filesystem::remove(blocker);
}

TEST(Config, ParseFormatRoundTrip) {
  const auto cfg = egoflow::parse_sim_config(
      "# test\ntrajectory = square\nside=3  # m\nspeed=0.25\nyaw_mode=tangent\n"
      "image_w=320\nimage_h=240\nfps=60\ngyro_noise_std=0.01\n"
      "inject_wy=0.5\ninject_start=1\ninject_duration=0.5\n");
  EXPECT_EQ(cfg.trajectory.kind, TrajectoryKind::kSquare);
  EXPECT_EQ(cfg.trajectory.side, 3.0);
  EXPECT_EQ(cfg.trajectory.speed, 0.25);
  EXPECT_EQ(cfg.trajectory.yaw_mode, egoflow::YawMode::kTangent);
  EXPECT_EQ(cfg.cam.cx, 159.5);
  EXPECT_EQ(cfg.cam.cy, 119.5);
  EXPECT_EQ(cfg.fps, 60.0);
  EXPECT_EQ(cfg.injection.wy_amplitude, 0.5);
  const auto again = egoflow::parse_sim_config(egoflow::format_sim_config(cfg));
  EXPECT_EQ(egoflow::format_sim_config(again), egoflow::format_sim_config(cfg));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(egoflow::parse_sim_config("colour = red\n"),
               egoflow::InvalidArgumentError);
  EXPECT_THROW(egoflow::parse_sim_config("fps = 30\nfps = 60\n"),
               egoflow::InvalidArgumentError);
  EXPECT_THROW(egoflow::parse_sim_config("fps = fast\n"),
               egoflow::InvalidArgumentError);
  EXPECT_THROW(egoflow::parse_sim_config("just words\n"),
               egoflow::InvalidArgumentError);
  EXPECT_THROW(egoflow::parse_sim_config("trajectory = spiral\n"),
               egoflow::InvalidArgumentError);
  SimConfig cfg;
  cfg.altitude = -1;
  EXPECT_THROW(egoflow::simulate_logs(cfg), egoflow::DomainError);
  EXPECT_THROW(egoflow::load_sim_config("/nonexistent/sim.cfg"), egoflow::IoError);
}

}  // namespace
