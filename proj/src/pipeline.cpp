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

#include "egoflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "egoflow/error.hpp"
#include "egoflow/metric_scale.hpp"

namespace egoflow {

void PipelineConfig::validate() const {
  cam.validate();
  match.validate();
  ransac.validate();
  if (!(max_range_age >= 0.0)) {
    throw DomainError("max_range_age must be non-negative");
  }
}

VelocityEstimate estimate_interval(const FlowField& field, double t0,
                                   double t1, std::span<const GyroSample> gyro,
                                   double z, const PipelineConfig& cfg,
                                   std::uint64_t seed) {
  const double dt = t1 - t0;
  if (!(dt > 0.0)) throw DomainError("frame interval must be positive");
  RansacParams ransac = cfg.ransac;
  ransac.seed = seed;
  const RansacResult fit = ransac_rigid(field, ransac);
  RigidTransform2D xf = recenter_transform(fit.transform, cfg.cam.cx, cfg.cam.cy);
  if (cfg.compensation_enabled) {
    const GyroRates rates = average_gyro(gyro, t0, t1);
    const PixelShift t =
        compensate_rotation({xf.tx, xf.ty}, rates.wx, rates.wy, dt, cfg.cam);
    xf.tx = t.tx;
    xf.ty = t.ty;
  }
  return flow_to_velocity(xf, z, dt, 0.5 * (t0 + t1), cfg.cam,
                          fit.inlier_count, fit.valid_count);
}

namespace {

// Nearest usable range sample to t, or nullopt when none lies within max_age.
// Dropouts (non-positive or non-finite z) are skipped.
std::optional<double> range_near(std::span<const RangeSample> range, double t,
                                 double max_age) {
  auto usable = [](const RangeSample& s) {
    return s.z > 0.0 && std::isfinite(s.z);
  };
  auto hi = std::lower_bound(
      range.begin(), range.end(), t,
      [](const RangeSample& s, double x) { return s.timestamp < x; });
  std::optional<double> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (auto it = hi; it != range.end() && it->timestamp - t <= max_age; ++it) {
    if (usable(*it)) {
      best = it->z;
      best_gap = it->timestamp - t;
      break;
    }
  }
  for (auto it = hi; it != range.begin();) {
    --it;
    const double gap = t - it->timestamp;
    if (gap > max_age || gap >= best_gap) break;
    if (usable(*it)) {
      best = it->z;
      break;
    }
  }
  return best;
}

int count_usable(const FlowField& field) {
  return static_cast<int>(std::count_if(
      field.vectors.begin(), field.vectors.end(),
      [](const MotionVector& mv) { return mv.usable(); }));
}

}  // namespace

PipelineResult run_pipeline(std::span<const FlowField> fields,
                            std::span<const GyroSample> gyro,
                            std::span<const RangeSample> range,
                            const PipelineConfig& cfg) {
  cfg.validate();
  if (fields.empty()) throw DomainError("motion-vector stream is empty");
  if (fields.size() < 2) {
    throw DomainError("need at least two frames to estimate motion");
  }
  if (cfg.compensation_enabled && gyro.empty()) {
    throw DomainError("rotation compensation needs a non-empty gyro log");
  }
  if (range.empty()) throw DomainError("range log is empty");

  PipelineResult out;
  out.velocities.reserve(fields.size() - 1);
  out.poses.reserve(fields.size());
  Pose2D pose;
  out.poses.push_back({fields.front().timestamp, pose});

  std::optional<VelocityEstimate> last_valid;
  std::optional<double> last_z;
  for (std::size_t k = 1; k < fields.size(); ++k) {
    const double t0 = fields[k - 1].timestamp;
    const double t1 = fields[k].timestamp;
    const double mid = 0.5 * (t0 + t1);

    bool degraded = false;
    std::optional<double> z = range_near(range, mid, cfg.max_range_age);
    if (z) {
      last_z = z;
    } else if (last_z) {
      z = last_z;
      degraded = true;
    }

    VelocityEstimate v;
    bool ok = false;
    if (z) {
      try {
        v = estimate_interval(fields[k], t0, t1, gyro, *z, cfg,
                              cfg.ransac.seed + k);
        v.degraded = degraded;
        ok = true;
      } catch (const NoConsensusError&) {
      } catch (const DomainError&) {
      } catch (const DegenerateSampleError&) {
      }
    }

    if (ok) {
      pose = integrate_pose(pose, v, t1 - t0);
      last_valid = v;
    } else {
      VelocityEstimate carried;
      if (last_valid) carried = *last_valid;
      carried.timestamp = mid;
      carried.valid = false;
      carried.degraded = degraded;
      carried.z_used = 0.0;
      carried.inlier_count = 0;
      carried.valid_count = count_usable(fields[k]);
      v = carried;
    }
    out.velocities.push_back(v);
    out.poses.push_back({t1, pose});
  }
  return out;
}

ErrorStats velocity_error_stats(std::span<const VelocityEstimate> est,
                                std::span<const GroundTruthSample> truth) {
  std::vector<double> errors;
  errors.reserve(est.size());
  for (const VelocityEstimate& v : est) {
    if (!v.valid) continue;
    auto hi = std::lower_bound(
        truth.begin(), truth.end(), v.timestamp,
        [](const GroundTruthSample& g, double t) { return g.timestamp < t; });
    if (hi == truth.end()) continue;
    double tvx = 0.0, tvy = 0.0;
    if (hi->timestamp == v.timestamp) {
      if (hi->corner_flag) continue;
      tvx = hi->vx;
      tvy = hi->vy;
    } else {
      if (hi == truth.begin()) continue;
      auto lo = hi - 1;
      if (lo->corner_flag || hi->corner_flag) continue;
      const double a =
          (v.timestamp - lo->timestamp) / (hi->timestamp - lo->timestamp);
      tvx = lo->vx + a * (hi->vx - lo->vx);
      tvy = lo->vy + a * (hi->vy - lo->vy);
    }
    errors.push_back(std::hypot(v.vx - tvx, v.vy - tvy));
  }
  if (errors.empty()) {
    throw DomainError("no valid estimate overlaps the truth series");
  }
  ErrorStats s;
  s.n = static_cast<int>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / s.n;
  double var = 0.0;
  for (double e : errors) var += (e - s.mean) * (e - s.mean);
  s.std = std::sqrt(var / s.n);
  return s;
}

Alignment align_trajectories(std::span<const StampedPose> est,
                             std::span<const StampedPose> ref,
                             double tolerance, bool rotate) {
  // Matched (est index, ref index) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double t = est[i].timestamp;
    auto hi = std::lower_bound(
        ref.begin(), ref.end(), t,
        [](const StampedPose& p, double x) { return p.timestamp < x; });
    std::size_t best = ref.size();
    double gap = std::numeric_limits<double>::infinity();
    if (hi != ref.end()) {
      best = static_cast<std::size_t>(hi - ref.begin());
      gap = hi->timestamp - t;
    }
    if (hi != ref.begin() && t - (hi - 1)->timestamp < gap) {
      best = static_cast<std::size_t>(hi - 1 - ref.begin());
      gap = t - (hi - 1)->timestamp;
    }
    if (best < ref.size() && gap <= tolerance) matches.emplace_back(i, best);
  }
  if (matches.size() < 2) {
    throw DomainError("fewer than two matched samples for alignment");
  }

  const Pose2D& e0 = est[matches.front().first].pose;
  const Pose2D& r0 = ref[matches.front().second].pose;
  Alignment out;
  out.matched = static_cast<int>(matches.size());
  if (rotate) {
    std::vector<Correspondence> pairs;
    pairs.reserve(matches.size());
    for (const auto& [i, j] : matches) {
      pairs.push_back({est[i].pose.x - e0.x, est[i].pose.y - e0.y,
                       ref[j].pose.x - r0.x, ref[j].pose.y - r0.y});
    }
    try {
      out.rotation = fit_rotation_about_origin(pairs);
    } catch (const DegenerateSampleError&) {
      out.rotation = 0.0;  // the estimate never left its origin
    }
  }
  const double c = std::cos(out.rotation), s = std::sin(out.rotation);
  out.tx = r0.x - (c * e0.x - s * e0.y);
  out.ty = r0.y - (s * e0.x + c * e0.y);
  out.aligned.reserve(est.size());
  for (const StampedPose& p : est) {
    StampedPose a;
    a.timestamp = p.timestamp;
    a.pose.x = c * p.pose.x - s * p.pose.y + out.tx;
    a.pose.y = s * p.pose.x + c * p.pose.y + out.ty;
    a.pose.heading = normalize_angle(p.pose.heading + out.rotation);
    out.aligned.push_back(a);
  }
  double sq = 0.0;
  for (const auto& [i, j] : matches) {
    const double dx = out.aligned[i].pose.x - ref[j].pose.x;
    const double dy = out.aligned[i].pose.y - ref[j].pose.y;
    sq += dx * dx + dy * dy;
  }
  out.rms_residual = std::sqrt(sq / matches.size());
  const auto [li, lj] = matches.back();
  out.final_error = std::hypot(out.aligned[li].pose.x - ref[lj].pose.x,
                               out.aligned[li].pose.y - ref[lj].pose.y);
  return out;
}

LocalXY geodetic_to_local(double lat_deg, double lon_deg, double origin_lat_deg,
                          double origin_lon_deg) {
  if (!(std::abs(lat_deg) < 89.0) || !(std::abs(origin_lat_deg) < 89.0)) {
    throw DomainError("latitude must lie strictly within +-89 degrees");
  }
  if (!std::isfinite(lon_deg) || !std::isfinite(origin_lon_deg)) {
    throw DomainError("longitude must be finite");
  }
  constexpr double kA = 6378137.0;
  constexpr double kF = 1.0 / 298.257223563;
  constexpr double kE2 = kF * (2.0 - kF);
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double phi = origin_lat_deg * kDeg;
  const double sin_phi = std::sin(phi);
  const double w = 1.0 - kE2 * sin_phi * sin_phi;
  const double meridional = kA * (1.0 - kE2) / (w * std::sqrt(w));
  const double prime_vertical = kA / std::sqrt(w);
  const double dlon = std::remainder(lon_deg - origin_lon_deg, 360.0);
  return {dlon * kDeg * prime_vertical * std::cos(phi),
          (lat_deg - origin_lat_deg) * kDeg * meridional};
}

EvalReport evaluate(std::span<const VelocityEstimate> est,
                    std::span<const GroundTruthSample> truth,
                    std::optional<std::span<const StampedPose>> poses,
                    bool align) {
  EvalReport r;
  for (const auto& v : est) (v.valid ? r.n_valid : r.n_invalid)++;
  r.velocity = velocity_error_stats(est, truth);
  r.alignment_rotation_rad = std::numeric_limits<double>::quiet_NaN();
  r.final_position_error_m = std::numeric_limits<double>::quiet_NaN();
  if (poses) {
    std::vector<StampedPose> ref;
    ref.reserve(truth.size());
    for (const auto& g : truth) ref.push_back({g.timestamp, g.pose});
    const Alignment a = align_trajectories(*poses, ref, 1e-3, align);
    r.alignment_rotation_rad = a.rotation;
    r.final_position_error_m = a.final_error;
  }
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string format_eval_report_text(const EvalReport& r) {
  std::string s;
  s += "velocity error mean [m/s]:   " + fmt(r.velocity.mean) + "\n";
  s += "velocity error std [m/s]:    " + fmt(r.velocity.std) + "\n";
  s += "compared estimates:          " + std::to_string(r.velocity.n) + "\n";
  s += "valid estimates:             " + std::to_string(r.n_valid) + "\n";
  s += "invalid estimates:           " + std::to_string(r.n_invalid) + "\n";
  s += "alignment rotation [rad]:    " + fmt(r.alignment_rotation_rad) + "\n";
  s += "final position error [m]:    " + fmt(r.final_position_error_m) + "\n";
  return s;
}

std::string format_eval_report_csv(const EvalReport& r) {
  std::string s = "metric,value\n";
  s += "mean_err," + fmt(r.velocity.mean) + "\n";
  s += "std_err," + fmt(r.velocity.std) + "\n";
  s += "n_valid," + std::to_string(r.n_valid) + "\n";
  s += "n_invalid," + std::to_string(r.n_invalid) + "\n";
  s += "alignment_rotation_rad," + fmt(r.alignment_rotation_rad) + "\n";
  s += "final_position_error_m," + fmt(r.final_position_error_m) + "\n";
  return s;
}

}  // namespace egoflow
