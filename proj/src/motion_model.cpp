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

#include "egoflow/motion_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "egoflow/error.hpp"

namespace egoflow {

void RansacParams::validate() const {
  if (iterations < 1) throw DomainError("RANSAC iterations must be >= 1");
  if (!(inlier_threshold > 0.0)) {
    throw DomainError("inlier threshold must be positive");
  }
  if (min_inliers < 0) throw DomainError("min_inliers must be >= 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("confidence must lie in (0, 1)");
  }
}

RigidTransform2D fit_rigid_2d(std::span<const Correspondence> pairs) {
  if (pairs.size() < 2) {
    throw DegenerateSampleError("rigid fit needs at least two pairs");
  }
  const double n = static_cast<double>(pairs.size());
  double su = 0, sv = 0, du = 0, dv = 0;
  for (const auto& p : pairs) {
    su += p.src_u;
    sv += p.src_v;
    du += p.dst_u;
    dv += p.dst_v;
  }
  su /= n;
  sv /= n;
  du /= n;
  dv /= n;

  double dot = 0, cross = 0, spread = 0;
  for (const auto& p : pairs) {
    const double au = p.src_u - su, av = p.src_v - sv;
    const double bu = p.dst_u - du, bv = p.dst_v - dv;
    dot += au * bu + av * bv;
    cross += au * bv - av * bu;
    spread += au * au + av * av;
  }
  if (spread == 0.0) {
    throw DegenerateSampleError("all source points coincide");
  }
  RigidTransform2D xf;
  xf.theta = normalize_angle(std::atan2(cross, dot));
  const double c = std::cos(xf.theta), s = std::sin(xf.theta);
  xf.tx = du - (c * su - s * sv);
  xf.ty = dv - (s * su + c * sv);
  return xf;
}

double fit_rotation_about_origin(std::span<const Correspondence> pairs) {
  double dot = 0, cross = 0, spread = 0;
  for (const auto& p : pairs) {
    dot += p.src_u * p.dst_u + p.src_v * p.dst_v;
    cross += p.src_u * p.dst_v - p.src_v * p.dst_u;
    spread += p.src_u * p.src_u + p.src_v * p.src_v;
  }
  if (spread == 0.0) {
    throw DegenerateSampleError("all source points are at the origin");
  }
  return normalize_angle(std::atan2(cross, dot));
}

std::vector<Correspondence> correspondences_from_field(
    const FlowField& field, std::vector<std::size_t>* indices) {
  std::vector<Correspondence> pairs;
  pairs.reserve(field.vectors.size());
  if (indices != nullptr) indices->clear();
  for (int row = 0; row < field.grid_h; ++row) {
    for (int col = 0; col < field.grid_w; ++col) {
      const MotionVector& mv = field.at(col, row);
      if (!mv.usable()) continue;
      const double u = field.center_u(col), v = field.center_v(row);
      pairs.push_back({u, v, u + mv.du, v + mv.dv});
      if (indices != nullptr) {
        indices->push_back(static_cast<std::size_t>(row) * field.grid_w + col);
      }
    }
  }
  return pairs;
}

namespace {

struct Score {
  int count = 0;
  double residual = 0.0;
};

Score score_model(std::span<const Correspondence> pairs,
                  const RigidTransform2D& xf, double threshold,
                  std::vector<bool>* mask) {
  const double c = std::cos(xf.theta), s = std::sin(xf.theta);
  const double thr2 = threshold * threshold;
  Score score;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const double eu = c * p.src_u - s * p.src_v + xf.tx - p.dst_u;
    const double ev = s * p.src_u + c * p.src_v + xf.ty - p.dst_v;
    const double r2 = eu * eu + ev * ev;
    const bool inlier = r2 <= thr2;
    if (inlier) {
      ++score.count;
      score.residual += std::sqrt(r2);
    }
    if (mask != nullptr) (*mask)[i] = inlier;
  }
  return score;
}

RigidTransform2D fit_masked(std::span<const Correspondence> pairs,
                            const std::vector<bool>& mask) {
  std::vector<Correspondence> subset;
  subset.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (mask[i]) subset.push_back(pairs[i]);
  }
  return fit_rigid_2d(subset);
}

}  // namespace

RansacResult ransac_rigid(std::span<const Correspondence> pairs,
                          const RansacParams& params) {
  params.validate();
  const std::size_t n = pairs.size();
  const std::size_t floor_count =
      static_cast<std::size_t>(std::max(2, params.min_inliers));
  if (n < floor_count) {
    throw NoConsensusError("only " + std::to_string(n) +
                           " correspondences, need " +
                           std::to_string(floor_count));
  }

  std::mt19937_64 rng(params.seed);
  RigidTransform2D best_model;
  Score best{-1, 0.0};
  for (int it = 0; it < params.iterations; ++it) {
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::uniform_int_distribution<std::size_t> second(0, n - 2);
    const std::size_t i = first(rng);
    std::size_t j = second(rng);
    if (j >= i) ++j;
    const Correspondence sample[2] = {pairs[i], pairs[j]};
    RigidTransform2D model;
    try {
      model = fit_rigid_2d(sample);
    } catch (const DegenerateSampleError&) {
      continue;
    }
    const Score s = score_model(pairs, model, params.inlier_threshold, nullptr);
    // Strict comparison keeps the earliest iteration on a full tie.
    if (s.count > best.count ||
        (s.count == best.count && s.residual < best.residual)) {
      best = s;
      best_model = model;
    }
  }
  if (best.count < params.min_inliers || best.count < 2) {
    throw NoConsensusError("best hypothesis has " +
                           std::to_string(std::max(best.count, 0)) +
                           " inliers, need " +
                           std::to_string(params.min_inliers));
  }

  RansacResult result;
  result.valid_count = static_cast<int>(n);
  result.inlier_mask.assign(n, false);
  score_model(pairs, best_model, params.inlier_threshold, &result.inlier_mask);
  RigidTransform2D model = fit_masked(pairs, result.inlier_mask);

  // Refitting can move the consensus set; settle it in a few passes.
  std::vector<bool> mask(n, false);
  for (int pass = 0; pass < 3; ++pass) {
    const Score s = score_model(pairs, model, params.inlier_threshold, &mask);
    if (mask == result.inlier_mask) break;
    if (s.count < params.min_inliers || s.count < 2) break;
    RigidTransform2D refit;
    try {
      refit = fit_masked(pairs, mask);
    } catch (const DegenerateSampleError&) {
      break;
    }
    result.inlier_mask = mask;
    model = refit;
  }
  result.transform = model;
  result.inlier_count = static_cast<int>(
      std::count(result.inlier_mask.begin(), result.inlier_mask.end(), true));
  return result;
}

RansacResult ransac_rigid(const FlowField& field, const RansacParams& params) {
  std::vector<std::size_t> indices;
  const auto pairs = correspondences_from_field(field, &indices);
  RansacResult r = ransac_rigid(pairs, params);
  std::vector<bool> grid_mask(field.vectors.size(), false);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    grid_mask[indices[k]] = r.inlier_mask[k];
  }
  r.inlier_mask = std::move(grid_mask);
  return r;
}

int ransac_iterations(double outlier_ratio, int sample_size,
                      double confidence) {
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) {
    throw DomainError("outlier ratio must lie in [0, 1)");
  }
  if (sample_size < 1) throw DomainError("sample size must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("confidence must lie in (0, 1)");
  }
  const double clean = std::pow(1.0 - outlier_ratio, sample_size);
  if (clean >= 1.0) return 1;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - clean);
  if (!(k > 1.0)) return 1;
  return static_cast<int>(std::ceil(k));
}

GyroRates average_gyro(std::span<const GyroSample> samples, double t0,
                       double t1) {
  if (samples.empty()) throw DomainError("gyro log is empty");
  if (!(t1 > t0)) throw DomainError("gyro averaging interval is empty");

  auto value_at = [&](double t) -> GyroRates {
    if (t <= samples.front().timestamp) {
      const auto& s = samples.front();
      return {s.wx, s.wy, s.wz};
    }
    if (t >= samples.back().timestamp) {
      const auto& s = samples.back();
      return {s.wx, s.wy, s.wz};
    }
    auto hi = std::upper_bound(
        samples.begin(), samples.end(), t,
        [](double x, const GyroSample& s) { return x < s.timestamp; });
    auto lo = hi - 1;
    const double span = hi->timestamp - lo->timestamp;
    const double a = span > 0.0 ? (t - lo->timestamp) / span : 1.0;
    return {lo->wx + a * (hi->wx - lo->wx), lo->wy + a * (hi->wy - lo->wy),
            lo->wz + a * (hi->wz - lo->wz)};
  };

  GyroRates acc;
  double prev_t = t0;
  GyroRates prev = value_at(t0);
  auto add_segment = [&](double t, const GyroRates& r) {
    const double h = t - prev_t;
    acc.wx += 0.5 * h * (prev.wx + r.wx);
    acc.wy += 0.5 * h * (prev.wy + r.wy);
    acc.wz += 0.5 * h * (prev.wz + r.wz);
    prev_t = t;
    prev = r;
  };
  auto it = std::upper_bound(
      samples.begin(), samples.end(), t0,
      [](double x, const GyroSample& s) { return x < s.timestamp; });
  for (; it != samples.end() && it->timestamp < t1; ++it) {
    add_segment(it->timestamp, {it->wx, it->wy, it->wz});
  }
  add_segment(t1, value_at(t1));
  const double len = t1 - t0;
  return {acc.wx / len, acc.wy / len, acc.wz / len};
}

namespace {

void check_rotation_args(double wx, double wy, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const double half_pi = std::numbers::pi / 2.0;
  if (!(std::abs(wx * dt) < half_pi) || !(std::abs(wy * dt) < half_pi)) {
    throw DomainError("inter-frame rotation reaches the tangent singularity");
  }
}

}  // namespace

PixelShift compensate_rotation(PixelShift t, double wx, double wy, double dt,
                               const CameraIntrinsics& cam) {
  check_rotation_args(wx, wy, dt);
  return {t.tx - cam.focal_px * std::tan(wy * dt),
          t.ty - cam.focal_px * std::tan(wx * dt)};
}

PixelShift compensate_rotation_linear(PixelShift t, double wx, double wy,
                                      double dt, const CameraIntrinsics& cam) {
  check_rotation_args(wx, wy, dt);
  return {t.tx - cam.focal_px * wy * dt, t.ty - cam.focal_px * wx * dt};
}

RigidTransform2D recenter_transform(const RigidTransform2D& xf, double cx,
                                    double cy) {
  // dst = R src + t with src = c + p gives p' = R p + (R c + t - c).
  RigidTransform2D out = xf;
  out.tx = xf.apply_u(cx, cy) - cx;
  out.ty = xf.apply_v(cx, cy) - cy;
  return out;
}

}  // namespace egoflow
