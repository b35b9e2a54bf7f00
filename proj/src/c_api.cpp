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

#include "egoflow/egoflow.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "egoflow/block_match.hpp"
#include "egoflow/csv_io.hpp"
#include "egoflow/error.hpp"
#include "egoflow/image.hpp"
#include "egoflow/metric_scale.hpp"
#include "egoflow/mv_stream.hpp"
#include "egoflow/pipeline.hpp"
#include "egoflow/simulator.hpp"

struct egf_image {
  egoflow::GrayImage image;
};

struct egf_flow_stream {
  std::vector<egoflow::FlowField> fields;
};

struct egf_gyro_log {
  std::vector<egoflow::GyroSample> samples;
};

struct egf_range_log {
  std::vector<egoflow::RangeSample> samples;
};

struct egf_track {
  egoflow::PipelineResult result;
};

struct egf_sim_config {
  egoflow::SimConfig cfg;
};

namespace {

thread_local std::string g_last_error;
thread_local std::int64_t g_last_offset = -1;

egf_status fail(egf_status status, const std::string& message,
                std::int64_t offset = -1) {
  g_last_error = message;
  g_last_offset = offset;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
egf_status guarded(F&& body) {
  g_last_error.clear();
  g_last_offset = -1;
  try {
    body();
    return EGF_OK;
  } catch (const egoflow::FormatError& e) {
    return fail(EGF_ERR_FORMAT, e.what(), e.offset());
  } catch (const egoflow::Error& e) {
    return fail(static_cast<egf_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(EGF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EGF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EGF_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) {
    throw egoflow::InvalidArgumentError(std::string(name) + " is NULL");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

egoflow::CameraIntrinsics to_cpp(const egf_camera& c) {
  egoflow::CameraIntrinsics cam;
  cam.focal_px = c.focal_px;
  cam.cx = c.cx;
  cam.cy = c.cy;
  cam.image_w = c.image_w;
  cam.image_h = c.image_h;
  return cam;
}

egf_camera to_c(const egoflow::CameraIntrinsics& cam) {
  return {cam.focal_px, cam.cx, cam.cy, cam.image_w, cam.image_h};
}

egoflow::MatchParams to_cpp(const egf_match_params& p) {
  egoflow::MatchParams m;
  m.macroblock_size = p.macroblock_size;
  m.search_range = p.search_range;
  m.step = p.step;
  if (p.flat_sad_threshold > 0.0) m.flat_sad_threshold = p.flat_sad_threshold;
  return m;
}

egoflow::RansacParams to_cpp(const egf_ransac_params& p) {
  egoflow::RansacParams r;
  r.iterations = p.iterations;
  r.inlier_threshold = p.inlier_threshold;
  r.min_inliers = p.min_inliers;
  r.confidence = p.confidence;
  r.seed = p.seed;
  return r;
}

egoflow::PipelineConfig to_cpp(const egf_pipeline_config& c) {
  egoflow::PipelineConfig cfg;
  cfg.cam = to_cpp(c.cam);
  cfg.match = to_cpp(c.match);
  cfg.ransac = to_cpp(c.ransac);
  cfg.compensation_enabled = c.compensation_enabled != 0;
  cfg.max_range_age = c.max_range_age;
  return cfg;
}

const egoflow::FlowField& field_at(const egf_flow_stream* s, size_t index) {
  if (index >= s->fields.size()) {
    throw egoflow::InvalidArgumentError("field index out of range");
  }
  return s->fields[index];
}

}  // namespace

extern "C" {

const char* egf_version(void) { return "1.0.0"; }

const char* egf_status_string(egf_status status) {
  switch (status) {
    case EGF_OK: return "ok";
    case EGF_ERR_DOMAIN: return "domain error";
    case EGF_ERR_FORMAT: return "format error";
    case EGF_ERR_RANGE: return "range error";
    case EGF_ERR_IO: return "I/O error";
    case EGF_ERR_NO_CONSENSUS: return "no consensus";
    case EGF_ERR_DEGENERATE: return "degenerate sample";
    case EGF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EGF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* egf_last_error(void) { return g_last_error.c_str(); }
int64_t egf_last_error_offset(void) { return g_last_offset; }
void egf_free(void* ptr) { std::free(ptr); }

void egf_camera_default(egf_camera* cam) {
  if (cam != nullptr) *cam = to_c(egoflow::CameraIntrinsics{});
}

void egf_match_params_default(egf_match_params* params) {
  if (params == nullptr) return;
  const egoflow::MatchParams m;
  *params = {m.macroblock_size, m.search_range, m.step, 0.0};
}

void egf_ransac_params_default(egf_ransac_params* params) {
  if (params == nullptr) return;
  const egoflow::RansacParams r;
  *params = {r.iterations, r.inlier_threshold, r.min_inliers, r.confidence,
             r.seed};
}

void egf_pipeline_config_default(egf_pipeline_config* cfg) {
  if (cfg == nullptr) return;
  egf_camera_default(&cfg->cam);
  egf_match_params_default(&cfg->match);
  egf_ransac_params_default(&cfg->ransac);
  const egoflow::PipelineConfig d;
  cfg->compensation_enabled = d.compensation_enabled ? 1 : 0;
  cfg->max_range_age = d.max_range_age;
}

egf_status egf_image_create(int32_t width, int32_t height,
                            const uint8_t* pixels, egf_image** out) {
  return guarded([&] {
    require(out, "out");
    egoflow::GrayImage img(width, height);
    if (pixels != nullptr) {
      std::memcpy(img.pixels().data(), pixels, img.pixels().size());
    }
    *out = new egf_image{std::move(img)};
  });
}

egf_status egf_image_read_pgm(const char* path, egf_image** out,
                              double* timestamp, int32_t* has_timestamp) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::optional<double> ts;
    egoflow::GrayImage img = egoflow::read_pgm(path, &ts);
    if (timestamp != nullptr) *timestamp = ts.value_or(0.0);
    if (has_timestamp != nullptr) *has_timestamp = ts ? 1 : 0;
    *out = new egf_image{std::move(img)};
  });
}

egf_status egf_image_write_pgm(const egf_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    egoflow::write_pgm(path, image->image);
  });
}

int32_t egf_image_width(const egf_image* image) {
  return image != nullptr ? image->image.width() : 0;
}
int32_t egf_image_height(const egf_image* image) {
  return image != nullptr ? image->image.height() : 0;
}
const uint8_t* egf_image_data(const egf_image* image) {
  return image != nullptr ? image->image.pixels().data() : nullptr;
}
void egf_image_destroy(egf_image* image) { delete image; }

egf_status egf_flow_stream_create(egf_flow_stream** out) {
  return guarded([&] {
    require(out, "out");
    *out = new egf_flow_stream{};
  });
}

void egf_flow_stream_destroy(egf_flow_stream* stream) { delete stream; }

size_t egf_flow_stream_size(const egf_flow_stream* stream) {
  return stream != nullptr ? stream->fields.size() : 0;
}

namespace {

void require_later(const egf_flow_stream* stream, double timestamp) {
  if (!stream->fields.empty() && !(timestamp > stream->fields.back().timestamp)) {
    throw egoflow::FormatError("field timestamps must strictly increase");
  }
}

}  // namespace

egf_status egf_flow_stream_append_computed(egf_flow_stream* stream,
                                           const egf_image* ref,
                                           const egf_image* tgt,
                                           double timestamp,
                                           uint32_t frame_index,
                                           const egf_match_params* params) {
  return guarded([&] {
    require(stream, "stream");
    require(ref, "ref");
    require(tgt, "tgt");
    require_later(stream, timestamp);
    egf_match_params p;
    egf_match_params_default(&p);
    if (params != nullptr) p = *params;
    stream->fields.push_back(egoflow::compute_flow_field(
        ref->image, tgt->image, timestamp, frame_index, to_cpp(p)));
  });
}

egf_status egf_flow_stream_append_zero(egf_flow_stream* stream, int32_t grid_w,
                                       int32_t grid_h, int32_t macroblock_size,
                                       double timestamp, uint32_t frame_index) {
  return guarded([&] {
    require(stream, "stream");
    require_later(stream, timestamp);
    if (grid_w <= 0 || grid_h <= 0 || macroblock_size <= 0) {
      throw egoflow::DomainError("grid dimensions must be positive");
    }
    egoflow::FlowField f;
    f.frame_index = frame_index;
    f.timestamp = timestamp;
    f.grid_w = grid_w;
    f.grid_h = grid_h;
    f.macroblock_size = macroblock_size;
    f.vectors.resize(static_cast<std::size_t>(grid_w) * grid_h);
    stream->fields.push_back(std::move(f));
  });
}

egf_status egf_flow_stream_field_info(const egf_flow_stream* stream,
                                      size_t index, uint32_t* frame_index,
                                      double* timestamp, int32_t* grid_w,
                                      int32_t* grid_h,
                                      int32_t* macroblock_size) {
  return guarded([&] {
    require(stream, "stream");
    const egoflow::FlowField& f = field_at(stream, index);
    if (frame_index != nullptr) *frame_index = f.frame_index;
    if (timestamp != nullptr) *timestamp = f.timestamp;
    if (grid_w != nullptr) *grid_w = f.grid_w;
    if (grid_h != nullptr) *grid_h = f.grid_h;
    if (macroblock_size != nullptr) *macroblock_size = f.macroblock_size;
  });
}

egf_status egf_flow_stream_vector(const egf_flow_stream* stream, size_t index,
                                  int32_t col, int32_t row,
                                  egf_motion_vector* out) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    const egoflow::FlowField& f = field_at(stream, index);
    if (col < 0 || row < 0 || col >= f.grid_w || row >= f.grid_h) {
      throw egoflow::InvalidArgumentError("macroblock index out of range");
    }
    const egoflow::MotionVector& mv = f.at(col, row);
    *out = {mv.du, mv.dv, mv.sad};
  });
}

egf_status egf_flow_stream_encode(const egf_flow_stream* stream, uint8_t** out,
                                  size_t* size) {
  return guarded([&] {
    require(stream, "stream");
    require(out, "out");
    require(size, "size");
    const std::vector<std::uint8_t> bytes =
        egoflow::encode_mv_stream(stream->fields);
    auto* buf = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, bytes.data(), bytes.size());
    *out = buf;
    *size = bytes.size();
  });
}

egf_status egf_flow_stream_decode(const uint8_t* bytes, size_t size,
                                  egf_flow_stream** out, int32_t* truncated) {
  return guarded([&] {
    require(out, "out");
    if (bytes == nullptr && size > 0) require(bytes, "bytes");
    egoflow::MvDecodeResult r = egoflow::decode_mv_stream(
        std::span<const std::uint8_t>(bytes, size));
    if (truncated != nullptr) *truncated = r.truncated ? 1 : 0;
    *out = new egf_flow_stream{std::move(r.fields)};
  });
}

egf_status egf_flow_stream_load(const char* path, egf_flow_stream** out,
                                int32_t* truncated) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    egoflow::MvDecodeResult r = egoflow::read_mv_stream_file(path);
    if (truncated != nullptr) *truncated = r.truncated ? 1 : 0;
    *out = new egf_flow_stream{std::move(r.fields)};
  });
}

egf_status egf_gyro_log_load(const char* csv_path, egf_gyro_log** out) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(out, "out");
    auto samples = egoflow::parse_gyro_csv(egoflow::read_text_file(csv_path));
    *out = new egf_gyro_log{std::move(samples)};
  });
}

size_t egf_gyro_log_size(const egf_gyro_log* log) {
  return log != nullptr ? log->samples.size() : 0;
}
void egf_gyro_log_destroy(egf_gyro_log* log) { delete log; }

egf_status egf_range_log_load(const char* csv_path, egf_range_log** out) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(out, "out");
    auto samples = egoflow::parse_range_csv(egoflow::read_text_file(csv_path));
    *out = new egf_range_log{std::move(samples)};
  });
}

size_t egf_range_log_size(const egf_range_log* log) {
  return log != nullptr ? log->samples.size() : 0;
}
void egf_range_log_destroy(egf_range_log* log) { delete log; }

egf_status egf_run_pipeline(const egf_flow_stream* stream,
                            const egf_gyro_log* gyro,
                            const egf_range_log* range,
                            const egf_pipeline_config* cfg, egf_track** out) {
  return guarded([&] {
    require(stream, "stream");
    require(range, "range");
    require(cfg, "cfg");
    require(out, "out");
    static const std::vector<egoflow::GyroSample> kNoGyro;
    const auto& g = gyro != nullptr ? gyro->samples : kNoGyro;
    auto result =
        egoflow::run_pipeline(stream->fields, g, range->samples, to_cpp(*cfg));
    *out = new egf_track{std::move(result)};
  });
}

void egf_track_destroy(egf_track* track) { delete track; }

size_t egf_track_velocity_count(const egf_track* track) {
  return track != nullptr ? track->result.velocities.size() : 0;
}

size_t egf_track_pose_count(const egf_track* track) {
  return track != nullptr ? track->result.poses.size() : 0;
}

egf_status egf_track_velocity(const egf_track* track, size_t index,
                              egf_velocity* out) {
  return guarded([&] {
    require(track, "track");
    require(out, "out");
    if (index >= track->result.velocities.size()) {
      throw egoflow::InvalidArgumentError("velocity index out of range");
    }
    const auto& v = track->result.velocities[index];
    *out = {v.timestamp,      v.vx,          v.vy,
            v.wz,             v.z_used,      v.inlier_count,
            v.valid_count,    v.valid ? 1 : 0, v.degraded ? 1 : 0};
  });
}

egf_status egf_track_pose(const egf_track* track, size_t index,
                          egf_pose* out) {
  return guarded([&] {
    require(track, "track");
    require(out, "out");
    if (index >= track->result.poses.size()) {
      throw egoflow::InvalidArgumentError("pose index out of range");
    }
    const auto& p = track->result.poses[index];
    *out = {p.timestamp, p.pose.x, p.pose.y, p.pose.heading};
  });
}

egf_status egf_track_velocity_csv(const egf_track* track, char** out) {
  return guarded([&] {
    require(track, "track");
    require(out, "out");
    *out = dup_string(egoflow::format_velocity_csv(track->result.velocities));
  });
}

egf_status egf_track_pose_csv(const egf_track* track, char** out) {
  return guarded([&] {
    require(track, "track");
    require(out, "out");
    *out = dup_string(egoflow::format_pose_csv(track->result.poses));
  });
}

egf_status egf_velocity_envelope(double focal_px, double z, double fps,
                                 const egf_match_params* params, double* v_min,
                                 double* v_max) {
  return guarded([&] {
    require(v_min, "v_min");
    require(v_max, "v_max");
    egf_match_params p;
    egf_match_params_default(&p);
    if (params != nullptr) p = *params;
    egoflow::CameraIntrinsics cam;
    cam.focal_px = focal_px;
    const auto env = egoflow::velocity_envelope(cam, z, fps, to_cpp(p));
    *v_min = env.v_min;
    *v_max = env.v_max;
  });
}

egf_status egf_geodetic_to_local(double lat_deg, double lon_deg,
                                 double origin_lat_deg, double origin_lon_deg,
                                 double* x_east, double* y_north) {
  return guarded([&] {
    require(x_east, "x_east");
    require(y_north, "y_north");
    const auto xy = egoflow::geodetic_to_local(lat_deg, lon_deg,
                                               origin_lat_deg, origin_lon_deg);
    *x_east = xy.x;
    *y_north = xy.y;
  });
}

egf_status egf_sim_config_create(egf_sim_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new egf_sim_config{};
  });
}

egf_status egf_sim_config_load(const char* path, egf_sim_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new egf_sim_config{egoflow::load_sim_config(path)};
  });
}

egf_status egf_sim_config_parse(const char* text, egf_sim_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new egf_sim_config{egoflow::parse_sim_config(text)};
  });
}

egf_status egf_sim_config_set(egf_sim_config* cfg, const char* key,
                              const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    egoflow::set_sim_config_value(cfg->cfg, key, value);
  });
}

egf_status egf_sim_config_camera(const egf_sim_config* cfg, egf_camera* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = to_c(cfg->cfg.cam);
  });
}

double egf_sim_config_fps(const egf_sim_config* cfg) {
  return cfg != nullptr ? cfg->cfg.fps : 0.0;
}

void egf_sim_config_destroy(egf_sim_config* cfg) { delete cfg; }

egf_status egf_simulate(const egf_sim_config* cfg, const char* out_dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    egoflow::simulate_to_directory(cfg->cfg, out_dir);
  });
}

egf_status egf_evaluate_files(const char* velocity_csv_path,
                              const char* truth_csv_path,
                              const char* pose_csv_path, int32_t align,
                              egf_eval_report* out) {
  return guarded([&] {
    require(velocity_csv_path, "velocity_csv_path");
    require(truth_csv_path, "truth_csv_path");
    require(out, "out");
    const auto est =
        egoflow::parse_velocity_csv(egoflow::read_text_file(velocity_csv_path));
    const auto truth =
        egoflow::parse_truth_csv(egoflow::read_text_file(truth_csv_path));
    std::vector<egoflow::StampedPose> poses;
    std::optional<std::span<const egoflow::StampedPose>> pose_span;
    if (pose_csv_path != nullptr) {
      poses = egoflow::parse_pose_csv(egoflow::read_text_file(pose_csv_path));
      pose_span = poses;
    }
    const egoflow::EvalReport r =
        egoflow::evaluate(est, truth, pose_span, align != 0);
    *out = {r.velocity.mean, r.velocity.std, r.velocity.n, r.n_valid,
            r.n_invalid,     r.alignment_rotation_rad, r.final_position_error_m};
  });
}

namespace {

egoflow::EvalReport from_c(const egf_eval_report& c) {
  egoflow::EvalReport r;
  r.velocity = {c.mean_err, c.std_err, c.n_compared};
  r.n_valid = c.n_valid;
  r.n_invalid = c.n_invalid;
  r.alignment_rotation_rad = c.alignment_rotation_rad;
  r.final_position_error_m = c.final_position_error_m;
  return r;
}

}  // namespace

egf_status egf_eval_report_text(const egf_eval_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(egoflow::format_eval_report_text(from_c(*report)));
  });
}

egf_status egf_eval_report_csv(const egf_eval_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(egoflow::format_eval_report_csv(from_c(*report)));
  });
}

}  // extern "C"
