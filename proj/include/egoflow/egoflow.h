/*
 * Copyright 2026 The egoflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the egoflow shared library.
 *
 * Every function returns an egf_status. On failure a one-line description is
 * available from egf_last_error() on the calling thread until the next call
 * into the library. Objects are opaque handles released with their
 * *_destroy function; strings and buffers handed out by the library are
 * released with egf_free().
 */

#ifndef EGOFLOW_EGOFLOW_H
#define EGOFLOW_EGOFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EGOFLOW_BUILDING_LIBRARY)
#    define EGF_API __declspec(dllexport)
#  else
#    define EGF_API __declspec(dllimport)
#  endif
#else
#  define EGF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum egf_status {
  EGF_OK = 0,
  EGF_ERR_DOMAIN = 1,
  EGF_ERR_FORMAT = 2,
  EGF_ERR_RANGE = 3,
  EGF_ERR_IO = 4,
  EGF_ERR_NO_CONSENSUS = 5,
  EGF_ERR_DEGENERATE = 6,
  EGF_ERR_INVALID_ARGUMENT = 7,
  EGF_ERR_INTERNAL = 99
} egf_status;

EGF_API const char* egf_version(void);
EGF_API const char* egf_status_string(egf_status status);
/* Message of the last failure on this thread ("" when none). */
EGF_API const char* egf_last_error(void);
/* Byte offset attached to the last format error, or -1. */
EGF_API int64_t egf_last_error_offset(void);
EGF_API void egf_free(void* ptr);

/* ---- plain parameter blocks ------------------------------------------- */

typedef struct egf_camera {
  double focal_px;
  double cx;
  double cy;
  int32_t image_w;
  int32_t image_h;
} egf_camera;

typedef struct egf_match_params {
  int32_t macroblock_size;
  int32_t search_range;
  int32_t step;
  /* Textureless-block bound; a value <= 0 disables the rejection. */
  double flat_sad_threshold;
} egf_match_params;

typedef struct egf_ransac_params {
  int32_t iterations;
  double inlier_threshold;
  int32_t min_inliers;
  double confidence;
  uint64_t seed;
} egf_ransac_params;

typedef struct egf_pipeline_config {
  egf_camera cam;
  egf_match_params match;
  egf_ransac_params ransac;
  int32_t compensation_enabled;
  double max_range_age;
} egf_pipeline_config;

typedef struct egf_motion_vector {
  int32_t du;
  int32_t dv;
  uint32_t sad;
} egf_motion_vector;

typedef struct egf_velocity {
  double timestamp;
  double vx;
  double vy;
  double wz;
  double z_used;
  int32_t inlier_count;
  int32_t valid_count;
  int32_t valid;
  int32_t degraded;
} egf_velocity;

typedef struct egf_pose {
  double timestamp;
  double x;
  double y;
  double heading;
} egf_pose;

typedef struct egf_eval_report {
  double mean_err;
  double std_err;
  int32_t n_compared;
  int32_t n_valid;
  int32_t n_invalid;
  double alignment_rotation_rad;
  double final_position_error_m;
} egf_eval_report;

EGF_API void egf_camera_default(egf_camera* cam);
EGF_API void egf_match_params_default(egf_match_params* params);
EGF_API void egf_ransac_params_default(egf_ransac_params* params);
EGF_API void egf_pipeline_config_default(egf_pipeline_config* cfg);

/* ---- images ----------------------------------------------------------- */

typedef struct egf_image egf_image;

/* A NULL pixels pointer creates a zero-filled image. */
EGF_API egf_status egf_image_create(int32_t width, int32_t height,
                                    const uint8_t* pixels, egf_image** out);
EGF_API egf_status egf_image_read_pgm(const char* path, egf_image** out,
                                      double* timestamp, int32_t* has_timestamp);
EGF_API egf_status egf_image_write_pgm(const egf_image* image, const char* path);
EGF_API int32_t egf_image_width(const egf_image* image);
EGF_API int32_t egf_image_height(const egf_image* image);
EGF_API const uint8_t* egf_image_data(const egf_image* image);
EGF_API void egf_image_destroy(egf_image* image);

/* ---- motion-vector streams -------------------------------------------- */

typedef struct egf_flow_stream egf_flow_stream;

EGF_API egf_status egf_flow_stream_create(egf_flow_stream** out);
EGF_API void egf_flow_stream_destroy(egf_flow_stream* stream);
EGF_API size_t egf_flow_stream_size(const egf_flow_stream* stream);

/* Appends the block-matching flow from ref to tgt. Both append functions
 * return EGF_ERR_FORMAT when the timestamp does not increase. */
EGF_API egf_status egf_flow_stream_append_computed(
    egf_flow_stream* stream, const egf_image* ref, const egf_image* tgt,
    double timestamp, uint32_t frame_index, const egf_match_params* params);

/* Appends an all-zero field, used for the first frame of a sequence. */
EGF_API egf_status egf_flow_stream_append_zero(egf_flow_stream* stream,
                                               int32_t grid_w, int32_t grid_h,
                                               int32_t macroblock_size,
                                               double timestamp,
                                               uint32_t frame_index);

EGF_API egf_status egf_flow_stream_field_info(const egf_flow_stream* stream,
                                              size_t index,
                                              uint32_t* frame_index,
                                              double* timestamp,
                                              int32_t* grid_w, int32_t* grid_h,
                                              int32_t* macroblock_size);
EGF_API egf_status egf_flow_stream_vector(const egf_flow_stream* stream,
                                          size_t index, int32_t col,
                                          int32_t row, egf_motion_vector* out);

/* Serialized stream in *out (release with egf_free). */
EGF_API egf_status egf_flow_stream_encode(const egf_flow_stream* stream,
                                          uint8_t** out, size_t* size);
/* *truncated is set when the input ends inside a frame. */
EGF_API egf_status egf_flow_stream_decode(const uint8_t* bytes, size_t size,
                                          egf_flow_stream** out,
                                          int32_t* truncated);
EGF_API egf_status egf_flow_stream_load(const char* path, egf_flow_stream** out,
                                        int32_t* truncated);

/* ---- sensor logs ------------------------------------------------------ */

typedef struct egf_gyro_log egf_gyro_log;
typedef struct egf_range_log egf_range_log;

EGF_API egf_status egf_gyro_log_load(const char* csv_path, egf_gyro_log** out);
EGF_API size_t egf_gyro_log_size(const egf_gyro_log* log);
EGF_API void egf_gyro_log_destroy(egf_gyro_log* log);
EGF_API egf_status egf_range_log_load(const char* csv_path, egf_range_log** out);
EGF_API size_t egf_range_log_size(const egf_range_log* log);
EGF_API void egf_range_log_destroy(egf_range_log* log);

/* ---- estimation ------------------------------------------------------- */

typedef struct egf_track egf_track;

EGF_API egf_status egf_run_pipeline(const egf_flow_stream* stream,
                                    const egf_gyro_log* gyro,
                                    const egf_range_log* range,
                                    const egf_pipeline_config* cfg,
                                    egf_track** out);
EGF_API void egf_track_destroy(egf_track* track);
EGF_API size_t egf_track_velocity_count(const egf_track* track);
EGF_API size_t egf_track_pose_count(const egf_track* track);
EGF_API egf_status egf_track_velocity(const egf_track* track, size_t index,
                                      egf_velocity* out);
EGF_API egf_status egf_track_pose(const egf_track* track, size_t index,
                                  egf_pose* out);
/* CSV text in *out (release with egf_free). */
EGF_API egf_status egf_track_velocity_csv(const egf_track* track, char** out);
EGF_API egf_status egf_track_pose_csv(const egf_track* track, char** out);

/* ---- metric helpers --------------------------------------------------- */

EGF_API egf_status egf_velocity_envelope(double focal_px, double z, double fps,
                                         const egf_match_params* params,
                                         double* v_min, double* v_max);
EGF_API egf_status egf_geodetic_to_local(double lat_deg, double lon_deg,
                                         double origin_lat_deg,
                                         double origin_lon_deg, double* x_east,
                                         double* y_north);

/* ---- simulation ------------------------------------------------------- */

typedef struct egf_sim_config egf_sim_config;

EGF_API egf_status egf_sim_config_create(egf_sim_config** out);
EGF_API egf_status egf_sim_config_load(const char* path, egf_sim_config** out);
EGF_API egf_status egf_sim_config_parse(const char* text, egf_sim_config** out);
EGF_API egf_status egf_sim_config_set(egf_sim_config* cfg, const char* key,
                                      const char* value);
EGF_API egf_status egf_sim_config_camera(const egf_sim_config* cfg,
                                         egf_camera* out);
EGF_API double egf_sim_config_fps(const egf_sim_config* cfg);
EGF_API void egf_sim_config_destroy(egf_sim_config* cfg);

/* Writes frame_%06d.pgm, truth.csv, gyro.csv and range.csv into out_dir. */
EGF_API egf_status egf_simulate(const egf_sim_config* cfg, const char* out_dir);

/* ---- evaluation ------------------------------------------------------- */

/* pose_csv_path may be NULL; position metrics are then NaN. */
EGF_API egf_status egf_evaluate_files(const char* velocity_csv_path,
                                      const char* truth_csv_path,
                                      const char* pose_csv_path, int32_t align,
                                      egf_eval_report* out);
EGF_API egf_status egf_eval_report_text(const egf_eval_report* report,
                                        char** out);
EGF_API egf_status egf_eval_report_csv(const egf_eval_report* report,
                                       char** out);

#ifdef __cplusplus
}
#endif

#endif /* EGOFLOW_EGOFLOW_H */
