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

// egoflow command-line tool. Talks to the library only through the C API.
//
//   simulate --config <file> --out-dir <dir>
//   flow     --frames <dir|glob> --out <file.mvs> [--mb-size 16] [--range 64]
//            [--step 2] [--fps <hz>]
//   estimate --mv <file.mvs> --gyro <csv> --range <csv> --focal-px <f> ...
//   eval     --est <csv> --truth <csv> --out <report> [--align]
//   envelope --focal-px <f> --z-min <m> --z-max <m> --steps <n> --fps <hz>
//   pipeline --config <file> --out-dir <dir>
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <glob.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egoflow/egoflow.h"

namespace fs = std::filesystem;

namespace {

/// Failure carrying the exit code and a one-line diagnostic.
struct CliFailure {
  int exit_code;
  std::string message;
};

void check(egf_status status, const std::string& context) {
  if (status == EGF_OK) return;
  std::string msg = context + ": " + egf_last_error();
  if (status == EGF_ERR_FORMAT && egf_last_error_offset() >= 0) {
    msg += " (byte offset " + std::to_string(egf_last_error_offset()) + ")";
  }
  throw CliFailure{1, msg};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};

using ImagePtr = std::unique_ptr<egf_image, Deleter<egf_image, egf_image_destroy>>;
using StreamPtr = std::unique_ptr<egf_flow_stream,
                                  Deleter<egf_flow_stream, egf_flow_stream_destroy>>;
using GyroPtr = std::unique_ptr<egf_gyro_log, Deleter<egf_gyro_log, egf_gyro_log_destroy>>;
using RangePtr = std::unique_ptr<egf_range_log,
                                 Deleter<egf_range_log, egf_range_log_destroy>>;
using TrackPtr = std::unique_ptr<egf_track, Deleter<egf_track, egf_track_destroy>>;
using SimPtr = std::unique_ptr<egf_sim_config,
                               Deleter<egf_sim_config, egf_sim_config_destroy>>;

struct CFree {
  void operator()(void* p) const { egf_free(p); }
};

void write_output(const std::string& path, const void* data, std::size_t size) {
  if (path == "-") {
    std::fwrite(data, 1, size, stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliFailure{1, "cannot open " + path + " for writing"};
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw CliFailure{1, "failed writing " + path};
}

void write_text(const std::string& path, const char* text) {
  write_output(path, text, std::char_traits<char>::length(text));
}

void require_readable(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw CliFailure{1, "cannot read " + path};
  }
}

std::vector<std::string> list_frames(const std::string& spec) {
  std::vector<std::string> files;
  std::error_code ec;
  if (fs::is_directory(spec, ec)) {
    for (const auto& entry : fs::directory_iterator(spec, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
        files.push_back(entry.path().string());
      }
    }
  } else {
    glob_t g{};
    if (::glob(spec.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- subcommands ---------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  std::vector<std::string> overrides;
};

SimPtr load_sim(const std::string& config,
                const std::vector<std::string>& overrides) {
  require_readable(config);
  egf_sim_config* raw = nullptr;
  check(egf_sim_config_load(config.c_str(), &raw), config);
  SimPtr cfg(raw);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CliFailure{2, "--set expects key=value, got '" + kv + "'"};
    }
    check(egf_sim_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                             kv.substr(eq + 1).c_str()),
          "--set " + kv);
  }
  return cfg;
}

void run_simulate(const SimulateArgs& a) {
  SimPtr cfg = load_sim(a.config, a.overrides);
  check(egf_simulate(cfg.get(), a.out_dir.c_str()), "simulate");
}

struct FlowArgs {
  std::string frames;
  std::string out;
  int mb_size = 16;
  int range = 64;
  int step = 2;
  std::optional<double> fps;
  double flat_threshold = 0.0;
};

void run_flow(const FlowArgs& a) {
  const std::vector<std::string> files = list_frames(a.frames);
  if (files.empty()) throw CliFailure{1, "no frames found in " + a.frames};

  egf_match_params params;
  egf_match_params_default(&params);
  params.macroblock_size = a.mb_size;
  params.search_range = a.range;
  params.step = a.step;
  params.flat_sad_threshold = a.flat_threshold;

  egf_flow_stream* raw_stream = nullptr;
  check(egf_flow_stream_create(&raw_stream), "flow");
  StreamPtr stream(raw_stream);

  ImagePtr prev;
  for (std::size_t k = 0; k < files.size(); ++k) {
    egf_image* raw = nullptr;
    double ts = 0.0;
    int32_t has_ts = 0;
    check(egf_image_read_pgm(files[k].c_str(), &raw, &ts, &has_ts), files[k]);
    ImagePtr img(raw);
    if (a.fps) {
      ts = static_cast<double>(k) / *a.fps;
    } else if (!has_ts) {
      throw CliFailure{1, files[k] + ": no timestamp comment; pass --fps"};
    }
    const auto index = static_cast<uint32_t>(k);
    if (k == 0) {
      if (a.mb_size <= 0) throw CliFailure{2, "--mb-size must be positive"};
      const int gw = egf_image_width(img.get()) / a.mb_size;
      const int gh = egf_image_height(img.get()) / a.mb_size;
      check(egf_flow_stream_append_zero(stream.get(), gw, gh, a.mb_size, ts,
                                        index),
            files[k]);
    } else {
      check(egf_flow_stream_append_computed(stream.get(), prev.get(),
                                            img.get(), ts, index, &params),
            files[k]);
    }
    prev = std::move(img);
  }

  uint8_t* bytes = nullptr;
  std::size_t size = 0;
  check(egf_flow_stream_encode(stream.get(), &bytes, &size), "encode");
  std::unique_ptr<uint8_t, CFree> owned(bytes);
  write_output(a.out, bytes, size);
}

struct EstimateArgs {
  std::string mv;
  std::string gyro;
  std::string range;
  double focal_px = 0.0;
  std::optional<double> cx;
  std::optional<double> cy;
  std::optional<int> image_w;
  std::optional<int> image_h;
  int ransac_iters = 210;
  double inlier_thresh = 3.0;
  int min_inliers = 6;
  uint64_t seed = 0;
  bool no_compensation = false;
  std::string out_vel;
  std::string out_pose;
};

void run_estimate(const EstimateArgs& a) {
  for (const auto* p : {&a.mv, &a.gyro, &a.range}) require_readable(*p);

  egf_flow_stream* raw_stream = nullptr;
  int32_t truncated = 0;
  check(egf_flow_stream_load(a.mv.c_str(), &raw_stream, &truncated), a.mv);
  StreamPtr stream(raw_stream);
  if (truncated) {
    std::cerr << "warning: " << a.mv << " ends inside a frame; using "
              << egf_flow_stream_size(stream.get()) << " complete frames\n";
  }
  if (egf_flow_stream_size(stream.get()) == 0) {
    throw CliFailure{1, a.mv + ": stream holds no frames"};
  }
  egf_gyro_log* raw_gyro = nullptr;
  check(egf_gyro_log_load(a.gyro.c_str(), &raw_gyro), a.gyro);
  GyroPtr gyro(raw_gyro);
  egf_range_log* raw_range = nullptr;
  check(egf_range_log_load(a.range.c_str(), &raw_range), a.range);
  RangePtr range(raw_range);

  int32_t gw = 0, gh = 0, mb = 0;
  check(egf_flow_stream_field_info(stream.get(), 0, nullptr, nullptr, &gw, &gh,
                                   &mb),
        a.mv);

  egf_pipeline_config cfg;
  egf_pipeline_config_default(&cfg);
  cfg.cam.focal_px = a.focal_px;
  cfg.cam.image_w = a.image_w.value_or(gw * mb);
  cfg.cam.image_h = a.image_h.value_or(gh * mb);
  cfg.cam.cx = a.cx.value_or((cfg.cam.image_w - 1) / 2.0);
  cfg.cam.cy = a.cy.value_or((cfg.cam.image_h - 1) / 2.0);
  cfg.match.macroblock_size = mb;
  cfg.ransac.iterations = a.ransac_iters;
  cfg.ransac.inlier_threshold = a.inlier_thresh;
  cfg.ransac.min_inliers = a.min_inliers;
  cfg.ransac.seed = a.seed;
  cfg.compensation_enabled = a.no_compensation ? 0 : 1;

  egf_track* raw_track = nullptr;
  check(egf_run_pipeline(stream.get(), gyro.get(), range.get(), &cfg,
                         &raw_track),
        "estimate");
  TrackPtr track(raw_track);

  char* vel = nullptr;
  check(egf_track_velocity_csv(track.get(), &vel), "estimate");
  std::unique_ptr<char, CFree> vel_owned(vel);
  char* pose = nullptr;
  check(egf_track_pose_csv(track.get(), &pose), "estimate");
  std::unique_ptr<char, CFree> pose_owned(pose);
  if (a.out_vel == "-" && a.out_pose == "-") {
    throw CliFailure{2, "--out-vel and --out-pose cannot both be stdout"};
  }
  write_text(a.out_vel, vel);
  write_text(a.out_pose, pose);
}

struct EvalArgs {
  std::string est;
  std::string truth;
  std::string out;
  std::string pose;
  bool align = false;
};

std::string csv_twin_path(const std::string& out) {
  fs::path p(out);
  if (p.extension() == ".csv") p.replace_extension(".report.csv");
  else p.replace_extension(".csv");
  return p.string();
}

egf_eval_report run_eval(const EvalArgs& a) {
  require_readable(a.est);
  require_readable(a.truth);
  if (!a.pose.empty()) require_readable(a.pose);
  egf_eval_report report{};
  check(egf_evaluate_files(a.est.c_str(), a.truth.c_str(),
                           a.pose.empty() ? nullptr : a.pose.c_str(),
                           a.align ? 1 : 0, &report),
        "eval");
  char* text = nullptr;
  check(egf_eval_report_text(&report, &text), "eval");
  std::unique_ptr<char, CFree> text_owned(text);
  char* csv = nullptr;
  check(egf_eval_report_csv(&report, &csv), "eval");
  std::unique_ptr<char, CFree> csv_owned(csv);
  write_text(a.out, text);
  if (a.out != "-") write_text(csv_twin_path(a.out), csv);
  return report;
}

struct EnvelopeArgs {
  double focal_px = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  int steps = 0;
  double fps = 0.0;
  int range = 64;
  int step = 2;
  std::string out = "-";
};

void run_envelope(const EnvelopeArgs& a) {
  if (a.steps < 1) throw CliFailure{2, "--steps must be >= 1"};
  if (!(a.z_max >= a.z_min)) throw CliFailure{2, "--z-max must be >= --z-min"};
  egf_match_params params;
  egf_match_params_default(&params);
  params.search_range = a.range;
  params.step = a.step;
  std::string csv = "z,v_min,v_max\n";
  for (int i = 0; i < a.steps; ++i) {
    const double z = a.steps == 1
                         ? a.z_min
                         : a.z_min + (a.z_max - a.z_min) * i / (a.steps - 1);
    double v_min = 0.0, v_max = 0.0;
    check(egf_velocity_envelope(a.focal_px, z, a.fps, &params, &v_min, &v_max),
          "envelope");
    char line[96];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", z, v_min, v_max);
    csv += line;
  }
  write_text(a.out, csv.c_str());
}

struct PipelineArgs {
  std::string config;
  std::string out_dir;
  std::vector<std::string> overrides;
  int ransac_iters = 210;
  double inlier_thresh = 3.0;
  int min_inliers = 6;
  uint64_t seed = 0;
  bool no_compensation = false;
  bool align = true;
  int mb_size = 16;
  int range = 64;
  int step = 2;
};

void run_pipeline_cmd(const PipelineArgs& a) {
  SimPtr cfg = load_sim(a.config, a.overrides);
  check(egf_simulate(cfg.get(), a.out_dir.c_str()), "simulate");
  egf_camera cam;
  check(egf_sim_config_camera(cfg.get(), &cam), "simulate");

  const fs::path dir(a.out_dir);
  FlowArgs flow;
  flow.frames = a.out_dir;
  flow.out = (dir / "flow.mvs").string();
  flow.mb_size = a.mb_size;
  flow.range = a.range;
  flow.step = a.step;
  run_flow(flow);

  EstimateArgs est;
  est.mv = flow.out;
  est.gyro = (dir / "gyro.csv").string();
  est.range = (dir / "range.csv").string();
  est.focal_px = cam.focal_px;
  est.cx = cam.cx;
  est.cy = cam.cy;
  est.image_w = cam.image_w;
  est.image_h = cam.image_h;
  est.ransac_iters = a.ransac_iters;
  est.inlier_thresh = a.inlier_thresh;
  est.min_inliers = a.min_inliers;
  est.seed = a.seed;
  est.no_compensation = a.no_compensation;
  est.out_vel = (dir / "velocity.csv").string();
  est.out_pose = (dir / "pose.csv").string();
  run_estimate(est);

  EvalArgs ev;
  ev.est = est.out_vel;
  ev.truth = (dir / "truth.csv").string();
  ev.pose = est.out_pose;
  ev.out = (dir / "report.txt").string();
  ev.align = a.align;
  run_eval(ev);

  char* text = nullptr;
  egf_eval_report report{};
  check(egf_evaluate_files(ev.est.c_str(), ev.truth.c_str(), ev.pose.c_str(),
                           ev.align ? 1 : 0, &report),
        "eval");
  check(egf_eval_report_text(&report, &text), "eval");
  std::unique_ptr<char, CFree> owned(text);
  std::fputs(text, stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-facing camera ego-motion toolkit", "egoflow"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic sequence");
  simulate->add_option("--config", sim.config, "key=value config file")->required();
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  simulate->add_option("--set", sim.overrides, "Override a config key (key=value)");

  FlowArgs flow;
  auto* flow_cmd = app.add_subcommand("flow", "Block-matching flow over PGM frames");
  flow_cmd->add_option("--frames", flow.frames, "Frame directory or glob")->required();
  flow_cmd->add_option("--out", flow.out, "Output .mvs file or -")->required();
  flow_cmd->add_option("--mb-size", flow.mb_size, "Macroblock size");
  flow_cmd->add_option("--range", flow.range, "Search range in pixels");
  flow_cmd->add_option("--step", flow.step, "Search step in pixels");
  flow_cmd->add_option("--fps", flow.fps, "Frame rate (otherwise PGM timestamps)");
  flow_cmd->add_option("--flat-threshold", flow.flat_threshold,
                       "Reject textureless blocks below this deviation sum");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Velocity and pose from a stream");
  estimate->add_option("--mv", est.mv, "Motion-vector stream")->required();
  estimate->add_option("--gyro", est.gyro, "Gyro CSV")->required();
  estimate->add_option("--range", est.range, "Range CSV")->required();
  estimate->add_option("--focal-px", est.focal_px, "Focal length in pixels")->required();
  estimate->add_option("--cx", est.cx, "Principal point x");
  estimate->add_option("--cy", est.cy, "Principal point y");
  estimate->add_option("--image-w", est.image_w, "Image width");
  estimate->add_option("--image-h", est.image_h, "Image height");
  estimate->add_option("--ransac-iters", est.ransac_iters, "RANSAC iterations");
  estimate->add_option("--inlier-thresh", est.inlier_thresh, "Inlier threshold (px)");
  estimate->add_option("--min-inliers", est.min_inliers, "Consensus floor");
  estimate->add_option("--seed", est.seed, "RANSAC seed");
  estimate->add_flag("--no-compensation", est.no_compensation,
                     "Skip gyro rotation compensation");
  estimate->add_option("--out-vel", est.out_vel, "Velocity CSV or -")->required();
  estimate->add_option("--out-pose", est.out_pose, "Pose CSV or -")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Compare estimates with ground truth");
  eval->add_option("--est", ev.est, "Velocity CSV")->required();
  eval->add_option("--truth", ev.truth, "Truth CSV")->required();
  eval->add_option("--out", ev.out, "Report file or -")->required();
  eval->add_option("--pose", ev.pose, "Pose CSV for position metrics");
  eval->add_flag("--align", ev.align, "Rotate the trajectory for best fit");

  EnvelopeArgs env;
  auto* envelope = app.add_subcommand("envelope", "Detectable velocity limits");
  envelope->add_option("--focal-px", env.focal_px, "Focal length in pixels")->required();
  envelope->add_option("--z-min", env.z_min, "Smallest ground distance")->required();
  envelope->add_option("--z-max", env.z_max, "Largest ground distance")->required();
  envelope->add_option("--steps", env.steps, "Number of rows")->required();
  envelope->add_option("--fps", env.fps, "Frame rate")->required();
  envelope->add_option("--range", env.range, "Search range in pixels");
  envelope->add_option("--step", env.step, "Search step in pixels");
  envelope->add_option("--out", env.out, "Output CSV or - (default)");

  PipelineArgs pipe;
  auto* pipeline = app.add_subcommand("pipeline", "simulate + flow + estimate + eval");
  pipeline->add_option("--config", pipe.config, "key=value config file")->required();
  pipeline->add_option("--out-dir", pipe.out_dir, "Output directory")->required();
  pipeline->add_option("--set", pipe.overrides, "Override a config key (key=value)");
  pipeline->add_option("--ransac-iters", pipe.ransac_iters, "RANSAC iterations");
  pipeline->add_option("--inlier-thresh", pipe.inlier_thresh, "Inlier threshold (px)");
  pipeline->add_option("--min-inliers", pipe.min_inliers, "Consensus floor");
  pipeline->add_option("--seed", pipe.seed, "RANSAC seed");
  pipeline->add_option("--mb-size", pipe.mb_size, "Macroblock size");
  pipeline->add_option("--range", pipe.range, "Search range in pixels");
  pipeline->add_option("--step", pipe.step, "Search step in pixels");
  pipeline->add_flag("--no-compensation", pipe.no_compensation,
                     "Skip gyro rotation compensation");
  pipeline->add_flag("--no-align", [&](std::int64_t) { pipe.align = false; },
                     "Only translate to a common origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "egoflow: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*simulate) run_simulate(sim);
    else if (*flow_cmd) run_flow(flow);
    else if (*estimate) run_estimate(est);
    else if (*eval) run_eval(ev);
    else if (*envelope) run_envelope(env);
    else if (*pipeline) run_pipeline_cmd(pipe);
  } catch (const CliFailure& f) {
    std::cerr << "egoflow: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "egoflow: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
