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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "egoflow/metric_scale.hpp"

#ifndef EGOFLOW_CLI_PATH
#error "EGOFLOW_CLI_PATH must name the egoflow executable"
#endif

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("egoflow_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + EGOFLOW_CLI_PATH + "\" " + args +
                            " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  fs::path dir_;
};

TEST_F(Cli, EnvelopeRows) {
  const CliRun r = run("envelope --focal-px 640 --z-min 0.5 --z-max 5 --steps 10 --fps 30");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "z,v_min,v_max");
  int rows = 0;
  egoflow::CameraIntrinsics cam;
  while (std::getline(in, line)) {
    double z, lo, hi;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &z, &lo, &hi), 3);
    const auto e = egoflow::velocity_envelope(cam, z, 30.0, egoflow::MatchParams{});
    EXPECT_EQ(lo, e.v_min);
    EXPECT_EQ(hi, e.v_max);
    EXPECT_NEAR(z, 0.5 + 0.5 * rows, 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 10);
}

TEST_F(Cli, EmptyFrameDirectory) {
  fs::create_directories(dir_ / "empty");
  const CliRun r = run("flow --frames " + path("empty") + " --out " + path("x.mvs"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no frames found"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.mvs")));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("teleport").code, 2);
  const CliRun r = run("envelope --focal-px 640 --z-min 1 --z-max 2 --steps 2 --fps 30 --warp 9");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(run("envelope --focal-px 640 --z-min 1").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, MissingAndMalformedInputs) {
  write("gyro.csv", "timestamp,wx,wy,wz\n0,0,0,0\n");
  write("range.csv", "timestamp,z\n0,1\n");
  CliRun r = run("estimate --mv " + path("none.mvs") + " --gyro " + path("gyro.csv") +
              " --range " + path("range.csv") + " --focal-px 640 --out-vel " +
              path("v.csv") + " --out-pose " + path("p.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());

  write("bad.mvs", "MVSX");
  r = run("estimate --mv " + path("bad.mvs") + " --gyro " + path("gyro.csv") +
          " --range " + path("range.csv") + " --focal-px 640 --out-vel " +
          path("v.csv") + " --out-pose " + path("p.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("byte offset 0"), std::string::npos) << r.err;

  write("est.csv", "timestamp,vx,vy,wz,z_used,inlier_count,valid_count\n0.1,x,0,0,1,1,1\n");
  write("truth.csv", "timestamp,x,y,heading,vx,vy,wz,z,corner_flag\n0,0,0,0,0,0,0,1,0\n");
  r = run("eval --est " + path("est.csv") + " --truth " + path("truth.csv") +
          " --out " + path("report.txt"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("byte offset 55"), std::string::npos) << r.err;

  write("sim.cfg", "wings = 2\n");
  r = run("simulate --config " + path("sim.cfg") + " --out-dir " + path("out"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("wings"), std::string::npos);
}

TEST_F(Cli, EndToEndStagesAndIdempotence) {
  write("sim.cfg",
        "trajectory = line\nvelocity_x = 0.28125\nvelocity_y = 0\nduration = 0.5\n"
        "image_w = 160\nimage_h = 160\n");
  ASSERT_EQ(run("simulate --config " + path("sim.cfg") + " --out-dir " + path("out")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "frame_000014.pgm"));

  const std::string flow = "flow --frames " + path("out") + " --out " + path("f.mvs");
  CliRun r = run(flow);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string first = slurp(path("f.mvs"));
  EXPECT_EQ(first.size(), 4u + 15 * (20 + 4 * 100));
  ASSERT_EQ(run(flow).code, 0);
  EXPECT_EQ(slurp(path("f.mvs")), first);

  // Globbed input with --fps and data on stdout.
  r = run("flow --frames '" + path("out") + "/frame_*.pgm' --out - --fps 30");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  EXPECT_EQ(r.out.size(), first.size());

  const std::string est = "estimate --mv " + path("f.mvs") + " --gyro " + path("out/gyro.csv") +
                          " --range " + path("out/range.csv") +
                          " --focal-px 640 --out-vel " + path("v.csv") +
                          " --out-pose " + path("p.csv");
  r = run(est);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string vel = slurp(path("v.csv"));
  ASSERT_EQ(run(est).code, 0);
  EXPECT_EQ(slurp(path("v.csv")), vel);
  // 0.28125 m/s at z = 1 m and 30 fps is 6 px per frame, on the matcher grid.
  EXPECT_NE(vel.find(",0.28125,"), std::string::npos);

  r = run("eval --est " + path("v.csv") + " --truth " + path("out/truth.csv") +
          " --out " + path("report.txt") + " --align");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = slurp(path("report.txt"));
  EXPECT_NE(report.find("velocity error mean"), std::string::npos);
  EXPECT_NE(report.find("velocity error std"), std::string::npos);
  const std::string csv = slurp(path("report.csv"));
  EXPECT_EQ(csv.rfind("metric,value\nmean_err,", 0), 0u);
}

TEST_F(Cli, PipelineSubcommand) {
  write("sim.cfg",
        "trajectory = line\nvelocity_x = 0.1\nduration = 0.3\nimage_w = 128\n"
        "image_h = 128\n");
  const CliRun r = run("pipeline --config " + path("sim.cfg") + " --out-dir " + path("run") +
                    " --set velocity_y=0.05");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("final position error"), std::string::npos);
  for (const char* f : {"flow.mvs", "velocity.csv", "pose.csv", "report.txt", "report.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  EXPECT_EQ(run("pipeline --config " + path("sim.cfg") + " --out-dir " + path("run") +
                " --set velocity_y")
                .code,
            2);
}

}  // namespace
