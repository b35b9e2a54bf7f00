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

#include "egoflow/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>
#include <vector>

#include "egoflow/error.hpp"

namespace egoflow {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void put(std::string& out, int v) { out += std::to_string(v); }

template <typename T, typename... Rest>
void row(std::string& out, T first, Rest... rest) {
  put(out, first);
  ((out += ',', put(out, rest)), ...);
  out += '\n';
}

// Splits CSV text into numeric rows after checking the header.
class CsvTable {
 public:
  CsvTable(const std::string& text, const std::string& header) {
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::size_t offset = pos;
      pos = end + 1;
      if (first) {
        if (line != header) {
          throw FormatError("expected CSV header '" + header + "'", 0);
        }
        first = false;
        continue;
      }
      if (line.empty()) continue;
      rows_.push_back(parse_row(line, offset, count_columns(header)));
    }
    if (first) throw FormatError("missing CSV header '" + header + "'", 0);
  }

  const std::vector<std::vector<double>>& rows() const& { return rows_; }
  std::vector<std::vector<double>> rows() && { return std::move(rows_); }

 private:
  static std::size_t count_columns(const std::string& header) {
    std::size_t n = 1;
    for (char c : header) n += (c == ',');
    return n;
  }

  static std::vector<double> parse_row(const std::string& line,
                                       std::size_t offset,
                                       std::size_t columns) {
    std::vector<double> values;
    values.reserve(columns);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw FormatError("malformed number in CSV row",
                          static_cast<std::int64_t>(offset + (p - line.data())));
      }
      values.push_back(v);
      p = ptr;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') {
        throw FormatError("unexpected character in CSV row",
                          static_cast<std::int64_t>(offset + (p - line.data())));
      }
      ++p;
    }
    if (values.size() != columns) {
      throw FormatError("CSV row has " + std::to_string(values.size()) +
                            " columns, expected " + std::to_string(columns),
                        static_cast<std::int64_t>(offset));
    }
    return values;
  }

  std::vector<std::vector<double>> rows_;
};

constexpr const char* kGyroHeader = "timestamp,wx,wy,wz";
constexpr const char* kRangeHeader = "timestamp,z";
constexpr const char* kVelocityHeader =
    "timestamp,vx,vy,wz,z_used,inlier_count,valid_count";
constexpr const char* kPoseHeader = "timestamp,x,y,heading";
constexpr const char* kTruthHeader =
    "timestamp,x,y,heading,vx,vy,wz,z,corner_flag";

}  // namespace

std::string format_gyro_csv(std::span<const GyroSample> samples) {
  std::string out = std::string(kGyroHeader) + "\n";
  for (const auto& s : samples) row(out, s.timestamp, s.wx, s.wy, s.wz);
  return out;
}

std::string format_range_csv(std::span<const RangeSample> samples) {
  std::string out = std::string(kRangeHeader) + "\n";
  for (const auto& s : samples) row(out, s.timestamp, s.z);
  return out;
}

std::string format_velocity_csv(std::span<const VelocityEstimate> series) {
  std::string out = std::string(kVelocityHeader) + "\n";
  for (const auto& v : series) {
    row(out, v.timestamp, v.vx, v.vy, v.wz, v.valid ? v.z_used : 0.0,
        v.inlier_count, v.valid_count);
  }
  return out;
}

std::string format_pose_csv(std::span<const StampedPose> series) {
  std::string out = std::string(kPoseHeader) + "\n";
  for (const auto& p : series) {
    row(out, p.timestamp, p.pose.x, p.pose.y, p.pose.heading);
  }
  return out;
}

std::string format_truth_csv(std::span<const GroundTruthSample> series) {
  std::string out = std::string(kTruthHeader) + "\n";
  for (const auto& g : series) {
    row(out, g.timestamp, g.pose.x, g.pose.y, g.pose.heading, g.vx, g.vy, g.wz,
        g.z, g.corner_flag ? 1 : 0);
  }
  return out;
}

std::vector<GyroSample> parse_gyro_csv(const std::string& text) {
  std::vector<GyroSample> out;
  for (const auto& r : CsvTable(text, kGyroHeader).rows()) {
    out.push_back({r[0], r[1], r[2], r[3]});
  }
  return out;
}

std::vector<RangeSample> parse_range_csv(const std::string& text) {
  std::vector<RangeSample> out;
  for (const auto& r : CsvTable(text, kRangeHeader).rows()) {
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::vector<VelocityEstimate> parse_velocity_csv(const std::string& text) {
  std::vector<VelocityEstimate> out;
  for (const auto& r : CsvTable(text, kVelocityHeader).rows()) {
    VelocityEstimate v;
    v.timestamp = r[0];
    v.vx = r[1];
    v.vy = r[2];
    v.wz = r[3];
    v.z_used = r[4];
    v.inlier_count = static_cast<int>(r[5]);
    v.valid_count = static_cast<int>(r[6]);
    v.valid = r[4] > 0.0;
    out.push_back(v);
  }
  return out;
}

std::vector<StampedPose> parse_pose_csv(const std::string& text) {
  std::vector<StampedPose> out;
  for (const auto& r : CsvTable(text, kPoseHeader).rows()) {
    out.push_back({r[0], Pose2D{r[1], r[2], r[3]}});
  }
  return out;
}

std::vector<GroundTruthSample> parse_truth_csv(const std::string& text) {
  std::vector<GroundTruthSample> out;
  for (const auto& r : CsvTable(text, kTruthHeader).rows()) {
    GroundTruthSample g;
    g.timestamp = r[0];
    g.pose = Pose2D{r[1], r[2], r[3]};
    g.vx = r[4];
    g.vy = r[5];
    g.wz = r[6];
    g.z = r[7];
    g.corner_flag = r[8] != 0.0;
    out.push_back(g);
  }
  return out;
}

}  // namespace egoflow
