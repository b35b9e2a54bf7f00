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

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "egoflow/error.hpp"
#include "egoflow/image.hpp"
#include "egoflow/mv_stream.hpp"
#include "egoflow/types.hpp"

namespace {

using egoflow::FlowField;
using egoflow::MotionVector;

FlowField make_field(std::uint32_t index, double ts, int gw, int gh) {
  FlowField f;
  f.frame_index = index;
  f.timestamp = ts;
  f.grid_w = gw;
  f.grid_h = gh;
  f.vectors.assign(static_cast<std::size_t>(gw) * gh, MotionVector{});
  return f;
}

std::vector<FlowField> random_stream(std::mt19937_64& rng, int frames, int gw,
                                     int gh) {
  std::uniform_int_distribution<int> d(-128, 127);
  std::uniform_int_distribution<std::uint32_t> s(0, 65535);
  std::uniform_real_distribution<double> dt(1e-4, 0.2);
  std::vector<FlowField> out;
  double t = dt(rng);
  for (int k = 0; k < frames; ++k) {
    FlowField f = make_field(static_cast<std::uint32_t>(rng()), t, gw, gh);
    for (auto& mv : f.vectors) mv = MotionVector{d(rng), d(rng), s(rng)};
    out.push_back(std::move(f));
    t += dt(rng);
  }
  return out;
}

TEST(MvStream, EmptySequenceIsMagicOnly) {
  const auto bytes = egoflow::encode_mv_stream({});
  ASSERT_EQ(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "MVS1");
  const auto dec = egoflow::decode_mv_stream(bytes);
  EXPECT_TRUE(dec.fields.empty());
  EXPECT_FALSE(dec.truncated);
}

TEST(MvStream, SingleRecordLayout) {
  FlowField f = make_field(7, 0.5, 1, 1);
  f.vectors[0] = MotionVector{6, -4, 1234};
  const std::vector<FlowField> in{f};
  const auto bytes = egoflow::encode_mv_stream(in);
  ASSERT_EQ(bytes.size(), 4u + 20u + 4u);
  const std::vector<std::uint8_t> record(bytes.end() - 4, bytes.end());
  EXPECT_EQ(record, (std::vector<std::uint8_t>{0x06, 0xFC, 0xD2, 0x04}));

  // Header: u32 index, f64 time, u16 w, u16 h, u16 mb, u16 reserved.
  const std::vector<std::uint8_t> header(bytes.begin() + 4, bytes.begin() + 24);
  const std::vector<std::uint8_t> expected{
      0x07, 0x00, 0x00, 0x00,                          // frame_index
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xE0, 0x3F,  // 0.5
      0x01, 0x00, 0x01, 0x00, 0x10, 0x00, 0x00, 0x00};
  EXPECT_EQ(header, expected);

  const auto dec = egoflow::decode_mv_stream(bytes);
  ASSERT_EQ(dec.fields.size(), 1u);
  EXPECT_EQ(dec.fields[0], f);
}

TEST(MvStream, RandomRoundTripIsByteExact) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_stream(rng, 1 + trial % 4, 30, 30);
    const auto bytes = egoflow::encode_mv_stream(in);
    EXPECT_EQ(bytes.size(), 4u + in.size() * (20u + 4u * 900u));
    const auto dec = egoflow::decode_mv_stream(bytes);
    ASSERT_FALSE(dec.truncated);
    EXPECT_EQ(dec.fields, in);
    EXPECT_EQ(egoflow::encode_mv_stream(dec.fields), bytes);
  }
}

TEST(MvStream, TruncatedStreamKeepsCompleteFrames) {
  std::mt19937_64 rng(3);
  const auto in = random_stream(rng, 3, 4, 3);
  const auto bytes = egoflow::encode_mv_stream(in);
  const std::size_t frame = 20 + 4 * 12;
  for (std::size_t cut : {4 + frame + 1, 4 + frame + 19, 4 + 2 * frame + 30,
                          bytes.size() - 1}) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + cut);
    const auto dec = egoflow::decode_mv_stream(part);
    EXPECT_TRUE(dec.truncated) << cut;
    const std::size_t complete = (cut - 4) / frame;
    ASSERT_EQ(dec.fields.size(), complete);
    for (std::size_t i = 0; i < complete; ++i) EXPECT_EQ(dec.fields[i], in[i]);
    EXPECT_EQ(dec.bytes_consumed, 4 + complete * frame);
  }
}

TEST(MvStream, BadMagicIsFormatError) {
  const std::vector<std::uint8_t> bytes{'X', 'X', 'X', 'X'};
  try {
    egoflow::decode_mv_stream(bytes);
    FAIL() << "expected FormatError";
  } catch (const egoflow::FormatError& e) {
    EXPECT_EQ(e.offset(), 0);
  }
  EXPECT_THROW(egoflow::decode_mv_stream(std::vector<std::uint8_t>{'M', 'V'}),
               egoflow::FormatError);
}

TEST(MvStream, EncodeRejectsMixedGrids) {
  std::vector<FlowField> in{make_field(0, 0.0, 2, 2), make_field(1, 1.0, 3, 2)};
  EXPECT_THROW(egoflow::encode_mv_stream(in), egoflow::FormatError);
  in[1] = make_field(1, 1.0, 2, 2);
  in[1].macroblock_size = 8;
  EXPECT_THROW(egoflow::encode_mv_stream(in), egoflow::FormatError);
}

TEST(MvStream, EncodeRejectsNonIncreasingTime) {
  std::vector<FlowField> in{make_field(0, 1.0, 2, 2), make_field(1, 1.0, 2, 2)};
  EXPECT_THROW(egoflow::encode_mv_stream(in), egoflow::FormatError);
}

TEST(MvStream, EncodeRejectsUnrepresentableValues) {
  for (MotionVector mv : {MotionVector{128, 0, 0}, MotionVector{0, -129, 0},
                          MotionVector{0, 0, 65536}}) {
    FlowField f = make_field(0, 0.0, 1, 1);
    f.vectors[0] = mv;
    const std::vector<FlowField> in{f};
    EXPECT_THROW(egoflow::encode_mv_stream(in), egoflow::RangeError);
  }
}

TEST(MvStream, DecodeRejectsInconsistentFrames) {
  std::vector<FlowField> in{make_field(0, 0.0, 2, 2), make_field(1, 1.0, 2, 2)};
  auto bytes = egoflow::encode_mv_stream(in);
  auto reserved = bytes;
  reserved[4 + 18] = 1;
  EXPECT_THROW(egoflow::decode_mv_stream(reserved), egoflow::FormatError);
  auto grid = bytes;
  grid[4 + 20 + 16 + 12] = 3;  // second frame grid_w
  EXPECT_THROW(egoflow::decode_mv_stream(grid), egoflow::FormatError);
}

TEST(MvStream, FileRoundTrip) {
  std::mt19937_64 rng(9);
  const auto in = random_stream(rng, 2, 5, 5);
  const auto path =
      (std::filesystem::temp_directory_path() / "egoflow_mv_roundtrip.mvs")
          .string();
  egoflow::write_mv_stream_file(path, in);
  EXPECT_EQ(egoflow::read_mv_stream_file(path).fields, in);
  std::filesystem::remove(path);
  EXPECT_THROW(egoflow::read_mv_stream_file(path), egoflow::IoError);
}

TEST(Types, NormalizeAngleRange) {
  constexpr double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(egoflow::normalize_angle(pi), pi);
  EXPECT_DOUBLE_EQ(egoflow::normalize_angle(-pi), pi);
  EXPECT_NEAR(egoflow::normalize_angle(3 * pi / 2), -pi / 2, 1e-12);
  EXPECT_NEAR(egoflow::normalize_angle(0.25 + 8 * pi), 0.25, 1e-12);
}

TEST(Pgm, RoundTripWithTimestamp) {
  std::mt19937_64 rng(1);
  egoflow::GrayImage img(7, 5);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng());
  const auto bytes = egoflow::encode_pgm(img, 0.1);
  std::optional<double> ts;
  const auto back = egoflow::decode_pgm(bytes, &ts);
  EXPECT_EQ(back, img);
  ASSERT_TRUE(ts.has_value());
  EXPECT_EQ(*ts, 0.1);

  std::optional<double> none;
  egoflow::decode_pgm(egoflow::encode_pgm(img), &none);
  EXPECT_FALSE(none.has_value());
}

TEST(Pgm, RejectsMalformedInput) {
  const std::string p2 = "P2\n1 1\n255\n0\n";
  EXPECT_THROW(egoflow::decode_pgm(std::vector<std::uint8_t>(p2.begin(), p2.end())),
               egoflow::FormatError);
  const std::string short_data = "P5\n2 2\n255\n\x01";
  EXPECT_THROW(egoflow::decode_pgm(std::vector<std::uint8_t>(short_data.begin(),
                                                             short_data.end())),
               egoflow::FormatError);
  const std::string maxval = "P5\n1 1\n65535\n\x01\x02";
  EXPECT_THROW(egoflow::decode_pgm(std::vector<std::uint8_t>(maxval.begin(),
                                                             maxval.end())),
               egoflow::FormatError);
}

}  // namespace
