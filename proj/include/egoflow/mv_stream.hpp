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

// Binary container for motion-vector streams.
//
// Layout (little-endian, no padding):
//
//   "MVS1"
//   repeated frame:
//     u32 frame_index
//     f64 timestamp_seconds
//     u16 grid_w, u16 grid_h, u16 macroblock_size, u16 reserved (= 0)
//     grid_w * grid_h records of { i8 du, i8 dv, u16 sad }
//
// The record mirrors what a hardware coarse motion estimator emits per
// macroblock: two signed bytes of displacement followed by a 16-bit SAD.

#ifndef EGOFLOW_MV_STREAM_HPP
#define EGOFLOW_MV_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egoflow/types.hpp"

namespace egoflow {

inline constexpr char kMvStreamMagic[4] = {'M', 'V', 'S', '1'};
inline constexpr std::size_t kMvFrameHeaderSize = 20;
inline constexpr std::size_t kMvRecordSize = 4;

/// Serializes fields. Throws FormatError when grids differ or timestamps do
/// not strictly increase, RangeError when a vector does not fit its record.
std::vector<std::uint8_t> encode_mv_stream(std::span<const FlowField> fields);

struct MvDecodeResult {
  std::vector<FlowField> fields;
  // The input ended inside a frame; `fields` holds every complete frame.
  bool truncated = false;
  std::size_t bytes_consumed = 0;
};

/// Parses a stream produced by encode_mv_stream. Throws FormatError (with
/// byte offset) on a bad magic, a non-zero reserved field or inconsistent
/// frames. A short final frame is reported through `truncated`.
MvDecodeResult decode_mv_stream(std::span<const std::uint8_t> bytes);

void write_mv_stream_file(const std::string& path,
                          std::span<const FlowField> fields);
MvDecodeResult read_mv_stream_file(const std::string& path);

}  // namespace egoflow

#endif  // EGOFLOW_MV_STREAM_HPP
