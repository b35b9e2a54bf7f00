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

#include "egoflow/mv_stream.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "egoflow/error.hpp"

namespace egoflow {
namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, std::size_t pos)
      : in_(in), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

void check_u16(int v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint16_t>::max()) {
    throw RangeError(std::string(what) + " does not fit in 16 bits: " +
                     std::to_string(v));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_mv_stream(std::span<const FlowField> fields) {
  std::vector<std::uint8_t> out(std::begin(kMvStreamMagic),
                                std::end(kMvStreamMagic));
  if (fields.empty()) return out;

  const FlowField& first = fields.front();
  std::size_t total = out.size();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const FlowField& f = fields[i];
    if (f.grid_w != first.grid_w || f.grid_h != first.grid_h ||
        f.macroblock_size != first.macroblock_size) {
      throw FormatError("frame " + std::to_string(i) +
                        " has grid dimensions different from frame 0");
    }
    if (f.vectors.size() != static_cast<std::size_t>(f.grid_w) * f.grid_h) {
      throw FormatError("frame " + std::to_string(i) +
                        " vector count does not match its grid");
    }
    if (i > 0 && !(f.timestamp > fields[i - 1].timestamp)) {
      throw FormatError("frame " + std::to_string(i) +
                        " timestamp does not increase");
    }
    total += kMvFrameHeaderSize + kMvRecordSize * f.vectors.size();
  }
  check_u16(first.grid_w, "grid_w");
  check_u16(first.grid_h, "grid_h");
  check_u16(first.macroblock_size, "macroblock_size");

  out.reserve(total);
  Writer w(out);
  for (const FlowField& f : fields) {
    w.u32(f.frame_index);
    w.f64(f.timestamp);
    w.u16(static_cast<std::uint16_t>(f.grid_w));
    w.u16(static_cast<std::uint16_t>(f.grid_h));
    w.u16(static_cast<std::uint16_t>(f.macroblock_size));
    w.u16(0);
    for (const MotionVector& mv : f.vectors) {
      if (mv.du < -128 || mv.du > 127 || mv.dv < -128 || mv.dv > 127) {
        throw RangeError("motion vector (" + std::to_string(mv.du) + ", " +
                         std::to_string(mv.dv) + ") exceeds 8-bit range");
      }
      if (mv.sad > 0xFFFF) {
        throw RangeError("SAD " + std::to_string(mv.sad) +
                         " exceeds 16-bit range");
      }
      w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(mv.du)));
      w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(mv.dv)));
      w.u16(static_cast<std::uint16_t>(mv.sad));
    }
  }
  return out;
}

MvDecodeResult decode_mv_stream(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMvStreamMagic) ||
      std::memcmp(bytes.data(), kMvStreamMagic, sizeof(kMvStreamMagic)) != 0) {
    throw FormatError("bad magic, expected \"MVS1\"", 0);
  }
  MvDecodeResult result;
  Reader r(bytes, sizeof(kMvStreamMagic));
  while (r.remaining() > 0) {
    const std::size_t frame_start = r.pos();
    if (r.remaining() < kMvFrameHeaderSize) {
      result.truncated = true;
      break;
    }
    FlowField f;
    f.frame_index = r.u32();
    f.timestamp = r.f64();
    f.grid_w = r.u16();
    f.grid_h = r.u16();
    f.macroblock_size = r.u16();
    const std::uint16_t reserved = r.u16();
    if (reserved != 0) {
      throw FormatError("non-zero reserved field",
                        static_cast<std::int64_t>(frame_start + 18));
    }
    if (!result.fields.empty()) {
      const FlowField& first = result.fields.front();
      if (f.grid_w != first.grid_w || f.grid_h != first.grid_h ||
          f.macroblock_size != first.macroblock_size) {
        throw FormatError("frame grid differs from the first frame",
                          static_cast<std::int64_t>(frame_start));
      }
      if (!(f.timestamp > result.fields.back().timestamp)) {
        throw FormatError("timestamp does not increase",
                          static_cast<std::int64_t>(frame_start + 4));
      }
    }
    const std::size_t n = static_cast<std::size_t>(f.grid_w) * f.grid_h;
    if (r.remaining() < n * kMvRecordSize) {
      result.truncated = true;
      break;
    }
    f.vectors.resize(n);
    for (MotionVector& mv : f.vectors) {
      mv.du = static_cast<std::int8_t>(r.u8());
      mv.dv = static_cast<std::int8_t>(r.u8());
      mv.sad = r.u16();
    }
    result.fields.push_back(std::move(f));
    result.bytes_consumed = r.pos();
  }
  if (result.fields.empty()) result.bytes_consumed = sizeof(kMvStreamMagic);
  return result;
}

void write_mv_stream_file(const std::string& path,
                          std::span<const FlowField> fields) {
  const std::vector<std::uint8_t> bytes = encode_mv_stream(fields);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

MvDecodeResult read_mv_stream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_mv_stream(bytes);
}

}  // namespace egoflow
