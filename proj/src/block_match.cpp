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

#include "egoflow/block_match.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

#include "egoflow/error.hpp"

namespace egoflow {

void MatchParams::validate() const {
  if (macroblock_size < 4) throw DomainError("macroblock_size must be >= 4");
  if (step < 1) throw DomainError("step must be >= 1");
  if (search_range < 0 || search_range % step != 0) {
    throw DomainError("search_range must be a non-negative multiple of step");
  }
}

namespace {

// Row SAD written so the compiler can lower it to packed SAD instructions.
inline std::uint32_t row_sad(const std::uint8_t* a, const std::uint8_t* b,
                             int n) {
  std::uint32_t s = 0;
  for (int i = 0; i < n; ++i) {
    s += static_cast<std::uint32_t>(std::abs(int(a[i]) - int(b[i])));
  }
  return s;
}

struct Candidate {
  std::uint32_t sad;
  int dist2;
  int du;
  int dv;
};

inline bool better(const Candidate& a, const Candidate& b) {
  if (a.sad != b.sad) return a.sad < b.sad;
  if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
  if (a.dv != b.dv) return a.dv < b.dv;
  return a.du < b.du;
}

}  // namespace

double block_flatness(const GrayImage& image, int left, int top, int size) {
  double sum = 0.0;
  for (int v = top; v < top + size; ++v) {
    for (int u = left; u < left + size; ++u) sum += image.at(u, v);
  }
  const double mean = sum / (static_cast<double>(size) * size);
  double dev = 0.0;
  for (int v = top; v < top + size; ++v) {
    for (int u = left; u < left + size; ++u) {
      dev += std::abs(image.at(u, v) - mean);
    }
  }
  return dev;
}

MotionVector match_block(const GrayImage& ref, const GrayImage& tgt,
                         int center_u, int center_v,
                         const MatchParams& params) {
  params.validate();
  const int size = params.macroblock_size;
  const int left = center_u - size / 2;
  const int top = center_v - size / 2;
  if (left < 0 || top < 0 || left + size > ref.width() ||
      top + size > ref.height()) {
    throw DomainError("macroblock lies outside the reference image");
  }

  Candidate best{std::numeric_limits<std::uint32_t>::max(),
                 std::numeric_limits<int>::max(), 0, 0};
  bool found = false;
  const int range = params.search_range;
  for (int dv = -range; dv <= range; dv += params.step) {
    const int ttop = top + dv;
    if (ttop < 0 || ttop + size > tgt.height()) continue;
    for (int du = -range; du <= range; du += params.step) {
      const int tleft = left + du;
      if (tleft < 0 || tleft + size > tgt.width()) continue;
      const int dist2 = du * du + dv * dv;
      // Rows are accumulated until the partial sum can no longer win or tie.
      std::uint32_t sad = 0;
      for (int r = 0; r < size; ++r) {
        sad += row_sad(ref.row(top + r) + left, tgt.row(ttop + r) + tleft,
                       size);
        if (sad > best.sad) break;
      }
      const Candidate c{sad, dist2, du, dv};
      if (!found || better(c, best)) {
        best = c;
        found = true;
      }
    }
  }
  if (!found) {
    throw DomainError("no candidate displacement keeps the block inside the "
                      "target image");
  }
  return MotionVector{best.du, best.dv, std::min(best.sad, kMaxSad)};
}

FlowField compute_flow_field(const GrayImage& ref, const GrayImage& tgt,
                             double timestamp, std::uint32_t frame_index,
                             const MatchParams& params, unsigned threads) {
  params.validate();
  if (ref.width() != tgt.width() || ref.height() != tgt.height()) {
    throw DomainError("reference and target images differ in size");
  }
  FlowField field;
  field.frame_index = frame_index;
  field.timestamp = timestamp;
  field.macroblock_size = params.macroblock_size;
  field.grid_w = ref.width() / params.macroblock_size;
  field.grid_h = ref.height() / params.macroblock_size;
  field.vectors.resize(static_cast<std::size_t>(field.grid_w) * field.grid_h);

  const int size = params.macroblock_size;
  auto run_rows = [&](int row_begin, int row_end) {
    for (int row = row_begin; row < row_end; ++row) {
      for (int col = 0; col < field.grid_w; ++col) {
        if (params.flat_sad_threshold &&
            block_flatness(ref, col * size, row * size, size) <
                *params.flat_sad_threshold) {
          field.at(col, row) = MotionVector{0, 0, kInvalidSad};
          continue;
        }
        field.at(col, row) = match_block(ref, tgt, col * size + size / 2,
                                         row * size + size / 2, params);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max(1, field.grid_h));
  if (threads <= 1) {
    run_rows(0, field.grid_h);
    return field;
  }
  // Disjoint row bands write disjoint cells.
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const int band = (field.grid_h + static_cast<int>(threads) - 1) /
                   static_cast<int>(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(t) * band;
    const int end = std::min(field.grid_h, begin + band);
    if (begin >= end) break;
    workers.emplace_back(run_rows, begin, end);
  }
  for (auto& w : workers) w.join();
  return field;
}

}  // namespace egoflow
