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

// Sparse block-matching optical flow with the constraints of a hardware
// coarse motion estimator: one vector per macroblock, a bounded search
// window and a coarse displacement step.

#ifndef EGOFLOW_BLOCK_MATCH_HPP
#define EGOFLOW_BLOCK_MATCH_HPP

#include <cstdint>
#include <optional>

#include "egoflow/image.hpp"
#include "egoflow/types.hpp"

namespace egoflow {

struct MatchParams {
  int macroblock_size = 16;
  int search_range = 64;
  int step = 2;
  /// Blocks whose summed absolute deviation from their own mean falls below
  /// this bound are marked unusable (sad = kInvalidSad). Disabled when unset.
  std::optional<double> flat_sad_threshold;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Exhaustive SAD search for the block centered at (center_u, center_v).
///
/// The block covers [center - size/2, center - size/2 + size) on both axes
/// and must lie inside `ref`. Candidates form the grid
/// {-range, -range + step, ..., range}^2; candidates whose window leaves
/// `tgt` are skipped. Equal SADs resolve to the smaller du^2 + dv^2, then
/// the smaller dv, then the smaller du. The reported SAD saturates at
/// kMaxSad.
MotionVector match_block(const GrayImage& ref, const GrayImage& tgt,
                         int center_u, int center_v, const MatchParams& params);

/// One match_block per macroblock of a floor(w/size) x floor(h/size) grid.
/// `threads` = 0 picks the hardware concurrency; the result does not depend
/// on it.
FlowField compute_flow_field(const GrayImage& ref, const GrayImage& tgt,
                             double timestamp, std::uint32_t frame_index,
                             const MatchParams& params, unsigned threads = 0);

/// Summed absolute deviation of a block from its mean intensity.
double block_flatness(const GrayImage& image, int left, int top, int size);

}  // namespace egoflow

#endif  // EGOFLOW_BLOCK_MATCH_HPP
