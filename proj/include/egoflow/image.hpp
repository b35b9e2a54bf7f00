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

#ifndef EGOFLOW_IMAGE_HPP
#define EGOFLOW_IMAGE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egoflow {

/// 8-bit grayscale image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int u, int v) const {
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::uint8_t& at(int u, int v) {
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }
  const std::uint8_t* row(int v) const {
    return pixels_.data() + static_cast<std::size_t>(v) * width_;
  }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Binary PGM (P5, maxval 255). A `# timestamp <seconds>` comment line, when
/// present, is returned through `timestamp`.
GrayImage read_pgm(const std::string& path,
                   std::optional<double>* timestamp = nullptr);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes,
                     std::optional<double>* timestamp = nullptr);

std::vector<std::uint8_t> encode_pgm(const GrayImage& image,
                                     std::optional<double> timestamp = {});
void write_pgm(const std::string& path, const GrayImage& image,
               std::optional<double> timestamp = {});

}  // namespace egoflow

#endif  // EGOFLOW_IMAGE_HPP
