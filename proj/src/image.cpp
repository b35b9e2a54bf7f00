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

#include "egoflow/image.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "egoflow/error.hpp"

namespace egoflow {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw DomainError("pixel buffer size does not match dimensions");
  }
}

namespace {

class PgmHeaderParser {
 public:
  PgmHeaderParser(std::span<const std::uint8_t> bytes,
                  std::optional<double>* timestamp)
      : bytes_(bytes), timestamp_(timestamp) {}

  std::size_t pos() const { return pos_; }

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
      throw FormatError("not a binary PGM (P5) file", 0);
    }
    pos_ = 2;
  }

  int next_int() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    int value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1 << 20) {
        throw FormatError("PGM header value too large",
                          static_cast<std::int64_t>(start));
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw FormatError("malformed PGM header",
                        static_cast<std::int64_t>(start));
    }
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("missing whitespace after PGM header",
                        static_cast<std::int64_t>(pos_));
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        const std::size_t start = pos_ + 1;
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        parse_comment(start, pos_);
      } else {
        break;
      }
    }
  }

  void parse_comment(std::size_t begin, std::size_t end) {
    if (timestamp_ == nullptr) return;
    std::string text(bytes_.begin() + begin, bytes_.begin() + end);
    const std::string key = "timestamp";
    const auto k = text.find(key);
    if (k == std::string::npos) return;
    const char* first = text.c_str() + k + key.size();
    const char* last = text.c_str() + text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(*first))) {
      ++first;
    }
    double t = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, t);
    if (ec == std::errc()) *timestamp_ = t;
  }

  std::span<const std::uint8_t> bytes_;
  std::optional<double>* timestamp_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes,
                     std::optional<double>* timestamp) {
  if (timestamp != nullptr) timestamp->reset();
  PgmHeaderParser p(bytes, timestamp);
  p.expect_magic();
  const int width = p.next_int();
  const int height = p.next_int();
  const int maxval = p.next_int();
  p.single_whitespace();
  if (width <= 0 || height <= 0) {
    throw FormatError("PGM dimensions must be positive", 2);
  }
  if (maxval != 255) {
    throw FormatError("only maxval 255 is supported, got " +
                      std::to_string(maxval));
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (bytes.size() - p.pos() < n) {
    throw FormatError("PGM pixel data truncated",
                      static_cast<std::int64_t>(bytes.size()));
  }
  std::vector<std::uint8_t> pixels(bytes.begin() + p.pos(),
                                   bytes.begin() + p.pos() + n);
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm(const std::string& path, std::optional<double>* timestamp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pgm(bytes, timestamp);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image,
                                     std::optional<double> timestamp) {
  std::string header = "P5\n";
  if (timestamp) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# timestamp %.17g\n", *timestamp);
    header += buf;
  }
  header += std::to_string(image.width()) + " " +
            std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

void write_pgm(const std::string& path, const GrayImage& image,
               std::optional<double> timestamp) {
  const auto bytes = encode_pgm(image, timestamp);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace egoflow
