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

#ifndef EGOFLOW_ERROR_HPP
#define EGOFLOW_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace egoflow {

/// Error categories. Values are shared with the C API status codes.
enum class ErrorCode : int {
  kDomain = 1,
  kFormat = 2,
  kRange = 3,
  kIo = 4,
  kNoConsensus = 5,
  kDegenerate = 6,
  kInvalidArgument = 7,
};

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

/// Malformed input data. Carries the byte offset when one is known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::int64_t offset = -1)
      : Error(ErrorCode::kFormat, what), offset_(offset) {}

  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::int64_t offset_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(ErrorCode::kRange, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class NoConsensusError : public Error {
 public:
  explicit NoConsensusError(const std::string& what)
      : Error(ErrorCode::kNoConsensus, what) {}
};

class DegenerateSampleError : public Error {
 public:
  explicit DegenerateSampleError(const std::string& what)
      : Error(ErrorCode::kDegenerate, what) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

}  // namespace egoflow

#endif  // EGOFLOW_ERROR_HPP
