// Copyright 2026 The trmkit Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trm {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyInput,
  kParse,
  kSchema,
  kEmptyDataset,
  kNoJsonArray,
  kLengthMismatch,
  kDomain,
  kNoPerfectAnswer,
  kEmptyRewards,
  kGroupTooSmall,
  kSpanMismatch,
  kDegenerateQuery,
  kWrongArity,
  kAlignment,
  kTransport,
  kMalformedVerdict,
  kIo,
};

const char* error_code_name(ErrorCode code);

/// Base of every error the core library throws. The C API maps `code()` onto
/// its status enum, so new codes must be added there too.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A JSONL input failed to parse or validate. `line` is 1-based.
class DataError : public Error {
 public:
  DataError(ErrorCode code, std::size_t line, std::string field,
            const std::string& reason)
      : Error(code, "line " + std::to_string(line) + ": " +
                        (field.empty() ? "" : field + ": ") + reason),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class LengthMismatchError : public Error {
 public:
  LengthMismatchError(std::size_t got, std::size_t expected)
      : Error(ErrorCode::kLengthMismatch,
              "verdict count " + std::to_string(got) + " != expected " +
                  std::to_string(expected)),
        got_(got),
        expected_(expected) {}

  std::size_t got() const noexcept { return got_; }
  std::size_t expected() const noexcept { return expected_; }

 private:
  std::size_t got_;
  std::size_t expected_;
};

class DomainError : public Error {
 public:
  DomainError(std::size_t index, std::string field, const std::string& reason)
      : Error(ErrorCode::kDomain, "verdict " + std::to_string(index) + ": " +
                                      field + ": " + reason),
        index_(index),
        field_(std::move(field)) {}

  std::size_t index() const noexcept { return index_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t index_;
  std::string field_;
};

}  // namespace trm
