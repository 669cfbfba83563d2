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

#include "trm/error.hpp"

namespace trm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNoJsonArray: return "NoJsonArray";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kNoPerfectAnswer: return "NoPerfectAnswer";
    case ErrorCode::kEmptyRewards: return "EmptyRewards";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kSpanMismatch: return "SpanMismatch";
    case ErrorCode::kDegenerateQuery: return "DegenerateQuery";
    case ErrorCode::kWrongArity: return "WrongArity";
    case ErrorCode::kAlignment: return "AlignmentError";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kMalformedVerdict: return "MalformedVerdict";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace trm
