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
#include <string>
#include <string_view>
#include <vector>

#include "trm/dataset.hpp"
#include "trm/prompts.hpp"

namespace trm {

/// One parsed per-sentence judgment: faithfulness, then the reasoning that
/// leads to the correctness call.
struct TrmVerdict {
  int faithfulness = 1;
  std::string reason;
  int correctness = 1;

  bool operator==(const TrmVerdict&) const = default;
};

struct VerdictList {
  std::vector<TrmVerdict> verdicts;
  std::string source_text;  // raw model output, kept for audit
};

std::string build_trm_prompt(const QueryRecord& record, const SegmentedAnswer& answer,
                             const PromptLibrary& prompts = PromptLibrary::builtin());
std::string build_trm_prompt(const QueryRecord& record, std::size_t answer_index,
                             const PromptLibrary& prompts = PromptLibrary::builtin());

std::string build_policy_prompt(const QueryRecord& record,
                                const PromptLibrary& prompts = PromptLibrary::builtin());

/// Extracts the first JSON array of objects from free-form model output
/// (prose, code fences and `//` comments are tolerated) and validates it.
/// Scores may be integers, booleans, 0.0/1.0 or the strings "0"/"1". The
/// reason is read from "Correctness Reason" or "Reason for Correctness
/// Score". With expected_count == 1 a bare verdict object is also accepted.
///
/// Throws Error(kNoJsonArray), LengthMismatchError or DomainError.
VerdictList parse_verdicts(std::string_view model_output, std::size_t expected_count);

/// Canonical JSON array using the prompt's key spelling.
std::string serialize_verdicts(const std::vector<TrmVerdict>& verdicts);

}  // namespace trm
