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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace trm {

/// Names of the shipped prompt templates.
namespace prompt_names {
inline constexpr std::string_view kTrmEval = "trm_eval";
inline constexpr std::string_view kPolicyAnswer = "policy_answer";
inline constexpr std::string_view kJudgeCorrectness = "judge_correctness";
inline constexpr std::string_view kJudgeUsefulness = "judge_usefulness";
}  // namespace prompt_names

/// A set of `{{placeholder}}` text templates.
///
/// The built-in set is compiled in from resources/prompts/<version>/. A
/// directory override replaces any template whose `<name>.txt` it contains,
/// which is how translated variants are plugged in.
class PromptLibrary {
 public:
  static const PromptLibrary& builtin();
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const std::string& version() const { return version_; }
  const std::string& source(std::string_view name) const;

  /// Single-pass substitution; values are inserted verbatim and never
  /// re-expanded. Throws Error(kInvalidArgument) for an unknown template or
  /// a placeholder with no value.
  std::string render(std::string_view name,
                     const std::map<std::string, std::string, std::less<>>& values) const;

 private:
  std::string version_;
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace trm
