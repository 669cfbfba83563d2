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

#include "trm/protocol.hpp"

#include "lenient_json.hpp"
#include "trm/error.hpp"

namespace trm {
namespace {

using nlohmann::json;

constexpr const char* kFaithKey = "Faithfulness Score";
constexpr const char* kCorrectKey = "Correctness Score";
constexpr const char* kReasonKey = "Correctness Reason";
constexpr const char* kReasonKeyAlt = "Reason for Correctness Score";

bool is_array_of_objects(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!e.is_object()) return false;
  return true;
}

bool is_verdict_object(const json& j) {
  return j.is_object() && (j.contains(kFaithKey) || j.contains(kCorrectKey));
}

int bit_at(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DomainError(index, key, "missing");
  const auto bit = detail::coerce_bit(*it);
  if (!bit) throw DomainError(index, key, "value " + detail::as_text(*it) + " is not 0 or 1");
  return *bit;
}

}  // namespace

std::string build_trm_prompt(const QueryRecord& record, const SegmentedAnswer& answer,
                             const PromptLibrary& prompts) {
  return prompts.render(prompt_names::kTrmEval,
                        {{"query", detail::quote(record.query)},
                         {"now_time", detail::quote(record.now_time)},
                         {"search_result", detail::quote(record.search_result())},
                         {"answer_order", detail::quote(render_marked(answer))}});
}

std::string build_trm_prompt(const QueryRecord& record, std::size_t answer_index,
                             const PromptLibrary& prompts) {
  if (answer_index >= record.answers.size())
    throw Error(ErrorCode::kInvalidArgument, "answer index out of range for query '" +
                                                 record.query_id + "'");
  return build_trm_prompt(record, record.answers[answer_index].segmented, prompts);
}

std::string build_policy_prompt(const QueryRecord& record, const PromptLibrary& prompts) {
  return prompts.render(prompt_names::kPolicyAnswer,
                        {{"query", detail::quote(record.query)},
                         {"search_result", detail::quote(record.search_result())}});
}

VerdictList parse_verdicts(std::string_view model_output, std::size_t expected_count) {
  if (expected_count == 0)
    throw Error(ErrorCode::kInvalidArgument, "expected_count must be at least 1");

  auto found = detail::first_json(model_output, '[', is_array_of_objects);
  if (!found && expected_count == 1) {
    if (auto obj = detail::first_json(model_output, '{', is_verdict_object))
      found = json::array({*obj});
  }
  if (!found) throw Error(ErrorCode::kNoJsonArray, "no JSON array of verdict objects in output");

  const json& arr = *found;
  if (arr.size() != expected_count) throw LengthMismatchError(arr.size(), expected_count);

  VerdictList out;
  out.source_text = std::string(model_output);
  out.verdicts.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& obj = arr[i];
    TrmVerdict v;
    v.faithfulness = bit_at(obj, kFaithKey, i);
    v.correctness = bit_at(obj, kCorrectKey, i);
    if (auto it = obj.find(kReasonKey); it != obj.end()) {
      v.reason = detail::as_text(*it);
    } else if (auto alt = obj.find(kReasonKeyAlt); alt != obj.end()) {
      v.reason = detail::as_text(*alt);
    }
    out.verdicts.push_back(std::move(v));
  }
  return out;
}

std::string serialize_verdicts(const std::vector<TrmVerdict>& verdicts) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    o[kFaithKey] = v.faithfulness;
    o[kReasonKey] = v.reason;
    o[kCorrectKey] = v.correctness;
    arr.push_back(std::move(o));
  }
  return arr.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace trm
