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

#include <string>
#include <string_view>
#include <vector>

#include "trm/dataset.hpp"
#include "trm/grpo.hpp"
#include "trm/reward.hpp"

// JSONL stage formats shared by the command-line tool and the C API. Every
// function takes whole JSONL text and returns whole JSONL text; a bad row
// throws DataError naming its 1-based line.
namespace trm::pipeline {

/// Segmentation of one answer as a JSON object
/// {"segments": [{"index", "text", "kind"}], "marked_text"}.
std::string segmentation_json(std::string_view answer_text);

/// Rows {"query_id", "answer_id", "output"[, "expected_count"]} in,
/// rows {"query_id", "answer_id", "verdicts": [{"faithfulness", "reason",
/// "correctness"}]} out. With a dataset, the expected count is the answer's
/// sentence count.
std::string parse_verdict_rows(std::string_view jsonl, const std::vector<QueryRecord>* dataset);

/// Verdict rows in, rows {"query_id", "answer_id", "variant",
/// "sentence_rewards", "mean_reward"} out, scored against gold labels.
std::string trm_reward_rows(std::string_view verdict_jsonl, const std::vector<QueryRecord>& dataset,
                            const RewardConfig& cfg);

/// Rows {"query_id", "rollout_id", "trm_bits", "prefer"} in, where prefer is
/// -1, 0, +1 or a duel result ("win", "lose", "tie"); rows {"query_id",
/// "rollout_id", "beta", "sentence_rewards"} out.
std::string policy_reward_rows(std::string_view jsonl, const PolicyRewardConfig& cfg);

/// Verdict rows in (any subset of answers); one row per dataset query out:
/// {"query_id", "answer_id", "answer_index"} or {"query_id", "error"}.
/// Answers without a verdict row are not candidates.
std::string anchor_rows(std::string_view verdict_jsonl, const std::vector<QueryRecord>& dataset);

struct AdvantageOptions {
  Aggregation aggregation = Aggregation::kMean;
  CreditPolicy credit = CreditPolicy::kUniform;
  double epsilon = kDefaultEpsilon;
  double kl_coefficient = kDefaultKlCoefficient;
};

/// Rows {"query_id", "rollouts": [{"rollout_id", "sentence_rewards",
/// "sentence_token_spans": [[start, end], ...], "token_count"}]} in. Out: a
/// header line {"mode", "epsilon", "kl_coefficient", "credit_policy"} then
/// one {"query_id", "rollout_id", "scalar_reward", "advantage",
/// "token_credit"} row per rollout.
std::string advantage_rows(std::string_view groups_jsonl, const AdvantageOptions& opts);

/// Rows {"query_id", "answer_text"} keyed onto dataset order. Throws
/// Error(kAlignment) when a query is missing or repeated.
std::vector<std::string> answers_by_query(std::string_view jsonl,
                                          const std::vector<QueryRecord>& dataset);

}  // namespace trm::pipeline
