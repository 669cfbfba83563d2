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
#include "trm/protocol.hpp"

namespace trm {

/// Shaping variants for training the reward model itself.
enum class RewardVariant { kRlC, kRlCf, kRlCfPlus, kCustom };

const char* reward_variant_name(RewardVariant v);
/// Accepts "RL_C", "RL_CF", "RL_CF_PLUS" (also "RL-CF+" style) and "custom".
RewardVariant parse_reward_variant(std::string_view name);

struct RewardConfig {
  double alpha = 0.5;          // faithfulness weight
  double bonus_hit = 0.0;      // gold incorrect, predicted incorrect
  double penalty_miss = 0.0;   // gold incorrect, predicted correct
  RewardVariant variant = RewardVariant::kRlCf;

  /// RL_C: correctness only. RL_CF: plus 0.5 x faithfulness. RL_CF_PLUS:
  /// RL_CF plus +1 / -1 on sentences whose gold label is incorrect.
  static RewardConfig preset(RewardVariant variant);
};

struct ShapedReward {
  double value = 0.0;
  int correct_match = 0;
  int faith_match = 0;
  double bonus_applied = 0.0;
};

/// value = correct_match + alpha * faith_match + bonus, where the match bits
/// compare prediction with gold and the bonus only fires on gold-incorrect
/// sentences.
ShapedReward trm_sentence_reward(const TrmVerdict& pred, const SentenceLabel& gold,
                                 const RewardConfig& cfg);

/// Preference weight for policy training; the default 2.0 weights TRM and
/// preference 1:2.
struct PolicyRewardConfig {
  double beta = 2.0;
};

/// trm_bit + beta * prefer. `prefer` is +1 (rollout preferred over the
/// anchor), -1 (anchor preferred) or 0 (judge tie).
double policy_sentence_reward(int trm_bit, int prefer, const PolicyRewardConfig& cfg);

struct AnchorRef {
  std::string query_id;
  std::string answer_id;
  std::size_t answer_index = 0;
};

/// Among answers whose every correctness bit is 1, picks the longest;
/// earlier answers win ties. `trm_scores[i]` belongs to query.answers[i].
/// Throws Error(kNoPerfectAnswer) when no answer qualifies.
AnchorRef select_anchor(const QueryRecord& query,
                        const std::vector<std::vector<int>>& trm_scores);

/// Index-only form for callers without a QueryRecord.
std::size_t select_anchor_index(const std::vector<std::vector<int>>& trm_scores);

}  // namespace trm
