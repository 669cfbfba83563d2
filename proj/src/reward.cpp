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

#include "trm/reward.hpp"

#include <algorithm>
#include <cctype>

#include "trm/error.hpp"

namespace trm {

const char* reward_variant_name(RewardVariant v) {
  switch (v) {
    case RewardVariant::kRlC: return "RL_C";
    case RewardVariant::kRlCf: return "RL_CF";
    case RewardVariant::kRlCfPlus: return "RL_CF_PLUS";
    case RewardVariant::kCustom: return "custom";
  }
  return "custom";
}

RewardVariant parse_reward_variant(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-') c = '_';
    key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (key == "RL_C") return RewardVariant::kRlC;
  if (key == "RL_CF") return RewardVariant::kRlCf;
  if (key == "RL_CF_PLUS" || key == "RL_CF+") return RewardVariant::kRlCfPlus;
  if (key == "CUSTOM") return RewardVariant::kCustom;
  throw Error(ErrorCode::kInvalidArgument, "unknown reward variant '" + std::string(name) + "'");
}

RewardConfig RewardConfig::preset(RewardVariant variant) {
  switch (variant) {
    case RewardVariant::kRlC: return {0.0, 0.0, 0.0, variant};
    case RewardVariant::kRlCf: return {0.5, 0.0, 0.0, variant};
    case RewardVariant::kRlCfPlus: return {0.5, 1.0, -1.0, variant};
    case RewardVariant::kCustom: return {0.5, 0.0, 0.0, variant};
  }
  return {};
}

ShapedReward trm_sentence_reward(const TrmVerdict& pred, const SentenceLabel& gold,
                                 const RewardConfig& cfg) {
  ShapedReward r;
  r.correct_match = pred.correctness == gold.correctness ? 1 : 0;
  r.faith_match = pred.faithfulness == gold.faithfulness ? 1 : 0;
  if (gold.correctness == 0) r.bonus_applied = pred.correctness == 0 ? cfg.bonus_hit : cfg.penalty_miss;
  r.value = r.correct_match + cfg.alpha * r.faith_match + r.bonus_applied;
  return r;
}

double policy_sentence_reward(int trm_bit, int prefer, const PolicyRewardConfig& cfg) {
  if (trm_bit != 0 && trm_bit != 1)
    throw Error(ErrorCode::kInvalidArgument, "trm_bit must be 0 or 1");
  if (prefer < -1 || prefer > 1)
    throw Error(ErrorCode::kInvalidArgument, "prefer must be -1, 0 or +1");
  if (cfg.beta < 0.0) throw Error(ErrorCode::kInvalidArgument, "beta must be non-negative");
  return trm_bit + cfg.beta * prefer;
}

std::size_t select_anchor_index(const std::vector<std::vector<int>>& trm_scores) {
  if (trm_scores.empty()) throw Error(ErrorCode::kInvalidArgument, "no answers were scored");
  std::size_t best = trm_scores.size();
  for (std::size_t i = 0; i < trm_scores.size(); ++i) {
    const auto& bits = trm_scores[i];
    const bool perfect =
        !bits.empty() && std::all_of(bits.begin(), bits.end(), [](int b) { return b == 1; });
    if (!perfect) continue;
    if (best == trm_scores.size() || bits.size() > trm_scores[best].size()) best = i;
  }
  if (best == trm_scores.size())
    throw Error(ErrorCode::kNoPerfectAnswer, "no answer has every sentence judged correct");
  return best;
}

AnchorRef select_anchor(const QueryRecord& query,
                        const std::vector<std::vector<int>>& trm_scores) {
  if (trm_scores.size() != query.answers.size())
    throw Error(ErrorCode::kInvalidArgument,
                "score rows (" + std::to_string(trm_scores.size()) + ") != answers (" +
                    std::to_string(query.answers.size()) + ") for query '" + query.query_id + "'");
  AnchorRef ref;
  ref.answer_index = select_anchor_index(trm_scores);
  ref.query_id = query.query_id;
  ref.answer_id = query.answers[ref.answer_index].answer_id;
  return ref;
}

}  // namespace trm
