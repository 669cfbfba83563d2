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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trm {

enum class Aggregation { kMean, kSum };
enum class CreditPolicy { kUniform, kSentenceWeighted };

const char* aggregation_name(Aggregation a);
Aggregation parse_aggregation(std::string_view name);
const char* credit_policy_name(CreditPolicy p);
CreditPolicy parse_credit_policy(std::string_view name);

/// Half-open token range [start, end) covered by one sentence.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct Rollout {
  std::string rollout_id;
  std::vector<double> sentence_rewards;
  std::vector<TokenSpan> sentence_token_spans;
  // Total tokens; 0 means "up to the last span's end".
  std::size_t token_count = 0;
};

struct RolloutGroup {
  std::string query_id;
  std::vector<Rollout> rollouts;
};

struct AdvantageRecord {
  std::string rollout_id;
  double scalar_reward = 0.0;
  double advantage = 0.0;
  std::vector<double> token_credit;
};

/// Mean (default) or sum of one rollout's sentence rewards.
/// Throws Error(kEmptyRewards).
double rollout_scalar(std::span<const double> sentence_rewards, Aggregation mode = Aggregation::kMean);

inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr double kDefaultKlCoefficient = 0.01;

/// (r - mean) / std with the population std; all zeros when std < epsilon.
/// Throws Error(kGroupTooSmall) for fewer than two scalars.
std::vector<double> group_advantages(std::span<const double> scalars,
                                     double epsilon = kDefaultEpsilon);

/// Spreads rollout advantages over tokens. Uniform: every token of rollout
/// j gets advantage_j. Sentence-weighted: tokens of sentence k get
/// advantage_j * (reward_jk - mean_k reward_jk); tokens outside any span get 0.
/// Throws Error(kSpanMismatch) on inconsistent spans.
std::vector<AdvantageRecord> broadcast_credit(const RolloutGroup& group,
                                              std::span<const double> advantages,
                                              CreditPolicy policy = CreditPolicy::kUniform,
                                              Aggregation mode = Aggregation::kMean);

/// rollout_scalar -> group_advantages -> broadcast_credit for one group.
std::vector<AdvantageRecord> group_credit(const RolloutGroup& group, Aggregation mode,
                                          CreditPolicy policy, double epsilon = kDefaultEpsilon);

}  // namespace trm
