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

#include "trm/grpo.hpp"

#include <cmath>
#include <numeric>

#include "trm/error.hpp"

namespace trm {
namespace {

void check_spans(const Rollout& r) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kSpanMismatch, "rollout '" + r.rollout_id + "': " + why);
  };
  if (r.sentence_rewards.size() != r.sentence_token_spans.size())
    fail(std::to_string(r.sentence_rewards.size()) + " rewards but " +
         std::to_string(r.sentence_token_spans.size()) + " spans");
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < r.sentence_token_spans.size(); ++k) {
    const auto& s = r.sentence_token_spans[k];
    if (s.end <= s.start) fail("span " + std::to_string(k) + " is empty or reversed");
    if (s.start < prev_end) fail("span " + std::to_string(k) + " overlaps or is out of order");
    prev_end = s.end;
  }
  if (r.token_count != 0 && prev_end > r.token_count)
    fail("spans reach token " + std::to_string(prev_end) + " beyond token_count " +
         std::to_string(r.token_count));
}

std::size_t token_count_of(const Rollout& r) {
  if (r.token_count != 0) return r.token_count;
  return r.sentence_token_spans.empty() ? 0 : r.sentence_token_spans.back().end;
}

}  // namespace

const char* aggregation_name(Aggregation a) { return a == Aggregation::kSum ? "sum" : "mean"; }

Aggregation parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "sum") return Aggregation::kSum;
  throw Error(ErrorCode::kInvalidArgument, "unknown aggregation '" + std::string(name) + "'");
}

const char* credit_policy_name(CreditPolicy p) {
  return p == CreditPolicy::kSentenceWeighted ? "sentence_weighted" : "uniform";
}

CreditPolicy parse_credit_policy(std::string_view name) {
  if (name == "uniform") return CreditPolicy::kUniform;
  if (name == "sentence_weighted" || name == "sentence-weighted")
    return CreditPolicy::kSentenceWeighted;
  throw Error(ErrorCode::kInvalidArgument, "unknown credit policy '" + std::string(name) + "'");
}

double rollout_scalar(std::span<const double> sentence_rewards, Aggregation mode) {
  if (sentence_rewards.empty()) throw Error(ErrorCode::kEmptyRewards, "rollout has no sentence rewards");
  const double sum = std::accumulate(sentence_rewards.begin(), sentence_rewards.end(), 0.0);
  return mode == Aggregation::kSum ? sum : sum / static_cast<double>(sentence_rewards.size());
}

std::vector<double> group_advantages(std::span<const double> scalars, double epsilon) {
  const std::size_t g = scalars.size();
  if (g < 2)
    throw Error(ErrorCode::kGroupTooSmall,
                "group-relative normalization needs at least 2 rollouts, got " + std::to_string(g));
  // Work with d_i = G*r_i - sum(r), so that (r_i - mean) / std becomes
  // d_i * sqrt(G / sum(d^2)). On dyadic rewards d_i is exact, which makes
  // the result bit-identical under constant shifts.
  const long double n = static_cast<long double>(g);
  long double sum = 0.0L;
  for (double r : scalars) sum += r;
  std::vector<long double> d(g);
  long double ss = 0.0L;
  for (std::size_t i = 0; i < g; ++i) {
    d[i] = n * scalars[i] - sum;
    ss += d[i] * d[i];
  }
  const long double sd = std::sqrt(ss) / (n * std::sqrt(n));
  if (!(sd >= epsilon)) return std::vector<double>(g, 0.0);
  const long double scale = std::sqrt(n / ss);
  std::vector<double> out(g);
  for (std::size_t i = 0; i < g; ++i) out[i] = static_cast<double>(d[i] * scale);
  return out;
}

std::vector<AdvantageRecord> broadcast_credit(const RolloutGroup& group,
                                              std::span<const double> advantages,
                                              CreditPolicy policy, Aggregation mode) {
  if (advantages.size() != group.rollouts.size())
    throw Error(ErrorCode::kInvalidArgument,
                "advantage count " + std::to_string(advantages.size()) + " != rollouts " +
                    std::to_string(group.rollouts.size()));
  std::vector<AdvantageRecord> out;
  out.reserve(group.rollouts.size());
  for (std::size_t j = 0; j < group.rollouts.size(); ++j) {
    const Rollout& r = group.rollouts[j];
    check_spans(r);
    AdvantageRecord rec;
    rec.rollout_id = r.rollout_id;
    rec.scalar_reward = r.sentence_rewards.empty() ? 0.0 : rollout_scalar(r.sentence_rewards, mode);
    rec.advantage = advantages[j];
    const std::size_t tokens = token_count_of(r);
    if (policy == CreditPolicy::kUniform) {
      rec.token_credit.assign(tokens, advantages[j]);
    } else {
      rec.token_credit.assign(tokens, 0.0);
      if (!r.sentence_rewards.empty()) {
        const double mean = rollout_scalar(r.sentence_rewards, Aggregation::kMean);
        for (std::size_t k = 0; k < r.sentence_token_spans.size(); ++k) {
          const double credit = advantages[j] * (r.sentence_rewards[k] - mean);
          const auto& s = r.sentence_token_spans[k];
          for (std::size_t t = s.start; t < s.end; ++t) rec.token_credit[t] = credit;
        }
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AdvantageRecord> group_credit(const RolloutGroup& group, Aggregation mode,
                                          CreditPolicy policy, double epsilon) {
  std::vector<double> scalars;
  scalars.reserve(group.rollouts.size());
  for (const auto& r : group.rollouts) scalars.push_back(rollout_scalar(r.sentence_rewards, mode));
  const auto adv = group_advantages(scalars, epsilon);
  return broadcast_credit(group, adv, policy, mode);
}

}  // namespace trm
