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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trm/reward.hpp"

namespace trm {

/// Toy policy-gradient run of the reward shaping variants on an imbalanced
/// sentence label stream. It is an analogy for the trend between variants,
/// not a model of large-scale RL training.
///
/// Each sentence carries one synthetic evidence value per head,
/// z ~ N(+s, 1) when the gold bit is 1 and N(-s, 1) when it is 0. Head h
/// predicts 1 with probability sigmoid(theta_h + 2 s z), so the only learned
/// parameter per head is the bias theta_h.
struct SimConfig {
  double class_prior_correct = 0.8686;
  // P(faithfulness bit == correctness bit).
  double faith_correct_coupling = 0.85;
  int steps = 400;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
  RewardConfig variant = RewardConfig::preset(RewardVariant::kRlCfPlus);

  int batch_size = 2048;
  double signal_strength = 1.0;
  double init_correct_logit = 3.0;
  double init_faith_logit = 0.0;
  // The evaluation set is fixed across runs; only its seed is configurable.
  std::uint64_t test_seed = 12345;
  int test_queries = 100;
  int test_answers = 4;
  int test_sentences = 10;
  // Keep every training sample (for cross-checks; large).
  bool record_samples = false;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

struct SimStep {
  double f1_incorrect = 0.0;
  double f1_correct = 0.0;
  double detection_proxy = 0.0;
  double mean_reward = 0.0;
};

struct SimSample {
  int gold_correct = 1;
  int gold_faith = 1;
  int pred_correct = 1;
  int pred_faith = 1;
  double reward = 0.0;
};

struct SimTrajectory {
  // Metrics on the fixed test set, taken before each step's update.
  std::vector<SimStep> steps;
  double final_correct_logit = 0.0;
  double final_faith_logit = 0.0;
  // Filled when record_samples is set; steps * batch_size entries.
  std::vector<SimSample> samples;
};

SimTrajectory run_sim(const SimConfig& cfg);

struct VariantSummary {
  RewardVariant variant = RewardVariant::kRlC;
  SimStep final_step;
  SimTrajectory trajectory;
};

/// Runs RL_C, RL_CF and RL_CF_PLUS with the base config's seed and returns
/// them ranked by final f1_incorrect, best first (ties keep that order).
std::vector<VariantSummary> compare_variants(const SimConfig& base);

/// CSV with header `step,f1_incorrect,detection_proxy,mean_reward`.
void write_trajectory_csv(std::ostream& out, const SimTrajectory& t);

}  // namespace trm
