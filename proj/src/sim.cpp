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

#include "trm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "trm/error.hpp"
#include "trm/metrics.hpp"

namespace trm {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Sentence {
  int gold_correct;
  int gold_faith;
  double z_correct;
  double z_faith;
};

// Draws gold labels and evidence in a fixed order so that runs are
// reproducible for a given engine state.
Sentence draw_sentence(std::mt19937_64& rng, const SimConfig& cfg) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  Sentence s{};
  s.gold_correct = u(rng) < cfg.class_prior_correct ? 1 : 0;
  const bool same = u(rng) < cfg.faith_correct_coupling;
  s.gold_faith = same ? s.gold_correct : 1 - s.gold_correct;
  const double m = cfg.signal_strength;
  s.z_correct = n(rng) + (s.gold_correct ? m : -m);
  s.z_faith = n(rng) + (s.gold_faith ? m : -m);
  return s;
}

class Evaluator {
 public:
  explicit Evaluator(const SimConfig& cfg) : cfg_(cfg) {
    std::mt19937_64 rng(cfg.test_seed);
    const int n = cfg.test_queries * cfg.test_answers * cfg.test_sentences;
    test_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) test_.push_back(draw_sentence(rng, cfg));
  }

  SimStep evaluate(double theta_c, double theta_f) const {
    const double k = 2.0 * cfg_.signal_strength;
    const RewardConfig& rc = cfg_.variant;
    // Expected confusion counts, indexed [gold][pred].
    double cm[2][2] = {{0, 0}, {0, 0}};
    double reward = 0.0;
    std::vector<double> gold_score;
    std::vector<double> pred_score;
    std::size_t hits = 0;
    std::size_t evaluated = 0;
    std::size_t idx = 0;
    for (int q = 0; q < cfg_.test_queries; ++q) {
      gold_score.assign(static_cast<std::size_t>(cfg_.test_answers), 0.0);
      pred_score.assign(static_cast<std::size_t>(cfg_.test_answers), 0.0);
      for (int a = 0; a < cfg_.test_answers; ++a) {
        int gold_sum = 0;
        double pred_sum = 0.0;
        for (int s = 0; s < cfg_.test_sentences; ++s, ++idx) {
          const Sentence& t = test_[idx];
          const double pc = sigmoid(theta_c + k * t.z_correct);
          const double pf = sigmoid(theta_f + k * t.z_faith);
          cm[t.gold_correct][1] += pc;
          cm[t.gold_correct][0] += 1.0 - pc;
          const double p_match_c = t.gold_correct ? pc : 1.0 - pc;
          const double p_match_f = t.gold_faith ? pf : 1.0 - pf;
          reward += p_match_c + rc.alpha * p_match_f;
          if (t.gold_correct == 0) reward += (1.0 - pc) * rc.bonus_hit + pc * rc.penalty_miss;
          gold_sum += t.gold_correct;
          pred_sum += pc;
        }
        gold_score[static_cast<std::size_t>(a)] = static_cast<double>(gold_sum) / cfg_.test_sentences;
        pred_score[static_cast<std::size_t>(a)] = pred_sum / cfg_.test_sentences;
      }
      if (cfg_.test_answers >= 2) {
        try {
          hits += static_cast<std::size_t>(detect_worst(gold_score, pred_score));
          ++evaluated;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerateQuery) throw;
        }
      }
    }
    auto f1 = [&](int target) {
      const double tp = cm[target][target];
      const double fp = cm[1 - target][target];
      const double fn = cm[target][1 - target];
      const double den = 2.0 * tp + fp + fn;
      return den == 0.0 ? 0.0 : 2.0 * tp / den;
    };
    SimStep step;
    step.f1_incorrect = f1(0);
    step.f1_correct = f1(1);
    step.detection_proxy = evaluated == 0 ? 0.0 : static_cast<double>(hits) / evaluated;
    step.mean_reward = test_.empty() ? 0.0 : reward / static_cast<double>(test_.size());
    return step;
  }

 private:
  const SimConfig& cfg_;
  std::vector<Sentence> test_;
};

}  // namespace

void SimConfig::validate() const {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::kInvalidArgument, why); };
  if (!(class_prior_correct > 0.0 && class_prior_correct < 1.0))
    bad("class_prior_correct must lie in (0, 1)");
  if (!(faith_correct_coupling >= 0.0 && faith_correct_coupling <= 1.0))
    bad("faith_correct_coupling must lie in [0, 1]");
  if (steps < 1) bad("steps must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    bad("learning_rate must be a finite non-negative number");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (!(signal_strength >= 0.0)) bad("signal_strength must be >= 0");
  if (test_queries < 1 || test_answers < 1 || test_sentences < 1)
    bad("test set dimensions must be >= 1");
}

SimTrajectory run_sim(const SimConfig& cfg) {
  cfg.validate();
  const Evaluator eval(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double k = 2.0 * cfg.signal_strength;
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  SimTrajectory out;
  out.steps.reserve(static_cast<std::size_t>(cfg.steps));
  if (cfg.record_samples) out.samples.reserve(batch * static_cast<std::size_t>(cfg.steps));

  double theta_c = cfg.init_correct_logit;
  double theta_f = cfg.init_faith_logit;
  std::vector<double> r(batch);
  std::vector<double> score_c(batch);
  std::vector<double> score_f(batch);
  for (int t = 0; t < cfg.steps; ++t) {
    out.steps.push_back(eval.evaluate(theta_c, theta_f));

    double r_sum = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      const Sentence s = draw_sentence(rng, cfg);
      const double pc = sigmoid(theta_c + k * s.z_correct);
      const double pf = sigmoid(theta_f + k * s.z_faith);
      TrmVerdict pred;
      pred.correctness = u(rng) < pc ? 1 : 0;
      pred.faithfulness = u(rng) < pf ? 1 : 0;
      SentenceLabel gold;
      gold.correctness = s.gold_correct;
      gold.faithfulness = s.gold_faith;
      r[i] = trm_sentence_reward(pred, gold, cfg.variant).value;
      score_c[i] = pred.correctness - pc;
      score_f[i] = pred.faithfulness - pf;
      r_sum += r[i];
      if (cfg.record_samples)
        out.samples.push_back({gold.correctness, gold.faithfulness, pred.correctness,
                               pred.faithfulness, r[i]});
    }
    // Score-function gradient with the batch mean as baseline.
    const double baseline = r_sum / static_cast<double>(batch);
    double g_c = 0.0;
    double g_f = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      g_c += (r[i] - baseline) * score_c[i];
      g_f += (r[i] - baseline) * score_f[i];
    }
    theta_c += cfg.learning_rate * g_c / static_cast<double>(batch);
    theta_f += cfg.learning_rate * g_f / static_cast<double>(batch);
  }
  out.final_correct_logit = theta_c;
  out.final_faith_logit = theta_f;
  return out;
}

std::vector<VariantSummary> compare_variants(const SimConfig& base) {
  std::vector<VariantSummary> out;
  for (RewardVariant v : {RewardVariant::kRlC, RewardVariant::kRlCf, RewardVariant::kRlCfPlus}) {
    SimConfig cfg = base;
    cfg.variant = RewardConfig::preset(v);
    VariantSummary s;
    s.variant = v;
    s.trajectory = run_sim(cfg);
    s.final_step = s.trajectory.steps.back();
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const VariantSummary& a, const VariantSummary& b) {
    return a.final_step.f1_incorrect > b.final_step.f1_incorrect;
  });
  return out;
}

void write_trajectory_csv(std::ostream& out, const SimTrajectory& t) {
  out << "step,f1_incorrect,detection_proxy,mean_reward\n";
  char buf[128];
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const SimStep& s = t.steps[i];
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", i, s.f1_incorrect, s.detection_proxy,
                  s.mean_reward);
    out << buf;
  }
}

}  // namespace trm
