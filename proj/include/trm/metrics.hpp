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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trm/dataset.hpp"

namespace trm {

struct LabeledPair {
  int gold = 1;
  int pred = 1;
};

/// 2x2 counts indexed [gold][pred].
struct Confusion {
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};

  void add(int gold, int pred) { ++counts[gold][pred]; }
  std::size_t total() const;
  std::size_t support(int label) const { return counts[label][0] + counts[label][1]; }
  Confusion& operator+=(const Confusion& other);

  /// F1 with `target` as the positive class; 0 when precision + recall = 0.
  double f1(int target) const;
  /// Per-class F1 averaged with gold-support weights.
  double f1_weighted() const;
  /// Fraction of pairs whose prediction equals gold.
  double accuracy() const;
};

Confusion confusion_of(std::span<const LabeledPair> pairs);

// The functions below throw Error(kEmptyInput) on empty input.
double f1_for_label(std::span<const LabeledPair> pairs, int target);
double f1_overall(std::span<const LabeledPair> pairs);
double recall_overall(std::span<const LabeledPair> pairs);

/// Fraction of sentences labelled correct; lower means worse.
double answer_score(std::span<const int> labels);

/// 1 if the unique gold-worst answer is among the predicted-worst (ties on
/// the predicted side all count), else 0. Throws Error(kDegenerateQuery)
/// when the gold minimum is not unique, Error(kInvalidArgument) for fewer
/// than two answers.
int detect_worst(std::span<const double> gold_scores, std::span<const double> pred_scores);

/// NDCG over exactly four answers: rank by predicted score (descending,
/// stable), gain = gold score, discount log2(rank + 1). 1.0 when the ideal
/// DCG is 0. Throws Error(kWrongArity).
double ndcg_at_4(std::span<const double> gold_scores, std::span<const double> pred_scores);

/// Predicted correctness bits for one answer.
struct AnswerPrediction {
  std::string answer_id;
  std::vector<int> correctness;
};

struct QueryPrediction {
  std::string query_id;
  std::vector<AnswerPrediction> answers;
};

/// JSONL rows of {"query_id", "answers": [{"answer_id", "correctness": [..]}]}.
std::vector<QueryPrediction> read_predictions(std::istream& in);

struct QueryBreakdown {
  std::string query_id;
  std::vector<double> gold_scores;
  std::vector<double> pred_scores;
  std::size_t sentences = 0;
  std::optional<int> detected;   // empty when the query was skipped
  std::optional<double> ndcg;    // empty unless the query has 4 answers
};

struct EvalReport {
  double f1_incorrect = 0.0;
  double f1_correct = 0.0;
  double f1_overall = 0.0;
  double recall = 0.0;
  double detection_rate = 0.0;
  double ndcg_at_4 = 0.0;

  Confusion confusion;
  std::size_t queries = 0;
  std::size_t answers = 0;
  std::size_t detection_evaluated = 0;
  std::size_t detection_hits = 0;
  std::size_t detection_skipped = 0;
  std::size_t ndcg_evaluated = 0;
  std::size_t ndcg_skipped = 0;
  double ndcg_sum = 0.0;

  std::vector<QueryBreakdown> per_query;
};

/// Scores predictions against the dataset's gold correctness labels.
/// Predictions are matched by query_id/answer_id and must cover every
/// answer with the same sentence count; otherwise Error(kAlignment).
EvalReport compile_report(const std::vector<QueryRecord>& dataset,
                          const std::vector<QueryPrediction>& predictions);

std::string report_to_json(const EvalReport& report, int indent = 2);
/// Reads the headline metrics and counts back; per-query rows are dropped.
EvalReport report_from_json(std::string_view text);

/// Plain-text table with one column per named report, rows mirroring the
/// reward-model comparison layout.
std::string format_report_table(const std::vector<std::pair<std::string, EvalReport>>& reports);

}  // namespace trm
