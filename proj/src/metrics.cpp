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

#include "trm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <unordered_map>

#include "json.hpp"
#include "trm/error.hpp"

namespace trm {
namespace {

using ojson = nlohmann::ordered_json;

void require_nonempty(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "metric needs at least one item");
}

void require_bit(int b, const char* what) {
  if (b != 0 && b != 1) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be 0 or 1");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }
ojson optional_json(const std::optional<int>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::size_t Confusion::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

Confusion& Confusion::operator+=(const Confusion& other) {
  for (int g = 0; g < 2; ++g)
    for (int p = 0; p < 2; ++p) counts[g][p] += other.counts[g][p];
  return *this;
}

double Confusion::f1(int target) const {
  const int other = 1 - target;
  const std::size_t tp = counts[target][target];
  const std::size_t fp = counts[other][target];
  const std::size_t fn = counts[target][other];
  return ratio(2 * tp, 2 * tp + fp + fn);
}

double Confusion::f1_weighted() const {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  const double w0 = static_cast<double>(support(0));
  const double w1 = static_cast<double>(support(1));
  return (w0 * f1(0) + w1 * f1(1)) / static_cast<double>(n);
}

double Confusion::accuracy() const { return ratio(counts[0][0] + counts[1][1], total()); }

Confusion confusion_of(std::span<const LabeledPair> pairs) {
  Confusion c;
  for (const auto& p : pairs) {
    require_bit(p.gold, "gold label");
    require_bit(p.pred, "predicted label");
    c.add(p.gold, p.pred);
  }
  return c;
}

double f1_for_label(std::span<const LabeledPair> pairs, int target) {
  require_nonempty(pairs.size());
  require_bit(target, "target");
  return confusion_of(pairs).f1(target);
}

double f1_overall(std::span<const LabeledPair> pairs) {
  require_nonempty(pairs.size());
  return confusion_of(pairs).f1_weighted();
}

double recall_overall(std::span<const LabeledPair> pairs) {
  require_nonempty(pairs.size());
  return confusion_of(pairs).accuracy();
}

double answer_score(std::span<const int> labels) {
  require_nonempty(labels.size());
  std::size_t correct = 0;
  for (int b : labels) {
    require_bit(b, "correctness label");
    correct += static_cast<std::size_t>(b);
  }
  return ratio(correct, labels.size());
}

int detect_worst(std::span<const double> gold_scores, std::span<const double> pred_scores) {
  if (gold_scores.size() != pred_scores.size())
    throw Error(ErrorCode::kInvalidArgument, "gold and predicted score counts differ");
  if (gold_scores.size() < 2)
    throw Error(ErrorCode::kInvalidArgument, "worst-answer detection needs at least 2 answers");
  const double gold_min = *std::min_element(gold_scores.begin(), gold_scores.end());
  const auto gold_hits = std::count(gold_scores.begin(), gold_scores.end(), gold_min);
  if (gold_hits != 1) throw Error(ErrorCode::kDegenerateQuery, "gold worst answer is not unique");
  const std::size_t gold_worst = static_cast<std::size_t>(
      std::find(gold_scores.begin(), gold_scores.end(), gold_min) - gold_scores.begin());
  const double pred_min = *std::min_element(pred_scores.begin(), pred_scores.end());
  return pred_scores[gold_worst] == pred_min ? 1 : 0;
}

double ndcg_at_4(std::span<const double> gold_scores, std::span<const double> pred_scores) {
  if (gold_scores.size() != 4 || pred_scores.size() != 4)
    throw Error(ErrorCode::kWrongArity, "NDCG@4 needs exactly 4 answers, got " +
                                            std::to_string(gold_scores.size()));
  std::array<std::size_t, 4> order = {0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred_scores[a] > pred_scores[b]; });
  std::array<double, 4> ideal = {gold_scores[0], gold_scores[1], gold_scores[2], gold_scores[3]};
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    const double discount = std::log2(static_cast<double>(r) + 2.0);
    dcg += gold_scores[order[r]] / discount;
    idcg += ideal[r] / discount;
  }
  if (idcg == 0.0) return 1.0;
  return dcg / idcg;
}

std::vector<QueryPrediction> read_predictions(std::istream& in) {
  std::vector<QueryPrediction> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const ojson j = ojson::parse(line, nullptr, false);
    if (j.is_discarded()) throw DataError(ErrorCode::kParse, n, "", "invalid JSON");
    auto fail = [&](const std::string& field, const std::string& why) {
      throw DataError(ErrorCode::kSchema, n, field, why);
    };
    if (!j.is_object()) fail("", "expected an object");
    QueryPrediction q;
    if (!j.contains("query_id") || !j["query_id"].is_string()) fail("query_id", "missing string");
    q.query_id = j["query_id"].get<std::string>();
    if (!j.contains("answers") || !j["answers"].is_array()) fail("answers", "missing array");
    for (std::size_t a = 0; a < j["answers"].size(); ++a) {
      const auto& aj = j["answers"][a];
      const std::string path = "answers[" + std::to_string(a) + "].";
      if (!aj.is_object()) fail(path, "expected an object");
      AnswerPrediction ap;
      if (!aj.contains("answer_id") || !aj["answer_id"].is_string()) fail(path + "answer_id", "missing string");
      ap.answer_id = aj["answer_id"].get<std::string>();
      if (!aj.contains("correctness") || !aj["correctness"].is_array())
        fail(path + "correctness", "missing array");
      for (const auto& b : aj["correctness"]) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1))
          fail(path + "correctness", "labels must be 0 or 1");
        ap.correctness.push_back(b.get<int>());
      }
      q.answers.push_back(std::move(ap));
    }
    out.push_back(std::move(q));
  }
  return out;
}

EvalReport compile_report(const std::vector<QueryRecord>& dataset,
                          const std::vector<QueryPrediction>& predictions) {
  std::unordered_map<std::string, const QueryPrediction*> by_query;
  for (const auto& p : predictions) {
    if (!by_query.emplace(p.query_id, &p).second)
      throw Error(ErrorCode::kAlignment, "duplicate prediction for query '" + p.query_id + "'");
  }

  EvalReport rep;
  for (const auto& rec : dataset) {
    auto it = by_query.find(rec.query_id);
    if (it == by_query.end())
      throw Error(ErrorCode::kAlignment, "no prediction for query '" + rec.query_id + "'");
    const QueryPrediction& qp = *it->second;
    if (qp.answers.size() != rec.answers.size())
      throw Error(ErrorCode::kAlignment, "query '" + rec.query_id + "': " +
                                             std::to_string(qp.answers.size()) +
                                             " predicted answers vs " +
                                             std::to_string(rec.answers.size()));
    QueryBreakdown qb;
    qb.query_id = rec.query_id;
    for (const auto& ans : rec.answers) {
      const auto pit = std::find_if(qp.answers.begin(), qp.answers.end(),
                                    [&](const AnswerPrediction& a) { return a.answer_id == ans.answer_id; });
      if (pit == qp.answers.end())
        throw Error(ErrorCode::kAlignment, "query '" + rec.query_id + "': no prediction for answer '" +
                                               ans.answer_id + "'");
      if (pit->correctness.size() != ans.labels.size())
        throw Error(ErrorCode::kAlignment,
                    "query '" + rec.query_id + "' answer '" + ans.answer_id + "': " +
                        std::to_string(pit->correctness.size()) + " predicted labels vs " +
                        std::to_string(ans.labels.size()) + " sentences");
      std::vector<int> gold;
      gold.reserve(ans.labels.size());
      for (std::size_t k = 0; k < ans.labels.size(); ++k) {
        gold.push_back(ans.labels[k].correctness);
        rep.confusion.add(ans.labels[k].correctness, pit->correctness[k]);
      }
      qb.sentences += gold.size();
      qb.gold_scores.push_back(answer_score(gold));
      qb.pred_scores.push_back(answer_score(pit->correctness));
    }

    if (qb.gold_scores.size() >= 2) {
      try {
        qb.detected = detect_worst(qb.gold_scores, qb.pred_scores);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateQuery) throw;
      }
    }
    if (qb.detected) {
      ++rep.detection_evaluated;
      rep.detection_hits += static_cast<std::size_t>(*qb.detected);
    } else {
      ++rep.detection_skipped;
    }
    if (qb.gold_scores.size() == 4) {
      qb.ndcg = ndcg_at_4(qb.gold_scores, qb.pred_scores);
      ++rep.ndcg_evaluated;
      rep.ndcg_sum += *qb.ndcg;
    } else {
      ++rep.ndcg_skipped;
    }
    ++rep.queries;
    rep.answers += rec.answers.size();
    rep.per_query.push_back(std::move(qb));
  }

  rep.f1_incorrect = rep.confusion.f1(0);
  rep.f1_correct = rep.confusion.f1(1);
  rep.f1_overall = rep.confusion.f1_weighted();
  rep.recall = rep.confusion.accuracy();
  rep.detection_rate = ratio(rep.detection_hits, rep.detection_evaluated);
  rep.ndcg_at_4 = rep.ndcg_evaluated == 0 ? 0.0 : rep.ndcg_sum / static_cast<double>(rep.ndcg_evaluated);
  return rep;
}

std::string report_to_json(const EvalReport& r, int indent) {
  ojson j = ojson::object();
  j["f1_incorrect"] = r.f1_incorrect;
  j["f1_correct"] = r.f1_correct;
  j["f1_overall"] = r.f1_overall;
  j["recall"] = r.recall;
  j["detection_rate"] = r.detection_rate;
  j["ndcg_at_4"] = r.ndcg_at_4;
  ojson conf = ojson::object();
  conf["gold0_pred0"] = r.confusion.counts[0][0];
  conf["gold0_pred1"] = r.confusion.counts[0][1];
  conf["gold1_pred0"] = r.confusion.counts[1][0];
  conf["gold1_pred1"] = r.confusion.counts[1][1];
  j["confusion"] = std::move(conf);
  ojson counts = ojson::object();
  counts["queries"] = r.queries;
  counts["answers"] = r.answers;
  counts["sentences"] = r.confusion.total();
  counts["detection_evaluated"] = r.detection_evaluated;
  counts["detection_hits"] = r.detection_hits;
  counts["detection_skipped"] = r.detection_skipped;
  counts["ndcg_evaluated"] = r.ndcg_evaluated;
  counts["ndcg_skipped"] = r.ndcg_skipped;
  j["counts"] = std::move(counts);
  ojson rows = ojson::array();
  for (const auto& q : r.per_query) {
    ojson row = ojson::object();
    row["query_id"] = q.query_id;
    row["sentences"] = q.sentences;
    row["gold_scores"] = q.gold_scores;
    row["pred_scores"] = q.pred_scores;
    row["detected"] = optional_json(q.detected);
    row["ndcg"] = optional_json(q.ndcg);
    rows.push_back(std::move(row));
  }
  j["per_query"] = std::move(rows);
  return j.dump(indent);
}

EvalReport report_from_json(std::string_view text) {
  const ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorCode::kParse, "report is not a JSON object");
  EvalReport r;
  try {
    r.f1_incorrect = j.at("f1_incorrect").get<double>();
    r.f1_correct = j.at("f1_correct").get<double>();
    r.f1_overall = j.at("f1_overall").get<double>();
    r.recall = j.at("recall").get<double>();
    r.detection_rate = j.at("detection_rate").get<double>();
    r.ndcg_at_4 = j.at("ndcg_at_4").get<double>();
    if (auto c = j.find("confusion"); c != j.end()) {
      r.confusion.counts[0][0] = c->at("gold0_pred0").get<std::size_t>();
      r.confusion.counts[0][1] = c->at("gold0_pred1").get<std::size_t>();
      r.confusion.counts[1][0] = c->at("gold1_pred0").get<std::size_t>();
      r.confusion.counts[1][1] = c->at("gold1_pred1").get<std::size_t>();
    }
    if (auto c = j.find("counts"); c != j.end()) {
      r.queries = c->value("queries", std::size_t{0});
      r.answers = c->value("answers", std::size_t{0});
      r.detection_evaluated = c->value("detection_evaluated", std::size_t{0});
      r.detection_hits = c->value("detection_hits", std::size_t{0});
      r.detection_skipped = c->value("detection_skipped", std::size_t{0});
      r.ndcg_evaluated = c->value("ndcg_evaluated", std::size_t{0});
      r.ndcg_skipped = c->value("ndcg_skipped", std::size_t{0});
    }
    if (auto pq = j.find("per_query"); pq != j.end()) {
      for (const auto& row : *pq) {
        QueryBreakdown q;
        q.query_id = row.at("query_id").get<std::string>();
        q.sentences = row.at("sentences").get<std::size_t>();
        q.gold_scores = row.at("gold_scores").get<std::vector<double>>();
        q.pred_scores = row.at("pred_scores").get<std::vector<double>>();
        if (const auto& d = row.at("detected"); !d.is_null()) q.detected = d.get<int>();
        if (const auto& n = row.at("ndcg"); !n.is_null()) q.ndcg = n.get<double>();
        r.per_query.push_back(std::move(q));
      }
    }
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("report: ") + e.what());
  }
  r.ndcg_sum = r.ndcg_at_4 * static_cast<double>(r.ndcg_evaluated);
  if (!r.per_query.empty()) {
    r.ndcg_sum = 0.0;
    for (const auto& q : r.per_query)
      if (q.ndcg) r.ndcg_sum += *q.ndcg;
  }
  return r;
}

std::string format_report_table(const std::vector<std::pair<std::string, EvalReport>>& reports) {
  struct Row {
    const char* label;
    double EvalReport::*field;
  };
  static constexpr Row kRows[] = {
      {"F1 (incorrect)", &EvalReport::f1_incorrect}, {"Detection", &EvalReport::detection_rate},
      {"F1 (overall)", &EvalReport::f1_overall},     {"F1 (correct)", &EvalReport::f1_correct},
      {"Recall", &EvalReport::recall},               {"NDCG@4", &EvalReport::ndcg_at_4},
  };
  std::size_t col = 8;
  for (const auto& [name, _] : reports) col = std::max(col, name.size());
  auto pad_left = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
  };
  std::string out = "Metric          ";
  for (const auto& [name, _] : reports) out += "  " + pad_left(name, col);
  out += '\n';
  for (const auto& row : kRows) {
    std::string label = row.label;
    label.resize(16, ' ');
    out += label;
    for (const auto& [_, rep] : reports) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", rep.*row.field);
      out += "  " + pad_left(buf, col);
    }
    out += '\n';
  }
  return out;
}

}  // namespace trm
