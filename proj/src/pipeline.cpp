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

#include "trm/pipeline.hpp"

#include <map>
#include <stdexcept>

#include "json.hpp"
#include "trm/error.hpp"
#include "trm/protocol.hpp"

namespace trm::pipeline {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string dump_line(const ojson& j) {
  return j.dump(-1, ' ', false, ojson::error_handler_t::replace) + '\n';
}

// Calls fn(row, line) for every non-blank line.
template <typename Fn>
void for_each_row(std::string_view jsonl, Fn fn) {
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    ++line;
    const std::string_view text = jsonl.substr(pos, end - pos);
    pos = end + 1;
    if (text.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json row = json::parse(text, nullptr, false);
    if (row.is_discarded()) throw DataError(ErrorCode::kParse, line, "", "invalid JSON");
    if (!row.is_object()) throw DataError(ErrorCode::kSchema, line, "", "expected an object");
    try {
      fn(row, line);
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(e.code(), line, "", e.what());
    } catch (const json::exception& e) {
      throw DataError(ErrorCode::kSchema, line, "", e.what());
    }
  }
}

std::string string_at(const json& row, const char* key, std::size_t line) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_string())
    throw DataError(ErrorCode::kSchema, line, key, "missing string");
  return it->get<std::string>();
}

const json& array_at(const json& row, const char* key, std::size_t line) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_array())
    throw DataError(ErrorCode::kSchema, line, key, "missing array");
  return *it;
}

int bit_of(const json& v, const std::string& field, std::size_t line) {
  if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
    throw DataError(ErrorCode::kSchema, line, field, "expected 0 or 1");
  return v.get<int>();
}

std::map<std::string, std::size_t, std::less<>> index_queries(const std::vector<QueryRecord>& ds) {
  std::map<std::string, std::size_t, std::less<>> idx;
  for (std::size_t i = 0; i < ds.size(); ++i) idx.emplace(ds[i].query_id, i);
  return idx;
}

const AnnotatedAnswer& find_answer(const std::vector<QueryRecord>& ds,
                                   const std::map<std::string, std::size_t, std::less<>>& idx,
                                   const std::string& qid, const std::string& aid, std::size_t line) {
  auto q = idx.find(qid);
  if (q == idx.end())
    throw DataError(ErrorCode::kAlignment, line, "query_id", "unknown query '" + qid + "'");
  for (const auto& a : ds[q->second].answers)
    if (a.answer_id == aid) return a;
  throw DataError(ErrorCode::kAlignment, line, "answer_id",
                  "query '" + qid + "' has no answer '" + aid + "'");
}

std::vector<TrmVerdict> verdicts_of(const json& row, std::size_t line) {
  std::vector<TrmVerdict> out;
  const json& arr = array_at(row, "verdicts", line);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string field = "verdicts[" + std::to_string(k) + "]";
    const json& v = arr[k];
    if (!v.is_object()) throw DataError(ErrorCode::kSchema, line, field, "expected an object");
    TrmVerdict t;
    t.faithfulness = bit_of(v.value("faithfulness", json()), field + ".faithfulness", line);
    t.correctness = bit_of(v.value("correctness", json()), field + ".correctness", line);
    t.reason = v.value("reason", std::string());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::string segmentation_json(std::string_view answer_text) {
  const SegmentedAnswer seg = segment(answer_text);
  ojson j = ojson::object();
  ojson segs = ojson::array();
  for (const auto& s : seg.segments)
    segs.push_back(ojson{{"index", s.index}, {"text", s.text}, {"kind", segment_kind_name(s.kind)}});
  j["segments"] = std::move(segs);
  j["marked_text"] = seg.marked_text;
  return j.dump(2, ' ', false, ojson::error_handler_t::replace) + '\n';
}

std::string parse_verdict_rows(std::string_view jsonl, const std::vector<QueryRecord>* dataset) {
  std::map<std::string, std::size_t, std::less<>> idx;
  if (dataset) idx = index_queries(*dataset);
  std::string out;
  for_each_row(jsonl, [&](const json& row, std::size_t line) {
    const std::string qid = string_at(row, "query_id", line);
    const std::string aid = string_at(row, "answer_id", line);
    const std::string text = string_at(row, "output", line);
    std::size_t expected = 0;
    if (dataset) {
      expected = find_answer(*dataset, idx, qid, aid, line).segmented.segments.size();
    } else if (auto it = row.find("expected_count"); it != row.end() && it->is_number_unsigned()) {
      expected = it->get<std::size_t>();
    } else {
      throw DataError(ErrorCode::kSchema, line, "expected_count",
                      "needed when no dataset is given");
    }
    const VerdictList parsed = parse_verdicts(text, expected);
    ojson o = ojson::object();
    o["query_id"] = qid;
    o["answer_id"] = aid;
    ojson arr = ojson::array();
    for (const auto& v : parsed.verdicts)
      arr.push_back(ojson{{"faithfulness", v.faithfulness}, {"reason", v.reason},
                          {"correctness", v.correctness}});
    o["verdicts"] = std::move(arr);
    out += dump_line(o);
  });
  return out;
}

std::string trm_reward_rows(std::string_view verdict_jsonl, const std::vector<QueryRecord>& dataset,
                            const RewardConfig& cfg) {
  const auto idx = index_queries(dataset);
  std::string out;
  for_each_row(verdict_jsonl, [&](const json& row, std::size_t line) {
    const std::string qid = string_at(row, "query_id", line);
    const std::string aid = string_at(row, "answer_id", line);
    const AnnotatedAnswer& ans = find_answer(dataset, idx, qid, aid, line);
    const auto verdicts = verdicts_of(row, line);
    if (verdicts.size() != ans.labels.size())
      throw DataError(ErrorCode::kLengthMismatch, line, "verdicts",
                      std::to_string(verdicts.size()) + " verdicts for " +
                          std::to_string(ans.labels.size()) + " sentences");
    ojson o = ojson::object();
    o["query_id"] = qid;
    o["answer_id"] = aid;
    o["variant"] = reward_variant_name(cfg.variant);
    std::vector<double> rewards;
    double sum = 0.0;
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      rewards.push_back(trm_sentence_reward(verdicts[k], ans.labels[k], cfg).value);
      sum += rewards.back();
    }
    o["sentence_rewards"] = rewards;
    o["mean_reward"] = rewards.empty() ? 0.0 : sum / static_cast<double>(rewards.size());
    out += dump_line(o);
  });
  return out;
}

std::string policy_reward_rows(std::string_view jsonl, const PolicyRewardConfig& cfg) {
  std::string out;
  for_each_row(jsonl, [&](const json& row, std::size_t line) {
    const json& bits = array_at(row, "trm_bits", line);
    auto it = row.find("prefer");
    if (it == row.end()) throw DataError(ErrorCode::kSchema, line, "prefer", "missing");
    int prefer = 0;
    if (it->is_string()) {
      const std::string s = it->get<std::string>();
      if (s == "win") prefer = 1;
      else if (s == "lose") prefer = -1;
      else if (s == "tie") prefer = 0;
      else throw DataError(ErrorCode::kSchema, line, "prefer", "expected win, lose or tie");
    } else if (it->is_number_integer()) {
      prefer = it->get<int>();
    } else {
      throw DataError(ErrorCode::kSchema, line, "prefer", "expected -1, 0, 1 or a duel result");
    }
    ojson o = ojson::object();
    o["query_id"] = row.value("query_id", std::string());
    o["rollout_id"] = row.value("rollout_id", std::string());
    o["beta"] = cfg.beta;
    std::vector<double> rewards;
    for (std::size_t k = 0; k < bits.size(); ++k)
      rewards.push_back(policy_sentence_reward(
          bit_of(bits[k], "trm_bits[" + std::to_string(k) + "]", line), prefer, cfg));
    o["sentence_rewards"] = rewards;
    out += dump_line(o);
  });
  return out;
}

std::string anchor_rows(std::string_view verdict_jsonl, const std::vector<QueryRecord>& dataset) {
  const auto idx = index_queries(dataset);
  // Per query, per answer index: predicted correctness bits.
  std::vector<std::map<std::size_t, std::vector<int>>> scored(dataset.size());
  for_each_row(verdict_jsonl, [&](const json& row, std::size_t line) {
    const std::string qid = string_at(row, "query_id", line);
    const std::string aid = string_at(row, "answer_id", line);
    find_answer(dataset, idx, qid, aid, line);
    const std::size_t q = idx.find(qid)->second;
    std::vector<int> bits;
    for (const auto& v : verdicts_of(row, line)) bits.push_back(v.correctness);
    scored[q][dataset[q].answer_index(aid)] = std::move(bits);
  });
  std::string out;
  for (std::size_t q = 0; q < dataset.size(); ++q) {
    ojson o = ojson::object();
    o["query_id"] = dataset[q].query_id;
    std::vector<std::vector<int>> rows;
    std::vector<std::size_t> answer_of_row;
    for (auto& [a, bits] : scored[q]) {
      rows.push_back(bits);
      answer_of_row.push_back(a);
    }
    try {
      const std::size_t pick = answer_of_row.at(select_anchor_index(rows));
      o["answer_id"] = dataset[q].answers[pick].answer_id;
      o["answer_index"] = pick;
    } catch (const Error& e) {
      o["error"] = rows.empty() ? "no verdicts for this query" : e.what();
    } catch (const std::out_of_range&) {
      o["error"] = "no verdicts for this query";
    }
    out += dump_line(o);
  }
  return out;
}

std::string advantage_rows(std::string_view groups_jsonl, const AdvantageOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  ojson header = ojson::object();
  header["mode"] = aggregation_name(opts.aggregation);
  header["epsilon"] = opts.epsilon;
  header["kl_coefficient"] = opts.kl_coefficient;
  header["credit_policy"] = credit_policy_name(opts.credit);
  std::string out = dump_line(header);
  for_each_row(groups_jsonl, [&](const json& row, std::size_t line) {
    RolloutGroup g;
    g.query_id = row.value("query_id", std::string());
    const json& rollouts = array_at(row, "rollouts", line);
    for (std::size_t j = 0; j < rollouts.size(); ++j) {
      const json& rj = rollouts[j];
      const std::string field = "rollouts[" + std::to_string(j) + "]";
      if (!rj.is_object()) throw DataError(ErrorCode::kSchema, line, field, "expected an object");
      Rollout r;
      r.rollout_id = rj.value("rollout_id", std::to_string(j));
      for (const auto& v : rj.at("sentence_rewards")) r.sentence_rewards.push_back(v.get<double>());
      if (auto it = rj.find("sentence_token_spans"); it != rj.end()) {
        for (const auto& s : *it) {
          if (!s.is_array() || s.size() != 2)
            throw DataError(ErrorCode::kSchema, line, field + ".sentence_token_spans",
                            "each span is [start, end]");
          r.sentence_token_spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
        }
      }
      r.token_count = rj.value("token_count", std::size_t{0});
      g.rollouts.push_back(std::move(r));
    }
    for (const auto& rec : group_credit(g, opts.aggregation, opts.credit, opts.epsilon)) {
      ojson o = ojson::object();
      o["query_id"] = g.query_id;
      o["rollout_id"] = rec.rollout_id;
      o["scalar_reward"] = rec.scalar_reward;
      o["advantage"] = rec.advantage;
      o["token_credit"] = rec.token_credit;
      out += dump_line(o);
    }
  });
  return out;
}

std::vector<std::string> answers_by_query(std::string_view jsonl,
                                          const std::vector<QueryRecord>& dataset) {
  const auto idx = index_queries(dataset);
  std::vector<std::string> out(dataset.size());
  std::vector<bool> seen(dataset.size(), false);
  for_each_row(jsonl, [&](const json& row, std::size_t line) {
    const std::string qid = string_at(row, "query_id", line);
    auto q = idx.find(qid);
    if (q == idx.end())
      throw DataError(ErrorCode::kAlignment, line, "query_id", "unknown query '" + qid + "'");
    if (seen[q->second])
      throw DataError(ErrorCode::kAlignment, line, "query_id", "repeated query '" + qid + "'");
    seen[q->second] = true;
    out[q->second] = string_at(row, "answer_text", line);
  });
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (!seen[i])
      throw Error(ErrorCode::kAlignment, "no answer row for query '" + dataset[i].query_id + "'");
  return out;
}

}  // namespace trm::pipeline
