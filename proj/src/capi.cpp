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

#include "trm/trm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

#include "json.hpp"
#include "trm/dataset.hpp"
#include "trm/error.hpp"
#include "trm/grpo.hpp"
#include "trm/judge.hpp"
#include "trm/metrics.hpp"
#include "trm/pipeline.hpp"
#include "trm/prompts.hpp"
#include "trm/protocol.hpp"
#include "trm/reward.hpp"
#include "trm/segmenter.hpp"
#include "trm/sim.hpp"

struct trm_context {
  trm::PromptLibrary prompts;
};

struct trm_dataset {
  std::vector<trm::QueryRecord> records;
};

struct trm_judge {
  std::unique_ptr<trm::JudgeGateway> gateway;
};

struct trm_buffer {
  std::string data;
};

namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

thread_local std::string g_last_error;
thread_local std::size_t g_last_error_line = 0;

trm_status status_of(trm::ErrorCode code) {
  return static_cast<trm_status>(static_cast<int>(code) + 1);
}

trm_status fail(trm_status s, std::string message, std::size_t line = 0) {
  g_last_error = std::move(message);
  g_last_error_line = line;
  return s;
}

// Runs fn and converts any exception into a status plus thread-local message.
template <typename Fn>
trm_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  g_last_error_line = 0;
  try {
    fn();
    return TRM_OK;
  } catch (const trm::DataError& e) {
    return fail(status_of(e.code()), e.what(), e.line());
  } catch (const trm::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(TRM_E_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TRM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TRM_E_INTERNAL, e.what());
  } catch (...) {
    return fail(TRM_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw trm::Error(trm::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void emit(char** out, const std::string& s) {
  require(out != nullptr, "output pointer is null");
  *out = dup_string(s);
}

std::string_view view(const char* data, std::size_t len) {
  require(data != nullptr || len == 0, "input buffer is null");
  return data ? std::string_view(data, len) : std::string_view();
}

const trm::QueryRecord& record_at(const trm_dataset* ds, std::size_t i) {
  require(ds != nullptr, "dataset is null");
  if (i >= ds->records.size())
    throw trm::Error(trm::ErrorCode::kInvalidArgument, "record index out of range");
  return ds->records[i];
}

const trm::PromptLibrary& prompts_of(const trm_context* ctx) {
  return ctx ? ctx->prompts : trm::PromptLibrary::builtin();
}

std::vector<trm::LabeledPair> pairs_of(const int* gold, const int* pred, std::size_t n) {
  require(n == 0 || (gold && pred), "label array is null");
  std::vector<trm::LabeledPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {gold[i], pred[i]};
  return pairs;
}

trm::RewardConfig reward_config_of(const trm_reward_config* cfg) {
  require(cfg != nullptr, "reward config is null");
  trm::RewardConfig rc;
  rc.alpha = cfg->alpha;
  rc.bonus_hit = cfg->bonus_hit;
  rc.penalty_miss = cfg->penalty_miss;
  rc.variant = trm::RewardVariant::kCustom;
  return rc;
}

void require_known_keys(const json& j, std::initializer_list<std::string_view> keys,
                        const char* what) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw trm::Error(trm::ErrorCode::kInvalidArgument,
                       std::string("unknown ") + what + " key '" + k + "'");
  }
}

trm::ChatEndpointConfig endpoint_of(const char* endpoint_json) {
  trm::ChatEndpointConfig cfg;
  if (!endpoint_json || !*endpoint_json) return cfg;
  const json j = json::parse(endpoint_json);
  require(j.is_object(), "endpoint config must be a JSON object");
  require_known_keys(j, {"base_url", "model_name", "api_key_env", "timeout_ms", "max_retries",
                         "temperature", "top_k", "backoff_ms", "max_in_flight"},
                     "endpoint");
  cfg.base_url = j.value("base_url", cfg.base_url);
  cfg.model_name = j.value("model_name", cfg.model_name);
  cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
  cfg.timeout = std::chrono::milliseconds(j.value("timeout_ms", cfg.timeout.count()));
  cfg.max_retries = j.value("max_retries", cfg.max_retries);
  cfg.temperature = j.value("temperature", cfg.temperature);
  cfg.top_k = j.value("top_k", cfg.top_k);
  cfg.backoff = std::chrono::milliseconds(j.value("backoff_ms", cfg.backoff.count()));
  cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
  return cfg;
}

class CallbackTransport : public trm::ChatTransport {
 public:
  CallbackTransport(trm_transport_fn fn, void* user) : fn_(fn), user_(user) {}
  std::string complete(const trm::ChatRequest& request) override {
    trm_buffer buf;
    const std::string body = trm::chat_request_body(request);
    if (fn_(user_, body.c_str(), &buf) != 0)
      throw trm::Error(trm::ErrorCode::kTransport, "transport callback reported failure");
    return buf.data;
  }

 private:
  trm_transport_fn fn_;
  void* user_;
};

ojson verdict_json(const trm::CorrectnessVerdict& v) {
  ojson o = ojson::object();
  o["error_ratio"] = v.error_ratio;
  o["derived_score"] = v.derived_score;
  o["fully_correct"] = v.fully_correct;
  o["error_analysis"] = v.error_analysis;
  return o;
}

ojson duel_json(const trm::DuelOutcome& d) {
  ojson o = ojson::object();
  o["result"] = trm::duel_result_name(d.result);
  o["preferred"] = {d.orders.first, d.orders.second};
  return o;
}

trm::SimConfig sim_config_of(const char* config_json) {
  trm::SimConfig c;
  if (!config_json || !*config_json) return c;
  const json j = json::parse(config_json);
  require(j.is_object(), "simulation config must be a JSON object");
  require_known_keys(j, {"class_prior_correct", "faith_correct_coupling", "steps", "learning_rate",
                         "seed", "variant", "batch_size", "signal_strength", "init_correct_logit",
                         "init_faith_logit", "test_seed"},
                     "simulation");
  c.class_prior_correct = j.value("class_prior_correct", c.class_prior_correct);
  c.faith_correct_coupling = j.value("faith_correct_coupling", c.faith_correct_coupling);
  c.steps = j.value("steps", c.steps);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  if (auto it = j.find("variant"); it != j.end())
    c.variant = trm::RewardConfig::preset(trm::parse_reward_variant(it->get<std::string>()));
  c.batch_size = j.value("batch_size", c.batch_size);
  c.signal_strength = j.value("signal_strength", c.signal_strength);
  c.init_correct_logit = j.value("init_correct_logit", c.init_correct_logit);
  c.init_faith_logit = j.value("init_faith_logit", c.init_faith_logit);
  c.test_seed = j.value("test_seed", c.test_seed);
  return c;
}

}  // namespace

extern "C" {

const char* trm_version(void) { return TRMKIT_VERSION; }

const char* trm_status_name(trm_status status) {
  if (status == TRM_OK) return "ok";
  if (status == TRM_E_INTERNAL) return "internal";
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(trm::ErrorCode::kIo)) return "unknown";
  return trm::error_code_name(static_cast<trm::ErrorCode>(code));
}

const char* trm_last_error(void) { return g_last_error.c_str(); }
size_t trm_last_error_line(void) { return g_last_error_line; }
void trm_string_free(char* s) { std::free(s); }

trm_status trm_context_new(const char* prompt_dir, trm_context** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    auto ctx = std::make_unique<trm_context>();
    ctx->prompts = prompt_dir && *prompt_dir ? trm::PromptLibrary::from_directory(prompt_dir)
                                             : trm::PromptLibrary::builtin();
    *out = ctx.release();
  });
}

void trm_context_free(trm_context* ctx) { delete ctx; }

trm_status trm_context_prompt_version(const trm_context* ctx, char** out) {
  return guarded([&] { emit(out, prompts_of(ctx).version()); });
}

trm_status trm_segment(const char* text, size_t len, char** out_json) {
  return guarded([&] { emit(out_json, trm::pipeline::segmentation_json(view(text, len))); });
}

trm_status trm_strip_markers(const char* marked, size_t len, char** out_text) {
  return guarded([&] { emit(out_text, trm::strip_markers(view(marked, len))); });
}

trm_status trm_dataset_load(const char* path, trm_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto ds = std::make_unique<trm_dataset>();
    ds->records = trm::load_dataset(path);
    *out = ds.release();
  });
}

trm_status trm_dataset_parse(const char* jsonl, size_t len, trm_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    std::istringstream in{std::string(view(jsonl, len))};
    auto ds = std::make_unique<trm_dataset>();
    ds->records = trm::read_dataset(in);
    *out = ds.release();
  });
}

void trm_dataset_free(trm_dataset* ds) { delete ds; }

size_t trm_dataset_size(const trm_dataset* ds) { return ds ? ds->records.size() : 0; }

trm_status trm_dataset_record(const trm_dataset* ds, size_t index, char** out_json) {
  return guarded([&] { emit(out_json, trm::serialize_record(record_at(ds, index))); });
}

trm_status trm_dataset_find(const trm_dataset* ds, const char* query_id, size_t* out_index) {
  return guarded([&] {
    require(ds && query_id && out_index, "null argument");
    for (std::size_t i = 0; i < ds->records.size(); ++i) {
      if (ds->records[i].query_id == query_id) {
        *out_index = i;
        return;
      }
    }
    throw trm::Error(trm::ErrorCode::kInvalidArgument,
                     std::string("no query '") + query_id + "'");
  });
}

trm_status trm_dataset_stats(const trm_dataset* ds, char** out_json) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    const trm::DatasetStats s = trm::compute_stats(ds->records);
    ojson o = ojson::object();
    o["queries"] = s.queries;
    o["answers"] = s.answers;
    o["sentences"] = s.sentences;
    o["positive_sentences"] = s.positive_sentences;
    o["positive_fraction"] = s.positive_fraction;
    o["negative_fraction"] = s.negative_fraction;
    emit(out_json, o.dump(2));
  });
}

trm_status trm_dataset_validate(const char* jsonl, size_t len, char** out_json) {
  return guarded([&] {
    std::istringstream in{std::string(view(jsonl, len))};
    const trm::DatasetValidation v = trm::validate_dataset(in);
    ojson o = ojson::object();
    o["valid_records"] = v.valid_records;
    ojson issues = ojson::array();
    for (const auto& i : v.issues)
      issues.push_back(ojson{{"line", i.line},
                             {"field", i.field},
                             {"code", trm::error_code_name(i.code)},
                             {"message", i.message}});
    o["issues"] = std::move(issues);
    emit(out_json, o.dump(2, ' ', false, ojson::error_handler_t::replace));
  });
}

trm_status trm_build_trm_prompt(const trm_context* ctx, const trm_dataset* ds, size_t record,
                                size_t answer, char** out) {
  return guarded(
      [&] { emit(out, trm::build_trm_prompt(record_at(ds, record), answer, prompts_of(ctx))); });
}

trm_status trm_build_policy_prompt(const trm_context* ctx, const trm_dataset* ds, size_t record,
                                   char** out) {
  return guarded(
      [&] { emit(out, trm::build_policy_prompt(record_at(ds, record), prompts_of(ctx))); });
}

trm_status trm_parse_verdicts(const char* output, size_t len, size_t expected_count,
                              char** out_json) {
  return guarded([&] {
    const trm::VerdictList list = trm::parse_verdicts(view(output, len), expected_count);
    ojson arr = ojson::array();
    for (const auto& v : list.verdicts)
      arr.push_back(ojson{{"faithfulness", v.faithfulness}, {"reason", v.reason},
                          {"correctness", v.correctness}});
    emit(out_json, arr.dump(-1, ' ', false, ojson::error_handler_t::replace));
  });
}

trm_status trm_parse_verdict_rows(const trm_dataset* ds, const char* jsonl, size_t len,
                                  char** out_jsonl) {
  return guarded([&] {
    emit(out_jsonl,
         trm::pipeline::parse_verdict_rows(view(jsonl, len), ds ? &ds->records : nullptr));
  });
}

trm_status trm_reward_preset(const char* name, trm_reward_config* out) {
  return guarded([&] {
    require(name && out, "null argument");
    const trm::RewardConfig rc = trm::RewardConfig::preset(trm::parse_reward_variant(name));
    *out = {rc.alpha, rc.bonus_hit, rc.penalty_miss};
  });
}

trm_status trm_sentence_reward(int pred_faithfulness, int pred_correctness, int gold_faithfulness,
                               int gold_correctness, const trm_reward_config* cfg, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    for (int b : {pred_faithfulness, pred_correctness, gold_faithfulness, gold_correctness})
      require(b == 0 || b == 1, "labels must be 0 or 1");
    trm::TrmVerdict pred;
    pred.faithfulness = pred_faithfulness;
    pred.correctness = pred_correctness;
    trm::SentenceLabel gold;
    gold.faithfulness = gold_faithfulness;
    gold.correctness = gold_correctness;
    *out = trm::trm_sentence_reward(pred, gold, reward_config_of(cfg)).value;
  });
}

trm_status trm_policy_reward(int trm_bit, int prefer, double beta, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = trm::policy_sentence_reward(trm_bit, prefer, trm::PolicyRewardConfig{beta});
  });
}

trm_status trm_select_anchor(const int* bits, const size_t* lengths, size_t n_answers,
                             size_t* out_index) {
  return guarded([&] {
    require(out_index != nullptr && (n_answers == 0 || lengths != nullptr), "null argument");
    std::vector<std::vector<int>> rows(n_answers);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < n_answers; ++i) {
      require(lengths[i] == 0 || bits != nullptr, "bits array is null");
      rows[i].assign(bits + offset, bits + offset + lengths[i]);
      offset += lengths[i];
    }
    *out_index = trm::select_anchor_index(rows);
  });
}

trm_status trm_reward_rows(const trm_dataset* ds, const char* verdict_jsonl, size_t len,
                           const trm_reward_config* cfg, const char* variant_name,
                           char** out_jsonl) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    trm::RewardConfig rc = reward_config_of(cfg);
    if (variant_name && *variant_name) rc.variant = trm::parse_reward_variant(variant_name);
    emit(out_jsonl, trm::pipeline::trm_reward_rows(view(verdict_jsonl, len), ds->records, rc));
  });
}

trm_status trm_policy_reward_rows(const char* jsonl, size_t len, double beta, char** out_jsonl) {
  return guarded([&] {
    emit(out_jsonl,
         trm::pipeline::policy_reward_rows(view(jsonl, len), trm::PolicyRewardConfig{beta}));
  });
}

trm_status trm_anchor_rows(const trm_dataset* ds, const char* verdict_jsonl, size_t len,
                           char** out_jsonl) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    emit(out_jsonl, trm::pipeline::anchor_rows(view(verdict_jsonl, len), ds->records));
  });
}

trm_status trm_group_advantages(const double* scalars, size_t n, double epsilon, double* out) {
  return guarded([&] {
    require(n == 0 || (scalars && out), "null argument");
    const auto adv = trm::group_advantages(std::span<const double>(scalars, n), epsilon);
    std::copy(adv.begin(), adv.end(), out);
  });
}

trm_status trm_advantage_rows(const char* groups_jsonl, size_t len, const char* aggregation,
                              const char* credit, double epsilon, double kl_coefficient,
                              char** out_jsonl) {
  return guarded([&] {
    trm::pipeline::AdvantageOptions opts;
    if (aggregation) opts.aggregation = trm::parse_aggregation(aggregation);
    if (credit) opts.credit = trm::parse_credit_policy(credit);
    opts.epsilon = epsilon;
    opts.kl_coefficient = kl_coefficient;
    emit(out_jsonl, trm::pipeline::advantage_rows(view(groups_jsonl, len), opts));
  });
}

trm_status trm_f1_for_label(const int* gold, const int* pred, size_t n, int target, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = trm::f1_for_label(pairs_of(gold, pred, n), target);
  });
}

trm_status trm_f1_overall(const int* gold, const int* pred, size_t n, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = trm::f1_overall(pairs_of(gold, pred, n));
  });
}

trm_status trm_recall_overall(const int* gold, const int* pred, size_t n, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = trm::recall_overall(pairs_of(gold, pred, n));
  });
}

trm_status trm_answer_score(const int* labels, size_t n, double* out) {
  return guarded([&] {
    require(out != nullptr && (n == 0 || labels), "null argument");
    *out = trm::answer_score(std::span<const int>(labels, n));
  });
}

trm_status trm_detect_worst(const double* gold_scores, const double* pred_scores, size_t n,
                            int* out) {
  return guarded([&] {
    require(out != nullptr && (n == 0 || (gold_scores && pred_scores)), "null argument");
    *out = trm::detect_worst(std::span<const double>(gold_scores, n),
                             std::span<const double>(pred_scores, n));
  });
}

trm_status trm_ndcg_at_4(const double* gold_scores, const double* pred_scores, double* out) {
  return guarded([&] {
    require(gold_scores && pred_scores && out, "null argument");
    *out = trm::ndcg_at_4(std::span<const double>(gold_scores, 4),
                          std::span<const double>(pred_scores, 4));
  });
}

trm_status trm_score(const trm_dataset* ds, const char* predictions_jsonl, size_t len,
                     char** out_report_json) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    std::istringstream in{std::string(view(predictions_jsonl, len))};
    const auto preds = trm::read_predictions(in);
    emit(out_report_json, trm::report_to_json(trm::compile_report(ds->records, preds)));
  });
}

trm_status trm_report_table(const char* reports_json, char** out_text) {
  return guarded([&] {
    require(reports_json != nullptr, "null argument");
    const json j = json::parse(reports_json);
    require(j.is_array(), "reports must be a JSON array");
    std::vector<std::pair<std::string, trm::EvalReport>> reports;
    for (const auto& e : j)
      reports.emplace_back(e.at("name").get<std::string>(),
                           trm::report_from_json(e.at("report").dump()));
    emit(out_text, trm::format_report_table(reports));
  });
}

void trm_buffer_set(trm_buffer* buf, const char* data, size_t len) {
  if (buf) buf->data.assign(data ? data : "", data ? len : 0);
}

trm_status trm_judge_new(const char* endpoint_json, const trm_context* ctx, trm_judge** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    auto j = std::make_unique<trm_judge>();
    j->gateway = std::make_unique<trm::JudgeGateway>(endpoint_of(endpoint_json), nullptr,
                                                     prompts_of(ctx));
    *out = j.release();
  });
}

trm_status trm_judge_new_with_transport(const char* endpoint_json, const trm_context* ctx,
                                        trm_transport_fn fn, void* user, trm_judge** out) {
  return guarded([&] {
    require(out != nullptr && fn != nullptr, "null argument");
    auto j = std::make_unique<trm_judge>();
    j->gateway = std::make_unique<trm::JudgeGateway>(
        endpoint_of(endpoint_json), std::make_shared<CallbackTransport>(fn, user), prompts_of(ctx));
    *out = j.release();
  });
}

void trm_judge_free(trm_judge* judge) { delete judge; }

size_t trm_judge_attempts(const trm_judge* judge) {
  return judge ? judge->gateway->attempts() : 0;
}

trm_status trm_judge_correctness(trm_judge* judge, const trm_dataset* ds, size_t record,
                                 const char* answer_text, const char* hints, char** out_json) {
  return guarded([&] {
    require(judge && answer_text, "null argument");
    const auto v = judge->gateway->judge_correctness(record_at(ds, record), answer_text,
                                                     hints ? hints : "");
    ojson o = verdict_json(v);
    o["response"] = v.transcript;
    emit(out_json, o.dump(2, ' ', false, ojson::error_handler_t::replace));
  });
}

trm_status trm_judge_duel(trm_judge* judge, const char* question, const char* anchor,
                          const char* candidate, char** out_json) {
  return guarded([&] {
    require(judge && question && anchor && candidate, "null argument");
    const auto d = judge->gateway->usefulness_duel(question, anchor, candidate);
    ojson o = duel_json(d);
    o["responses"] = {d.transcripts.first, d.transcripts.second};
    emit(out_json, o.dump(2, ' ', false, ojson::error_handler_t::replace));
  });
}

trm_status trm_judge_correctness_batch(trm_judge* judge, const trm_dataset* ds,
                                       const char* answers_jsonl, size_t len, const char* hints,
                                       const char* transcript_dir, char** out_jsonl) {
  return guarded([&] {
    require(judge && ds, "null argument");
    const auto answers = trm::pipeline::answers_by_query(view(answers_jsonl, len), ds->records);
    const auto entries =
        judge->gateway->run_correctness_batch(ds->records, answers, hints ? hints : "");
    std::string out;
    for (const auto& e : entries) {
      ojson o = ojson::object();
      o["query_id"] = e.query_id;
      if (e.verdict) {
        const ojson verdict = verdict_json(*e.verdict);
        for (auto& [k, v] : verdict.items()) o[k] = v;
        if (transcript_dir && *transcript_dir)
          trm::save_correctness_transcript(transcript_dir, e.query_id, *e.verdict);
      } else {
        o["error"] = e.error;
      }
      out += o.dump(-1, ' ', false, ojson::error_handler_t::replace) + '\n';
    }
    emit(out_jsonl, out);
  });
}

trm_status trm_judge_usefulness_suite(trm_judge* judge, const trm_dataset* ds,
                                      const char* candidates_jsonl, size_t candidates_len,
                                      const char* anchors_jsonl, size_t anchors_len,
                                      const char* transcript_dir, char** out_json) {
  return guarded([&] {
    require(judge && ds, "null argument");
    const auto candidates =
        trm::pipeline::answers_by_query(view(candidates_jsonl, candidates_len), ds->records);
    const auto anchors =
        trm::pipeline::answers_by_query(view(anchors_jsonl, anchors_len), ds->records);
    const auto suite = judge->gateway->run_usefulness_suite(ds->records, candidates, anchors);
    ojson o = ojson::object();
    o["tally"] = ojson{{"win", suite.tally.win},
                       {"lose", suite.tally.lose},
                       {"tie", suite.tally.tie},
                       {"failed", suite.tally.failed}};
    ojson rows = ojson::array();
    for (const auto& e : suite.entries) {
      ojson r = ojson::object();
      r["query_id"] = e.query_id;
      if (e.outcome) {
        const ojson duel = duel_json(*e.outcome);
        for (auto& [k, v] : duel.items()) r[k] = v;
        if (transcript_dir && *transcript_dir)
          trm::save_duel_transcripts(transcript_dir, e.query_id, *e.outcome);
      } else {
        r["result"] = "failed";
        r["error"] = e.error;
      }
      rows.push_back(std::move(r));
    }
    o["per_query"] = std::move(rows);
    emit(out_json, o.dump(2, ' ', false, ojson::error_handler_t::replace));
  });
}

trm_status trm_simulate(const char* config_json, char** out_csv) {
  return guarded([&] {
    std::ostringstream csv;
    trm::write_trajectory_csv(csv, trm::run_sim(sim_config_of(config_json)));
    emit(out_csv, csv.str());
  });
}

trm_status trm_simulate_compare(const char* config_json, char** out_json) {
  return guarded([&] {
    const auto ranked = trm::compare_variants(sim_config_of(config_json));
    ojson arr = ojson::array();
    for (const auto& v : ranked)
      arr.push_back(ojson{{"variant", trm::reward_variant_name(v.variant)},
                          {"f1_incorrect", v.final_step.f1_incorrect},
                          {"detection_proxy", v.final_step.detection_proxy},
                          {"mean_reward", v.final_step.mean_reward}});
    emit(out_json, arr.dump(2));
  });
}

}  // extern "C"
