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

/* C interface to trmkit.
 *
 * Conventions:
 *  - Every call returns a trm_status; TRM_OK is 0.
 *  - On failure, trm_last_error() describes the problem for the calling
 *    thread until its next trm_* call. trm_last_error_line() gives the
 *    1-based input line for JSONL data errors, 0 otherwise.
 *  - Strings returned through `char** out` are NUL-terminated UTF-8 and
 *    must be released with trm_string_free().
 *  - Structured values travel as JSON text (see docs/formats.md).
 *  - Handles are immutable after creation except trm_judge, which is safe
 *    to share across threads.
 */
#ifndef TRM_TRM_H
#define TRM_TRM_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(TRM_BUILDING_LIBRARY)
#    define TRM_API __declspec(dllexport)
#  else
#    define TRM_API __declspec(dllimport)
#  endif
#else
#  define TRM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trm_status {
  TRM_OK = 0,
  TRM_E_INVALID_ARGUMENT = 1,
  TRM_E_EMPTY_INPUT = 2,
  TRM_E_PARSE = 3,
  TRM_E_SCHEMA = 4,
  TRM_E_EMPTY_DATASET = 5,
  TRM_E_NO_JSON_ARRAY = 6,
  TRM_E_LENGTH_MISMATCH = 7,
  TRM_E_DOMAIN = 8,
  TRM_E_NO_PERFECT_ANSWER = 9,
  TRM_E_EMPTY_REWARDS = 10,
  TRM_E_GROUP_TOO_SMALL = 11,
  TRM_E_SPAN_MISMATCH = 12,
  TRM_E_DEGENERATE_QUERY = 13,
  TRM_E_WRONG_ARITY = 14,
  TRM_E_ALIGNMENT = 15,
  TRM_E_TRANSPORT = 16,
  TRM_E_MALFORMED_VERDICT = 17,
  TRM_E_IO = 18,
  TRM_E_INTERNAL = 99
} trm_status;

typedef struct trm_context trm_context;
typedef struct trm_dataset trm_dataset;
typedef struct trm_judge trm_judge;

typedef struct trm_reward_config {
  double alpha;
  double bonus_hit;
  double penalty_miss;
} trm_reward_config;

/* ---- housekeeping ------------------------------------------------------ */

TRM_API const char* trm_version(void);
TRM_API const char* trm_status_name(trm_status status);
TRM_API const char* trm_last_error(void);
TRM_API size_t trm_last_error_line(void);
TRM_API void trm_string_free(char* s);

/* Prompt templates. `prompt_dir` may be NULL for the built-in set. */
TRM_API trm_status trm_context_new(const char* prompt_dir, trm_context** out);
TRM_API void trm_context_free(trm_context* ctx);
TRM_API trm_status trm_context_prompt_version(const trm_context* ctx, char** out);

/* ---- segmentation ------------------------------------------------------ */

/* {"segments": [{"index", "text", "kind"}], "marked_text"} */
TRM_API trm_status trm_segment(const char* text, size_t len, char** out_json);
TRM_API trm_status trm_strip_markers(const char* marked, size_t len, char** out_text);

/* ---- dataset ----------------------------------------------------------- */

TRM_API trm_status trm_dataset_load(const char* path, trm_dataset** out);
TRM_API trm_status trm_dataset_parse(const char* jsonl, size_t len, trm_dataset** out);
TRM_API void trm_dataset_free(trm_dataset* ds);
TRM_API size_t trm_dataset_size(const trm_dataset* ds);
/* One record in canonical JSON. */
TRM_API trm_status trm_dataset_record(const trm_dataset* ds, size_t index, char** out_json);
TRM_API trm_status trm_dataset_find(const trm_dataset* ds, const char* query_id, size_t* out_index);
/* {"queries", "answers", "sentences", "positive_sentences",
 *  "positive_fraction", "negative_fraction"} */
TRM_API trm_status trm_dataset_stats(const trm_dataset* ds, char** out_json);
/* Checks every line. {"valid_records", "issues": [{"line", "field",
 * "code", "message"}]}. Returns TRM_OK even when issues were found. */
TRM_API trm_status trm_dataset_validate(const char* jsonl, size_t len, char** out_json);

/* ---- prompts and verdicts ---------------------------------------------- */

TRM_API trm_status trm_build_trm_prompt(const trm_context* ctx, const trm_dataset* ds,
                                        size_t record, size_t answer, char** out);
TRM_API trm_status trm_build_policy_prompt(const trm_context* ctx, const trm_dataset* ds,
                                           size_t record, char** out);
/* Lenient parse of one model output into
 * [{"faithfulness", "reason", "correctness"}]. */
TRM_API trm_status trm_parse_verdicts(const char* output, size_t len, size_t expected_count,
                                      char** out_json);
/* JSONL stage: see docs/formats.md. `ds` may be NULL when every row
 * carries "expected_count". */
TRM_API trm_status trm_parse_verdict_rows(const trm_dataset* ds, const char* jsonl, size_t len,
                                          char** out_jsonl);

/* ---- rewards ----------------------------------------------------------- */

/* "RL_C", "RL_CF" or "RL_CF_PLUS". */
TRM_API trm_status trm_reward_preset(const char* name, trm_reward_config* out);
TRM_API trm_status trm_sentence_reward(int pred_faithfulness, int pred_correctness,
                                       int gold_faithfulness, int gold_correctness,
                                       const trm_reward_config* cfg, double* out);
TRM_API trm_status trm_policy_reward(int trm_bit, int prefer, double beta, double* out);
/* bits: answers' correctness bits laid end to end; lengths[i] per answer. */
TRM_API trm_status trm_select_anchor(const int* bits, const size_t* lengths, size_t n_answers,
                                     size_t* out_index);
/* `variant_name` labels the rows; NULL means "custom". */
TRM_API trm_status trm_reward_rows(const trm_dataset* ds, const char* verdict_jsonl, size_t len,
                                   const trm_reward_config* cfg, const char* variant_name,
                                   char** out_jsonl);
TRM_API trm_status trm_policy_reward_rows(const char* jsonl, size_t len, double beta,
                                          char** out_jsonl);
TRM_API trm_status trm_anchor_rows(const trm_dataset* ds, const char* verdict_jsonl, size_t len,
                                   char** out_jsonl);

/* ---- group-relative advantages ----------------------------------------- */

TRM_API trm_status trm_group_advantages(const double* scalars, size_t n, double epsilon,
                                        double* out);
/* aggregation: "mean" | "sum"; credit: "uniform" | "sentence_weighted". */
TRM_API trm_status trm_advantage_rows(const char* groups_jsonl, size_t len,
                                      const char* aggregation, const char* credit,
                                      double epsilon, double kl_coefficient, char** out_jsonl);

/* ---- metrics ----------------------------------------------------------- */

TRM_API trm_status trm_f1_for_label(const int* gold, const int* pred, size_t n, int target,
                                    double* out);
TRM_API trm_status trm_f1_overall(const int* gold, const int* pred, size_t n, double* out);
TRM_API trm_status trm_recall_overall(const int* gold, const int* pred, size_t n, double* out);
TRM_API trm_status trm_answer_score(const int* labels, size_t n, double* out);
TRM_API trm_status trm_detect_worst(const double* gold_scores, const double* pred_scores,
                                    size_t n, int* out);
TRM_API trm_status trm_ndcg_at_4(const double* gold_scores, const double* pred_scores,
                                 double* out);
/* EvalReport JSON for predictions JSONL scored against the dataset. */
TRM_API trm_status trm_score(const trm_dataset* ds, const char* predictions_jsonl, size_t len,
                             char** out_report_json);
/* reports_json: [{"name": "...", "report": {EvalReport}}] -> text table. */
TRM_API trm_status trm_report_table(const char* reports_json, char** out_text);

/* ---- judges ------------------------------------------------------------ */

typedef struct trm_buffer trm_buffer;
TRM_API void trm_buffer_set(trm_buffer* buf, const char* data, size_t len);

/* Custom transport. Write the model reply into `response` and return 0;
 * a non-zero return counts as a retryable transport failure. */
typedef int (*trm_transport_fn)(void* user, const char* request_json, trm_buffer* response);

/* endpoint_json keys: base_url, model_name, api_key_env, timeout_ms,
 * max_retries, temperature, top_k, backoff_ms, max_in_flight. Missing keys
 * keep their defaults. `ctx` may be NULL. */
TRM_API trm_status trm_judge_new(const char* endpoint_json, const trm_context* ctx,
                                 trm_judge** out);
TRM_API trm_status trm_judge_new_with_transport(const char* endpoint_json, const trm_context* ctx,
                                                trm_transport_fn fn, void* user,
                                                trm_judge** out);
TRM_API void trm_judge_free(trm_judge* judge);
TRM_API size_t trm_judge_attempts(const trm_judge* judge);

/* {"error_ratio", "derived_score", "fully_correct", "error_analysis",
 *  "response"} */
TRM_API trm_status trm_judge_correctness(trm_judge* judge, const trm_dataset* ds, size_t record,
                                         const char* answer_text, const char* hints,
                                         char** out_json);
/* {"result": "win"|"lose"|"tie", "preferred": [p1, p2], "responses": [..]} */
TRM_API trm_status trm_judge_duel(trm_judge* judge, const char* question, const char* anchor,
                                  const char* candidate, char** out_json);
/* answers_jsonl rows {"query_id", "answer_text"}, one per query. Output
 * JSONL, one row per query in dataset order. `transcript_dir` may be NULL. */
TRM_API trm_status trm_judge_correctness_batch(trm_judge* judge, const trm_dataset* ds,
                                               const char* answers_jsonl, size_t len,
                                               const char* hints, const char* transcript_dir,
                                               char** out_jsonl);
/* {"tally": {"win", "lose", "tie", "failed"}, "per_query": [...]} */
TRM_API trm_status trm_judge_usefulness_suite(trm_judge* judge, const trm_dataset* ds,
                                              const char* candidates_jsonl, size_t candidates_len,
                                              const char* anchors_jsonl, size_t anchors_len,
                                              const char* transcript_dir, char** out_json);

/* ---- shaping simulation ------------------------------------------------ */

/* config_json keys: class_prior_correct, faith_correct_coupling, steps,
 * learning_rate, seed, variant, batch_size, signal_strength,
 * init_correct_logit, init_faith_logit, test_seed. */
TRM_API trm_status trm_simulate(const char* config_json, char** out_csv);
/* Ranked final metrics for all three presets:
 * [{"variant", "f1_incorrect", "detection_proxy", "mean_reward"}]. */
TRM_API trm_status trm_simulate_compare(const char* config_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* TRM_TRM_H */
