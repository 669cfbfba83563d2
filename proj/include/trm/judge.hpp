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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trm/dataset.hpp"
#include "trm/prompts.hpp"

namespace trm {

/// Where and how to reach a chat-completion model.
///
/// `base_url` is either an HTTP(S) prefix such as `http://localhost:8000/v1`
/// (requests go to `<base_url>/chat/completions`) or one of the offline
/// mocks: `mock://first`, `mock://second`, `mock://longer`, `mock://ratio/<x>`.
struct ChatEndpointConfig {
  std::string base_url = "mock://longer";
  std::string model_name = "judge";
  std::string api_key_env = "TRM_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 2;
  double temperature = 0.0;
  int top_k = 40;
  // First retry waits `backoff`, then doubles per attempt.
  std::chrono::milliseconds backoff{500};
  std::size_t max_in_flight = 4;

  /// Throws Error(kInvalidArgument) when a field is out of domain.
  void validate() const;
};

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int top_k = 40;
  std::chrono::milliseconds timeout{60000};
};

/// One round trip to a model. Implementations throw Error(kTransport) for
/// anything worth retrying and must be safe to call concurrently.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Adapts a callable; handy for scripted judges in tests.
class FunctionTransport : public ChatTransport {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

/// HTTP transport for `http://` and `https://` URLs, mock otherwise.
std::shared_ptr<ChatTransport> make_transport(const ChatEndpointConfig& cfg);

/// Request body sent to `/chat/completions`.
std::string chat_request_body(const ChatRequest& request);
/// Pulls `choices[0].message.content` out of a response body.
/// Throws Error(kTransport) if the body does not have that shape.
std::string chat_response_content(std::string_view body);

struct CorrectnessVerdict {
  std::vector<std::string> error_analysis;
  double error_ratio = 0.0;
  double derived_score = 1.0;
  int fully_correct = 1;
  std::string prompt;
  std::string transcript;  // raw judge output
};

/// Parses a correctness judgment. Throws Error(kMalformedVerdict).
CorrectnessVerdict parse_correctness_verdict(std::string_view output);

enum class DuelResult { kWin, kLose, kTie };
const char* duel_result_name(DuelResult r);

/// Position named in a usefulness judgment: 1 or 2.
/// Throws Error(kMalformedVerdict).
int parse_partial_order(std::string_view output);

struct DuelOutcome {
  DuelResult result = DuelResult::kTie;
  // Raw outputs for (anchor, candidate) then (candidate, anchor).
  std::pair<std::string, std::string> transcripts;
  std::pair<std::string, std::string> prompts;
  std::pair<int, int> orders{0, 0};
};

/// Combines the two positional verdicts: the candidate sits in position 2
/// first and position 1 second.
DuelResult combine_duel(int forward_order, int reverse_order);

struct SuiteEntry {
  std::string query_id;
  std::optional<DuelOutcome> outcome;
  std::string error;  // set when the duel failed
};

struct SuiteTally {
  std::size_t win = 0;
  std::size_t lose = 0;
  std::size_t tie = 0;
  std::size_t failed = 0;
};

struct UsefulnessSuite {
  std::vector<SuiteEntry> entries;  // dataset order
  SuiteTally tally;
};

struct CorrectnessEntry {
  std::string query_id;
  std::optional<CorrectnessVerdict> verdict;
  std::string error;
};

/// Sends judge prompts with retries, exponential backoff and a cap on
/// requests in flight. Shareable across threads.
class JudgeGateway {
 public:
  explicit JudgeGateway(ChatEndpointConfig cfg, std::shared_ptr<ChatTransport> transport = nullptr,
                        PromptLibrary prompts = PromptLibrary::builtin());
  ~JudgeGateway();
  JudgeGateway(const JudgeGateway&) = delete;
  JudgeGateway& operator=(const JudgeGateway&) = delete;

  const ChatEndpointConfig& config() const { return cfg_; }

  /// Makes up to max_retries + 1 attempts; rethrows the last Error(kTransport).
  std::string chat(const std::string& prompt);

  CorrectnessVerdict judge_correctness(const QueryRecord& record, std::string_view answer_text,
                                       std::string_view hints = {});
  DuelOutcome usefulness_duel(std::string_view question, std::string_view anchor,
                              std::string_view candidate);

  /// One correctness call per query, answers[i] belonging to dataset[i].
  std::vector<CorrectnessEntry> run_correctness_batch(const std::vector<QueryRecord>& dataset,
                                                      const std::vector<std::string>& answers,
                                                      std::string_view hints = {});
  /// One duel per query. A failing query is recorded, not fatal.
  UsefulnessSuite run_usefulness_suite(const std::vector<QueryRecord>& dataset,
                                       const std::vector<std::string>& candidates,
                                       const std::vector<std::string>& anchors);

  /// Total attempts made, including failed ones.
  std::size_t attempts() const { return attempts_.load(); }

 private:
  class Limiter;

  ChatEndpointConfig cfg_;
  std::shared_ptr<ChatTransport> transport_;
  PromptLibrary prompts_;
  std::unique_ptr<Limiter> limiter_;
  std::atomic<std::size_t> attempts_{0};
};

/// Transcript archive layout under `dir`:
///   correctness/<query_id>.json
///   usefulness/<query_id>.forward.json and usefulness/<query_id>.reverse.json
void save_correctness_transcript(const std::filesystem::path& dir, const std::string& query_id,
                                 const CorrectnessVerdict& verdict);
void save_duel_transcripts(const std::filesystem::path& dir, const std::string& query_id,
                           const DuelOutcome& outcome);

}  // namespace trm
