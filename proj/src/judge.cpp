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

#include "trm/judge.hpp"

#include <algorithm>
#include <fstream>
#include <semaphore>
#include <thread>

#include "lenient_json.hpp"
#include "trm/error.hpp"

namespace trm {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr const char* kRatioKey = "Error Ratio";
constexpr const char* kAnalysisKey = "Error Analysis";
constexpr const char* kOrderKey = "Final Partial Order";

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedVerdict, why);
}

std::string safe_file_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_json_file(const std::filesystem::path& file, const ojson& j) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
  out << j.dump(2, ' ', false, ojson::error_handler_t::replace) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + file.string());
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

}  // namespace

void ChatEndpointConfig::validate() const {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::kInvalidArgument, why); };
  if (base_url.empty()) bad("base_url is empty");
  if (max_retries < 0) bad("max_retries must be >= 0");
  if (timeout.count() <= 0) bad("timeout must be positive");
  if (backoff.count() < 0) bad("backoff must be >= 0");
  if (top_k < 0) bad("top_k must be >= 0");
  if (max_in_flight == 0) bad("max_in_flight must be >= 1");
}

std::string chat_request_body(const ChatRequest& request) {
  ojson body = ojson::object();
  body["model"] = request.model;
  body["messages"] = ojson::array({ojson{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  if (request.top_k > 0) body["top_k"] = request.top_k;
  return body.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

std::string chat_response_content(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kTransport, "response body is not JSON");
  try {
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::kTransport, "message content is not a string");
    return content.get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kTransport, "response has no choices[0].message.content");
  }
}

CorrectnessVerdict parse_correctness_verdict(std::string_view output) {
  const auto obj = detail::first_json(output, '{', [](const json& j) {
    return j.is_object() && j.contains(kRatioKey);
  });
  if (!obj) malformed("no JSON object with \"Error Ratio\" in judge output");
  const auto ratio = detail::coerce_real(obj->at(kRatioKey));
  if (!ratio) malformed("Error Ratio is not a number: " + detail::as_text(obj->at(kRatioKey)));
  if (!(*ratio >= 0.0 && *ratio <= 1.0))
    malformed("Error Ratio " + detail::as_text(obj->at(kRatioKey)) + " is outside [0, 1]");

  CorrectnessVerdict v;
  if (auto it = obj->find(kAnalysisKey); it != obj->end()) {
    if (it->is_array()) {
      for (const auto& e : *it) v.error_analysis.push_back(detail::as_text(e));
    } else if (!it->is_null()) {
      v.error_analysis.push_back(detail::as_text(*it));
    }
  }
  v.error_ratio = *ratio;
  v.derived_score = 1.0 - *ratio;
  v.fully_correct = *ratio == 0.0 ? 1 : 0;
  v.transcript = std::string(output);
  return v;
}

const char* duel_result_name(DuelResult r) {
  switch (r) {
    case DuelResult::kWin: return "win";
    case DuelResult::kLose: return "lose";
    case DuelResult::kTie: return "tie";
  }
  return "tie";
}

int parse_partial_order(std::string_view output) {
  const auto obj = detail::first_json(output, '{', [](const json& j) {
    return j.is_object() && j.contains(kOrderKey);
  });
  if (!obj) malformed("no JSON object with \"Final Partial Order\" in judge output");
  const std::string value = detail::as_text(obj->at(kOrderKey));
  const bool one = value.find("Answer 1") != std::string::npos;
  const bool two = value.find("Answer 2") != std::string::npos;
  if (one == two) malformed("Final Partial Order must name exactly one answer, got '" + value + "'");
  return one ? 1 : 2;
}

DuelResult combine_duel(int forward_order, int reverse_order) {
  const bool forward_candidate = forward_order == 2;
  const bool reverse_candidate = reverse_order == 1;
  if (forward_candidate && reverse_candidate) return DuelResult::kWin;
  if (!forward_candidate && !reverse_candidate) return DuelResult::kLose;
  return DuelResult::kTie;
}

class JudgeGateway::Limiter {
 public:
  explicit Limiter(std::size_t n) : sem_(static_cast<std::ptrdiff_t>(n)) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<1024> sem_;
};

JudgeGateway::JudgeGateway(ChatEndpointConfig cfg, std::shared_ptr<ChatTransport> transport,
                           PromptLibrary prompts)
    : cfg_(std::move(cfg)), prompts_(std::move(prompts)) {
  cfg_.validate();
  cfg_.max_in_flight = std::min<std::size_t>(cfg_.max_in_flight, 1024);
  transport_ = transport ? std::move(transport) : make_transport(cfg_);
  limiter_ = std::make_unique<Limiter>(cfg_.max_in_flight);
}

JudgeGateway::~JudgeGateway() = default;

std::string JudgeGateway::chat(const std::string& prompt) {
  ChatRequest req;
  req.model = cfg_.model_name;
  req.prompt = prompt;
  req.temperature = cfg_.temperature;
  req.top_k = cfg_.top_k;
  req.timeout = cfg_.timeout;

  auto delay = cfg_.backoff;
  for (int attempt = 0;; ++attempt) {
    ++attempts_;
    try {
      limiter_->acquire();
      struct Release {
        Limiter* l;
        ~Release() { l->release(); }
      } release{limiter_.get()};
      return transport_->complete(req);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransport || attempt >= cfg_.max_retries) throw;
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

CorrectnessVerdict JudgeGateway::judge_correctness(const QueryRecord& record,
                                                   std::string_view answer_text,
                                                   std::string_view hints) {
  std::string hint_block;
  if (!hints.empty()) hint_block = "\n\n" + std::string(hints);
  std::string prompt = prompts_.render(prompt_names::kJudgeCorrectness,
                                       {{"question", detail::quote(record.query)},
                                        {"references", detail::quote(record.search_result())},
                                        {"answer", detail::quote(answer_text)},
                                        {"hints", hint_block}});
  CorrectnessVerdict v = parse_correctness_verdict(chat(prompt));
  v.prompt = std::move(prompt);
  return v;
}

DuelOutcome JudgeGateway::usefulness_duel(std::string_view question, std::string_view anchor,
                                          std::string_view candidate) {
  auto render = [&](std::string_view first, std::string_view second) {
    return prompts_.render(prompt_names::kJudgeUsefulness,
                           {{"question", detail::quote(question)},
                            {"answer_1", detail::quote(first)},
                            {"answer_2", detail::quote(second)}});
  };
  DuelOutcome out;
  out.prompts.first = render(anchor, candidate);
  out.prompts.second = render(candidate, anchor);
  out.transcripts.first = chat(out.prompts.first);
  out.orders.first = parse_partial_order(out.transcripts.first);
  out.transcripts.second = chat(out.prompts.second);
  out.orders.second = parse_partial_order(out.transcripts.second);
  out.result = combine_duel(out.orders.first, out.orders.second);
  return out;
}

std::vector<CorrectnessEntry> JudgeGateway::run_correctness_batch(
    const std::vector<QueryRecord>& dataset, const std::vector<std::string>& answers,
    std::string_view hints) {
  if (answers.size() != dataset.size())
    throw Error(ErrorCode::kAlignment, std::to_string(answers.size()) + " answers for " +
                                           std::to_string(dataset.size()) + " queries");
  std::vector<CorrectnessEntry> out(dataset.size());
  parallel_for(dataset.size(), cfg_.max_in_flight, [&](std::size_t i) {
    out[i].query_id = dataset[i].query_id;
    try {
      out[i].verdict = judge_correctness(dataset[i], answers[i], hints);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

UsefulnessSuite JudgeGateway::run_usefulness_suite(const std::vector<QueryRecord>& dataset,
                                                   const std::vector<std::string>& candidates,
                                                   const std::vector<std::string>& anchors) {
  if (candidates.size() != dataset.size() || anchors.size() != dataset.size())
    throw Error(ErrorCode::kAlignment, "need one candidate and one anchor per query");
  UsefulnessSuite suite;
  suite.entries.resize(dataset.size());
  parallel_for(dataset.size(), cfg_.max_in_flight, [&](std::size_t i) {
    auto& e = suite.entries[i];
    e.query_id = dataset[i].query_id;
    try {
      e.outcome = usefulness_duel(dataset[i].query, anchors[i], candidates[i]);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  });
  for (const auto& e : suite.entries) {
    if (!e.outcome) {
      ++suite.tally.failed;
      continue;
    }
    switch (e.outcome->result) {
      case DuelResult::kWin: ++suite.tally.win; break;
      case DuelResult::kLose: ++suite.tally.lose; break;
      case DuelResult::kTie: ++suite.tally.tie; break;
    }
  }
  return suite;
}

void save_correctness_transcript(const std::filesystem::path& dir, const std::string& query_id,
                                 const CorrectnessVerdict& verdict) {
  ojson j = ojson::object();
  j["query_id"] = query_id;
  j["prompt"] = verdict.prompt;
  j["response"] = verdict.transcript;
  j["error_ratio"] = verdict.error_ratio;
  j["derived_score"] = verdict.derived_score;
  j["fully_correct"] = verdict.fully_correct;
  j["error_analysis"] = verdict.error_analysis;
  write_json_file(dir / "correctness" / (safe_file_stem(query_id) + ".json"), j);
}

void save_duel_transcripts(const std::filesystem::path& dir, const std::string& query_id,
                           const DuelOutcome& outcome) {
  auto one = [&](const char* position, const std::string& prompt, const std::string& response,
                 int order) {
    ojson j = ojson::object();
    j["query_id"] = query_id;
    j["position"] = position;
    j["prompt"] = prompt;
    j["response"] = response;
    j["preferred"] = "Answer " + std::to_string(order);
    j["result"] = duel_result_name(outcome.result);
    write_json_file(dir / "usefulness" / (safe_file_stem(query_id) + "." + position + ".json"), j);
  };
  one("forward", outcome.prompts.first, outcome.transcripts.first, outcome.orders.first);
  one("reverse", outcome.prompts.second, outcome.transcripts.second, outcome.orders.second);
}

}  // namespace trm
