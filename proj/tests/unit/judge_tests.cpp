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

#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "test_util.hpp"
#include "trm/dataset.hpp"
#include "trm/error.hpp"
#include "trm/judge.hpp"

using trm::DuelResult;

namespace {

std::string ratio_reply(const std::string& ratio) {
  return "Analysis follows.\n{\"Error Analysis\": [\"Sentence 2 is wrong.\"], \"Error Ratio\": " +
         ratio + "}";
}

std::string order_reply(int n) {
  return "{\"Usefulness Comparative Analysis\": \"...\", \"Final Partial Order\": \"Answer " +
         std::to_string(n) + "\"}";
}

trm::ChatEndpointConfig quick() {
  trm::ChatEndpointConfig cfg;
  cfg.backoff = std::chrono::milliseconds(0);
  return cfg;
}

std::shared_ptr<trm::ChatTransport> fixed(std::string reply) {
  return std::make_shared<trm::FunctionTransport>([reply](const trm::ChatRequest&) { return reply; });
}

// Prefers whichever of the two texts it likes, wherever it sits in the prompt.
std::shared_ptr<trm::ChatTransport> prefers(std::string liked, std::string other) {
  return std::make_shared<trm::FunctionTransport>([=](const trm::ChatRequest& r) {
    const bool liked_first = r.prompt.find(liked) < r.prompt.find(other);
    return order_reply(liked_first ? 1 : 2);
  });
}

trm::QueryRecord record() {
  return trm::parse_record(testutil::record_line("q1", {{"a", "One. Two.", {1, 1}}}), 1);
}

}  // namespace

TEST_CASE("correctness verdicts") {
  trm::JudgeGateway j25(quick(), fixed(ratio_reply("0.25")));
  auto v = j25.judge_correctness(record(), "Some answer.");
  CHECK(v.error_ratio == 0.25);
  CHECK(v.derived_score == 0.75);
  CHECK(v.fully_correct == 0);
  CHECK(v.error_analysis.size() == 1);
  CHECK(v.prompt.find("Some answer.") != std::string::npos);

  trm::JudgeGateway j0(quick(), fixed(ratio_reply("0.0")));
  CHECK(j0.judge_correctness(record(), "x").fully_correct == 1);

  trm::JudgeGateway bad(quick(), fixed(ratio_reply("1.7")));
  try {
    bad.judge_correctness(record(), "x");
    FAIL("expected MalformedVerdict");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kMalformedVerdict);
  }
  // No retry on a malformed verdict.
  CHECK(bad.attempts() == 1);

  CHECK(trm::parse_correctness_verdict(ratio_reply("\"50%\"")).error_ratio == 0.5);
  CHECK_THROWS_AS(trm::parse_correctness_verdict("no json here"), trm::Error);
}

TEST_CASE("hints are appended to the correctness prompt") {
  std::string seen;
  auto t = std::make_shared<trm::FunctionTransport>([&](const trm::ChatRequest& r) {
    seen = r.prompt;
    return ratio_reply("0");
  });
  trm::JudgeGateway j(quick(), t);
  j.judge_correctness(record(), "x", "Sentence 1 gives the wrong year.");
  CHECK(seen.find("\n\nSentence 1 gives the wrong year.") != std::string::npos);
}

TEST_CASE("partial order parsing") {
  CHECK(trm::parse_partial_order(order_reply(1)) == 1);
  CHECK(trm::parse_partial_order("blah " + order_reply(2) + " end") == 2);
  CHECK_THROWS_AS(trm::parse_partial_order(R"({"Final Partial Order": "Answer 1 > Answer 2"})"),
                  trm::Error);
  CHECK_THROWS_AS(trm::parse_partial_order("Answer 1"), trm::Error);
}

TEST_CASE("combine duel") {
  CHECK(trm::combine_duel(2, 1) == DuelResult::kWin);
  CHECK(trm::combine_duel(1, 2) == DuelResult::kLose);
  CHECK(trm::combine_duel(1, 1) == DuelResult::kTie);
  CHECK(trm::combine_duel(2, 2) == DuelResult::kTie);
}

TEST_CASE("duels") {
  trm::JudgeGateway first(quick(), fixed(order_reply(1)));
  CHECK(first.usefulness_duel("Q?", "ANCHOR text", "CANDIDATE text").result == DuelResult::kTie);

  trm::JudgeGateway likes_cand(quick(), prefers("CANDIDATE text", "ANCHOR text"));
  auto win = likes_cand.usefulness_duel("Q?", "ANCHOR text", "CANDIDATE text");
  CHECK(win.result == DuelResult::kWin);
  CHECK(win.orders == std::pair<int, int>{2, 1});
  CHECK(win.prompts.first.find("ANCHOR text") < win.prompts.first.find("CANDIDATE text"));
  // Swapping roles flips the result.
  CHECK(likes_cand.usefulness_duel("Q?", "CANDIDATE text", "ANCHOR text").result == DuelResult::kLose);

  // "Answer 2" both times: forward picks the candidate, reverse the anchor.
  trm::JudgeGateway j(quick(), fixed(order_reply(2)));
  CHECK(j.usefulness_duel("Q?", "A", "B").result == DuelResult::kTie);
}

TEST_CASE("mock judges") {
  auto cfg = quick();
  cfg.base_url = "mock://longer";
  trm::JudgeGateway longer(cfg);
  CHECK(longer.usefulness_duel("Q?", "short", "a much longer answer").result == DuelResult::kWin);
  CHECK(longer.usefulness_duel("Q?", "same", "same").result == DuelResult::kTie);
  cfg.base_url = "mock://second";
  trm::JudgeGateway second(cfg);
  CHECK(second.usefulness_duel("Q?", "a", "b").result == DuelResult::kTie);
  cfg.base_url = "mock://ratio/0.25";
  trm::JudgeGateway ratio(cfg);
  CHECK(ratio.judge_correctness(record(), "x").derived_score == 0.75);
  cfg.base_url = "mock://nope";
  CHECK_THROWS_AS(trm::JudgeGateway{cfg}, trm::Error);
}

TEST_CASE("scripted suite tally") {
  std::vector<trm::QueryRecord> ds;
  for (int i = 0; i < 4; ++i)
    ds.push_back(trm::parse_record(testutil::record_line("q" + std::to_string(i), {{"a", "One.", {1}}}), 1));
  // q0 win, q1 lose, q2 tie, q3 judge breaks.
  auto t = std::make_shared<trm::FunctionTransport>([](const trm::ChatRequest& r) -> std::string {
    const bool cand_first = r.prompt.find("CAND") < r.prompt.find("ANCH");
    if (r.prompt.find("Q3") != std::string::npos) return "garbage";
    if (r.prompt.find("Q0") != std::string::npos) return order_reply(cand_first ? 1 : 2);
    if (r.prompt.find("Q1") != std::string::npos) return order_reply(cand_first ? 2 : 1);
    return order_reply(1);
  });
  for (int i = 0; i < 4; ++i) ds[i].query = "Q" + std::to_string(i);
  trm::JudgeGateway j(quick(), t);
  std::vector<std::string> cands(4), anchors(4);
  for (int i = 0; i < 4; ++i) {
    cands[i] = "CAND " + std::to_string(i);
    anchors[i] = "ANCH " + std::to_string(i);
  }
  auto suite = j.run_usefulness_suite(ds, cands, anchors);
  CHECK(suite.tally.win == 1);
  CHECK(suite.tally.lose == 1);
  CHECK(suite.tally.tie == 1);
  CHECK(suite.tally.failed == 1);
  REQUIRE(suite.entries.size() == 4);
  CHECK(suite.entries[0].query_id == "q0");
  CHECK(suite.entries[3].error.size() > 0);
  CHECK_THROWS_AS(j.run_usefulness_suite(ds, cands, {}), trm::Error);

  // Identical answers under a self-consistent judge are all ties.
  trm::JudgeGateway longer(quick());
  auto same = longer.run_usefulness_suite(ds, cands, cands);
  CHECK(same.tally.tie == 4);
}

TEST_CASE("correctness batch keeps input order") {
  std::vector<trm::QueryRecord> ds;
  std::vector<std::string> answers;
  for (int i = 0; i < 20; ++i) {
    ds.push_back(trm::parse_record(testutil::record_line("q" + std::to_string(i), {{"a", "One.", {1}}}), 1));
    answers.push_back("ANS#" + std::to_string(i));
  }
  auto t = std::make_shared<trm::FunctionTransport>([](const trm::ChatRequest& r) {
    auto at = r.prompt.find("ANS#");
    const int i = std::stoi(r.prompt.substr(at + 4));
    std::this_thread::sleep_for(std::chrono::milliseconds((20 - i) % 5));
    return ratio_reply(std::to_string(i / 20.0));
  });
  auto cfg = quick();
  cfg.max_in_flight = 8;
  trm::JudgeGateway j(cfg, t);
  auto out = j.run_correctness_batch(ds, answers);
  REQUIRE(out.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(out[i].query_id == "q" + std::to_string(i));
    REQUIRE(out[i].verdict);
    CHECK(out[i].verdict->error_ratio == doctest::Approx(i / 20.0));
  }
}

TEST_CASE("in-flight cap") {
  std::atomic<int> now{0}, peak{0};
  auto t = std::make_shared<trm::FunctionTransport>([&](const trm::ChatRequest&) {
    int v = ++now;
    int p = peak.load();
    while (v > p && !peak.compare_exchange_weak(p, v)) {}
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --now;
    return ratio_reply("0");
  });
  auto cfg = quick();
  cfg.max_in_flight = 3;
  trm::JudgeGateway j(cfg, t);
  std::vector<trm::QueryRecord> ds;
  for (int i = 0; i < 24; ++i)
    ds.push_back(trm::parse_record(testutil::record_line("q" + std::to_string(i), {{"a", "One.", {1}}}), 1));
  j.run_correctness_batch(ds, std::vector<std::string>(24, "x"));
  CHECK(peak.load() <= 3);
  CHECK(peak.load() >= 1);
}

TEST_CASE("retries over HTTP") {
  httplib::Server srv;
  std::atomic<int> hits{0};
  std::string auth;
  std::mutex mu;
  srv.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    {
      std::lock_guard lock(mu);
      auth = req.get_header_value("Authorization");
    }
    if (req.body.find("\"model\":\"fail\"") != std::string::npos) {
      res.status = 503;
      return;
    }
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", ratio_reply("0.5")}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  ::setenv("TRM_TEST_KEY", "sekret", 1);
  trm::ChatEndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.api_key_env = "TRM_TEST_KEY";
  cfg.backoff = std::chrono::milliseconds(1);
  cfg.timeout = std::chrono::milliseconds(5000);

  {
    trm::JudgeGateway ok(cfg);
    CHECK(ok.judge_correctness(record(), "x").error_ratio == 0.5);
    CHECK(ok.attempts() == 1);
    std::lock_guard lock(mu);
    CHECK(auth == "Bearer sekret");
  }

  cfg.model_name = "fail";
  cfg.max_retries = 3;
  hits = 0;
  trm::JudgeGateway failing(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    failing.chat("hello");
    FAIL("expected Transport");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kTransport);
  }
  const auto waited = std::chrono::steady_clock::now() - t0;
  CHECK(failing.attempts() == 4);
  CHECK(hits.load() == 4);
  // Backoff 1 + 2 + 4 ms.
  CHECK(waited >= std::chrono::milliseconds(7));

  srv.stop();
  th.join();

  // Nothing listening: connection errors are retried too.
  cfg.max_retries = 1;
  trm::JudgeGateway down(cfg);
  CHECK_THROWS_AS(down.chat("x"), trm::Error);
  CHECK(down.attempts() == 2);
}

TEST_CASE("request and response bodies") {
  trm::ChatRequest r{"m", "hi", 0.0, 0, std::chrono::milliseconds(1)};
  auto body = nlohmann::json::parse(trm::chat_request_body(r));
  CHECK(body["model"] == "m");
  CHECK(body["messages"][0]["content"] == "hi");
  CHECK(!body.contains("top_k"));
  CHECK(trm::chat_response_content(R"({"choices":[{"message":{"content":"yo"}}]})") == "yo");
  CHECK_THROWS_AS(trm::chat_response_content("{}"), trm::Error);
}

TEST_CASE("config validation") {
  trm::ChatEndpointConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_in_flight = 0;
  CHECK_THROWS_AS(cfg.validate(), trm::Error);
}

TEST_CASE("transcripts") {
  auto dir = std::filesystem::temp_directory_path() / "trm_transcripts_test";
  std::filesystem::remove_all(dir);
  trm::JudgeGateway j(quick(), fixed(ratio_reply("0.25")));
  auto v = j.judge_correctness(record(), "x");
  trm::save_correctness_transcript(dir, "q/1", v);
  auto saved = nlohmann::json::parse(testutil::slurp((dir / "correctness" / "q_1.json").string()));
  CHECK(saved["response"] == ratio_reply("0.25"));
  CHECK(saved["error_ratio"] == 0.25);

  trm::JudgeGateway d(quick(), prefers("CAND", "ANCH"));
  auto o = d.usefulness_duel("Q?", "ANCH", "CAND");
  trm::save_duel_transcripts(dir, "q1", o);
  auto fwd = nlohmann::json::parse(testutil::slurp((dir / "usefulness" / "q1.forward.json").string()));
  auto rev = nlohmann::json::parse(testutil::slurp((dir / "usefulness" / "q1.reverse.json").string()));
  CHECK(fwd["response"] == o.transcripts.first);
  CHECK(rev["preferred"] == "Answer 1");
  CHECK(fwd["result"] == "win");
  std::filesystem::remove_all(dir);
}
