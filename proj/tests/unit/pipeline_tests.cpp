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

#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "trm/dataset.hpp"
#include "trm/error.hpp"
#include "trm/pipeline.hpp"

using nlohmann::json;
using testutil::record_line;

namespace {

std::vector<json> rows(const std::string& jsonl) {
  std::vector<json> out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

std::vector<trm::QueryRecord> dataset() {
  std::istringstream in(record_line("q1", {{"a", "One. Two.", {1, 0}}, {"b", "One. Two. Three.", {1, 1, 1}}}) +
                        "\n" + record_line("q2", {{"c", "Only.", {0}}}) + "\n");
  return trm::read_dataset(in);
}

std::string verdict_row(const std::string& q, const std::string& a, std::vector<std::pair<int, int>> fc) {
  json v = json::array();
  for (auto [f, c] : fc) v.push_back({{"faithfulness", f}, {"correctness", c}, {"reason", ""}});
  return json{{"query_id", q}, {"answer_id", a}, {"verdicts", v}}.dump() + "\n";
}

}  // namespace

TEST_CASE("segmentation json") {
  auto j = json::parse(trm::pipeline::segmentation_json("Yes. No."));
  CHECK(j["segments"].size() == 2);
  CHECK(j["segments"][1]["kind"] == "plain");
  CHECK(j["marked_text"] == "Yes. [Sentence 0] No. [Sentence 1]");
}

TEST_CASE("verdict rows") {
  auto ds = dataset();
  const std::string in =
      json{{"query_id", "q1"}, {"answer_id", "a"},
           {"output", R"([{"Faithfulness Score":1,"Correctness Score":1},{"Faithfulness Score":"0","Correctness Score":0}])"}}
          .dump() + "\n";
  auto out = rows(trm::pipeline::parse_verdict_rows(in, &ds));
  REQUIRE(out.size() == 1);
  CHECK(out[0]["verdicts"][1]["faithfulness"] == 0);

  // Without a dataset the row carries its own count.
  auto row = json::parse(in);
  row["expected_count"] = 3;
  try {
    trm::pipeline::parse_verdict_rows(row.dump() + "\n", nullptr);
    FAIL("expected a length mismatch");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kLengthMismatch);
    CHECK(e.line() == 1);
  }
  row.erase("expected_count");
  CHECK_THROWS_AS(trm::pipeline::parse_verdict_rows(row.dump(), nullptr), trm::DataError);
}

TEST_CASE("trm reward rows") {
  auto ds = dataset();
  auto out = rows(trm::pipeline::trm_reward_rows(verdict_row("q1", "a", {{1, 1}, {0, 0}}), ds,
                                                 trm::RewardConfig::preset(trm::RewardVariant::kRlCfPlus)));
  REQUIRE(out.size() == 1);
  CHECK(out[0]["variant"] == "RL_CF_PLUS");
  CHECK(out[0]["sentence_rewards"] == json::array({1.5, 2.5}));
  CHECK(out[0]["mean_reward"] == 2.0);

  try {
    trm::pipeline::trm_reward_rows("\n" + verdict_row("q1", "a", {{1, 1}}), ds, {});
    FAIL("expected a length mismatch");
  } catch (const trm::DataError& e) {
    CHECK(e.line() == 2);
  }
  try {
    trm::pipeline::trm_reward_rows(verdict_row("q9", "a", {{1, 1}}), ds, {});
    FAIL("expected alignment");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kAlignment);
  }
}

TEST_CASE("policy reward rows") {
  const std::string in =
      json{{"query_id", "q1"}, {"rollout_id", "r0"}, {"trm_bits", {1, 0}}, {"prefer", "win"}}.dump() + "\n" +
      json{{"query_id", "q1"}, {"rollout_id", "r1"}, {"trm_bits", {1}}, {"prefer", -1}}.dump() + "\n" +
      json{{"query_id", "q1"}, {"rollout_id", "r2"}, {"trm_bits", {1}}, {"prefer", "tie"}}.dump() + "\n";
  auto out = rows(trm::pipeline::policy_reward_rows(in, {}));
  REQUIRE(out.size() == 3);
  CHECK(out[0]["sentence_rewards"] == json::array({3.0, 2.0}));
  CHECK(out[1]["sentence_rewards"] == json::array({-1.0}));
  CHECK(out[2]["sentence_rewards"] == json::array({1.0}));
  CHECK(out[0]["beta"] == 2.0);
  CHECK_THROWS_AS(trm::pipeline::policy_reward_rows(R"({"trm_bits":[1],"prefer":"maybe"})", {}),
                  trm::DataError);
}

TEST_CASE("anchor rows") {
  auto ds = dataset();
  const std::string in = verdict_row("q1", "a", {{1, 1}, {1, 1}}) + verdict_row("q1", "b", {{1, 1}, {1, 1}, {1, 1}}) +
                         verdict_row("q2", "c", {{1, 0}});
  auto out = rows(trm::pipeline::anchor_rows(in, ds));
  REQUIRE(out.size() == 2);
  CHECK(out[0]["answer_id"] == "b");
  CHECK(out[0]["answer_index"] == 1);
  CHECK(out[1].contains("error"));
}

TEST_CASE("advantage rows") {
  const std::string in =
      json{{"query_id", "q1"},
           {"rollouts",
            {{{"rollout_id", "r0"}, {"sentence_rewards", {2.0, 0.0}}, {"sentence_token_spans", {{0, 2}, {2, 3}}}},
             {{"rollout_id", "r1"}, {"sentence_rewards", {0.0}}, {"sentence_token_spans", {{0, 1}}}}}}}
          .dump() + "\n";
  trm::pipeline::AdvantageOptions opts;
  auto out = rows(trm::pipeline::advantage_rows(in, opts));
  REQUIRE(out.size() == 3);
  CHECK(out[0]["mode"] == "mean");
  CHECK(out[0]["kl_coefficient"] == 0.01);
  CHECK(out[0]["credit_policy"] == "uniform");
  CHECK(out[1]["advantage"] == 1.0);
  CHECK(out[1]["token_credit"] == json::array({1.0, 1.0, 1.0}));
  CHECK(out[2]["advantage"] == -1.0);

  opts.credit = trm::CreditPolicy::kSentenceWeighted;
  auto sw = rows(trm::pipeline::advantage_rows(in, opts));
  CHECK(sw[1]["token_credit"] == json::array({1.0, 1.0, -1.0}));

  opts.epsilon = 0.0;
  CHECK_THROWS_AS(trm::pipeline::advantage_rows(in, opts), trm::Error);
}

TEST_CASE("answers by query") {
  auto ds = dataset();
  const std::string in = json{{"query_id", "q2"}, {"answer_text", "B"}}.dump() + "\n" +
                         json{{"query_id", "q1"}, {"answer_text", "A"}}.dump() + "\n";
  auto out = trm::pipeline::answers_by_query(in, ds);
  CHECK(out == std::vector<std::string>{"A", "B"});
  CHECK_THROWS_AS(trm::pipeline::answers_by_query(json{{"query_id", "q1"}, {"answer_text", "A"}}.dump(), ds),
                  trm::Error);
}

TEST_CASE("malformed rows name the line") {
  try {
    trm::pipeline::policy_reward_rows("\n\n{bad", {});
    FAIL("expected a parse error");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kParse);
    CHECK(e.line() == 3);
  }
}
