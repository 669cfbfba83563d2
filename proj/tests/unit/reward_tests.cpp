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

#include "doctest.h"
#include "test_util.hpp"
#include "trm/dataset.hpp"
#include "trm/error.hpp"
#include "trm/reward.hpp"

using trm::RewardConfig;
using trm::RewardVariant;

namespace {

double reward(int pf, int pc, int gf, int gc, const RewardConfig& cfg) {
  return trm::trm_sentence_reward({pf, "", pc}, {gf, gc, ""}, cfg).value;
}

}  // namespace

TEST_CASE("presets") {
  auto c = RewardConfig::preset(RewardVariant::kRlC);
  CHECK(c.alpha == 0.0);
  CHECK(c.bonus_hit == 0.0);
  auto cf = RewardConfig::preset(RewardVariant::kRlCf);
  CHECK(cf.alpha == 0.5);
  CHECK(cf.penalty_miss == 0.0);
  auto plus = RewardConfig::preset(RewardVariant::kRlCfPlus);
  CHECK(plus.alpha == 0.5);
  CHECK(plus.bonus_hit == 1.0);
  CHECK(plus.penalty_miss == -1.0);
  CHECK(trm::parse_reward_variant("RL_CF_PLUS") == RewardVariant::kRlCfPlus);
  CHECK(std::string(trm::reward_variant_name(RewardVariant::kRlC)) == "RL_C");
  CHECK_THROWS_AS(trm::parse_reward_variant("RL_X"), trm::Error);
}

TEST_CASE("sentence reward examples") {
  CHECK(reward(1, 1, 1, 1, RewardConfig::preset(RewardVariant::kRlCf)) == 1.5);
  CHECK(reward(1, 0, 1, 0, RewardConfig::preset(RewardVariant::kRlCfPlus)) == 2.5);
  CHECK(reward(0, 1, 1, 0, RewardConfig::preset(RewardVariant::kRlCfPlus)) == -1.0);
  auto r = trm::trm_sentence_reward({1, "", 0}, {1, 0, ""}, RewardConfig::preset(RewardVariant::kRlCfPlus));
  CHECK(r.correct_match == 1);
  CHECK(r.faith_match == 1);
  CHECK(r.bonus_applied == 1.0);
}

TEST_CASE("monotone in faithfulness match, RL_C ignores faithfulness") {
  for (auto v : {RewardVariant::kRlC, RewardVariant::kRlCf, RewardVariant::kRlCfPlus}) {
    auto cfg = RewardConfig::preset(v);
    for (int gf = 0; gf < 2; ++gf)
      for (int gc = 0; gc < 2; ++gc)
        for (int pc = 0; pc < 2; ++pc) {
          CHECK(reward(gf, pc, gf, gc, cfg) >= reward(1 - gf, pc, gf, gc, cfg));
          if (v == RewardVariant::kRlC)
            CHECK(reward(0, pc, gf, gc, cfg) == reward(1, pc, gf, gc, cfg));
        }
  }
}

TEST_CASE("policy reward") {
  trm::PolicyRewardConfig def;
  CHECK(def.beta == 2.0);
  CHECK(trm::policy_sentence_reward(1, +1, def) == 3.0);
  CHECK(trm::policy_sentence_reward(1, -1, def) == -1.0);
  CHECK(trm::policy_sentence_reward(0, 0, def) == 0.0);
  for (int bit = 0; bit < 2; ++bit)
    for (int p : {-1, 0, 1}) CHECK(trm::policy_sentence_reward(bit, p, {0.0}) == bit);
  CHECK(trm::policy_sentence_reward(1, 1, {0.5}) - trm::policy_sentence_reward(1, 0, {0.5}) == 0.5);
  CHECK_THROWS_AS(trm::policy_sentence_reward(2, 1, def), trm::Error);
  CHECK_THROWS_AS(trm::policy_sentence_reward(1, 2, def), trm::Error);
  CHECK_THROWS_AS(trm::policy_sentence_reward(1, 1, {-1.0}), trm::Error);
}

TEST_CASE("anchor selection") {
  CHECK(trm::select_anchor_index({{1, 1}, {1, 0, 1}}) == 0);
  CHECK(trm::select_anchor_index({{1, 1}, {1, 1, 1, 1, 1}}) == 1);
  CHECK(trm::select_anchor_index({{1, 1, 1}, {0}, {1, 1, 1}}) == 0);
  try {
    trm::select_anchor_index({{0, 1}, {1, 0}});
    FAIL("expected NoPerfectAnswer");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kNoPerfectAnswer);
  }

  auto rec = trm::parse_record(
      testutil::record_line("q", {{"short", "A. B.", {1, 1}}, {"long", "A. B. C.", {1, 1, 1}}}), 1);
  auto ref = trm::select_anchor(rec, {{1, 1}, {1, 1, 1}});
  CHECK(ref.query_id == "q");
  CHECK(ref.answer_id == "long");
  CHECK(ref.answer_index == 1);
  CHECK_THROWS_AS(trm::select_anchor(rec, {{1, 1}}), trm::Error);
}
