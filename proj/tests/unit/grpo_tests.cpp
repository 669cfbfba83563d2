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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "trm/error.hpp"
#include "trm/grpo.hpp"

using trm::Aggregation;
using trm::CreditPolicy;

namespace {

std::vector<double> adv(std::vector<double> s) { return trm::group_advantages(s); }

trm::Rollout rollout(std::string id, std::vector<double> rewards, std::vector<trm::TokenSpan> spans,
                     std::size_t tokens = 0) {
  return {std::move(id), std::move(rewards), std::move(spans), tokens};
}

}  // namespace

TEST_CASE("rollout scalar") {
  std::vector<double> r{1.5, 0.5};
  CHECK(trm::rollout_scalar(r, Aggregation::kMean) == 1.0);
  CHECK(trm::rollout_scalar(r, Aggregation::kSum) == 2.0);
  std::vector<double> one{0.7};
  CHECK(trm::rollout_scalar(one, Aggregation::kMean) == 0.7);
  CHECK(trm::rollout_scalar(one, Aggregation::kSum) == 0.7);
  CHECK_THROWS_AS(trm::rollout_scalar(std::vector<double>{}), trm::Error);
}

TEST_CASE("group advantages examples") {
  CHECK(adv({1, 1, 1, 1}) == std::vector<double>{0, 0, 0, 0});
  CHECK(adv({1, 0}) == std::vector<double>{1, -1});
  CHECK(adv({2, 1}) == adv({1, 0}));
  try {
    adv({1});
    FAIL("expected GroupTooSmall");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kGroupTooSmall);
  }
}

TEST_CASE("group advantage properties") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t g = 2 + rng() % 31;
    std::vector<double> s(g);
    for (auto& x : s) x = u(rng);
    auto a = adv(s);
    CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0)) / g < 1e-12);
    double ss = 0;
    for (double x : a) ss += x * x;
    CHECK(ss / g == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> scaled(s);
    for (auto& x : scaled) x *= 4.25;
    auto b = adv(scaled);
    for (std::size_t i = 0; i < g; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);

    std::vector<std::size_t> perm(g);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ps(g);
    for (std::size_t i = 0; i < g; ++i) ps[i] = s[perm[i]];
    auto pa = adv(ps);
    for (std::size_t i = 0; i < g; ++i) CHECK(std::abs(pa[i] - a[perm[i]]) < 1e-12);
  }
}

TEST_CASE("uniform broadcast") {
  trm::RolloutGroup g{"q", {rollout("r0", {1.0}, {{0, 3}})}};
  std::vector<double> a{1.0};
  auto out = trm::broadcast_credit(g, a);
  REQUIRE(out.size() == 1);
  CHECK(out[0].token_credit == std::vector<double>{1, 1, 1});
  CHECK(out[0].scalar_reward == 1.0);
}

TEST_CASE("sentence weighted credit") {
  std::vector<double> a{1.0};
  trm::RolloutGroup flat{"q", {rollout("r0", {0.5, 0.5}, {{0, 2}, {2, 4}})}};
  auto f = trm::broadcast_credit(flat, a, CreditPolicy::kSentenceWeighted);
  CHECK(f[0].token_credit == std::vector<double>{0, 0, 0, 0});

  trm::RolloutGroup g{"q", {rollout("r0", {2.0, 0.0}, {{0, 2}, {3, 5}}, 6)}};
  auto out = trm::broadcast_credit(g, a, CreditPolicy::kSentenceWeighted);
  CHECK(out[0].token_credit == std::vector<double>{1, 1, 0, -1, -1, 0});
}

TEST_CASE("span checks") {
  std::vector<double> a{1.0};
  auto expect_span_error = [&](trm::Rollout r) {
    trm::RolloutGroup g{"q", {std::move(r)}};
    try {
      trm::broadcast_credit(g, a);
      FAIL("expected SpanMismatch");
    } catch (const trm::Error& e) {
      CHECK(e.code() == trm::ErrorCode::kSpanMismatch);
    }
  };
  expect_span_error(rollout("r", {1.0, 1.0}, {{0, 2}}));
  expect_span_error(rollout("r", {1.0, 1.0}, {{0, 3}, {2, 4}}));
  expect_span_error(rollout("r", {1.0}, {{2, 2}}));
  expect_span_error(rollout("r", {1.0}, {{0, 5}}, 3));
}

TEST_CASE("group credit end to end") {
  trm::RolloutGroup g{"q",
                      {rollout("a", {1.0, 1.0}, {{0, 1}, {1, 2}}), rollout("b", {0.0}, {{0, 3}})}};
  auto out = trm::group_credit(g, Aggregation::kMean, CreditPolicy::kUniform);
  REQUIRE(out.size() == 2);
  CHECK(out[0].advantage == 1.0);
  CHECK(out[1].advantage == -1.0);
  CHECK(out[1].token_credit == std::vector<double>{-1, -1, -1});
}

TEST_CASE("names") {
  CHECK(trm::parse_aggregation("sum") == Aggregation::kSum);
  CHECK(trm::parse_credit_policy("sentence_weighted") == CreditPolicy::kSentenceWeighted);
  CHECK(std::string(trm::aggregation_name(Aggregation::kMean)) == "mean");
  CHECK_THROWS_AS(trm::parse_aggregation("max"), trm::Error);
}
