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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "trm/dataset.hpp"
#include "trm/error.hpp"
#include "trm/prompts.hpp"
#include "trm/protocol.hpp"

using testutil::record_line;

namespace {

trm::QueryRecord one(const std::string& line) { return trm::parse_record(line, 1); }

}  // namespace

TEST_CASE("trm prompt carries markers and the output instruction") {
  auto rec = one(record_line("q", {{"a", "Paris is in France. It is big.", {1, 1}}},
                             {"Paris is the capital.", "France is in Europe."}));
  const std::string p = trm::build_trm_prompt(rec, 0);
  CHECK(p.find("[Sentence 0]") != std::string::npos);
  CHECK(p.find("[Sentence 1]") != std::string::npos);
  CHECK(p.find("Output only the final List, nothing else") != std::string::npos);
  // Blank-line join, JSON-escaped inside the input block.
  CHECK(p.find("Paris is the capital.\\n\\nFrance is in Europe.") != std::string::npos);
  CHECK(p.find("{{") == std::string::npos);
  CHECK(trm::build_trm_prompt(rec, 0) == p);
  CHECK_THROWS_AS(trm::build_trm_prompt(rec, 5), trm::Error);
}

TEST_CASE("policy prompt") {
  auto a = one(record_line("q1", {{"a", "One.", {1}}}));
  auto b = one(record_line("q2", {{"a", "One.", {1}}}, {}));
  const std::string pa = trm::build_policy_prompt(a);
  const std::string pb = trm::build_policy_prompt(b);
  CHECK(pa.find("Understand Intent") != std::string::npos);
  CHECK(pb.find("\"search_result\": \"\"") != std::string::npos);
  CHECK(pa != pb);
  CHECK(trm::build_policy_prompt(a) == pa);
}

TEST_CASE("bare verdict object") {
  const std::string out = R"({"Faithfulness Score": 1, "Reason for Correctness Score": "Matches the source.", "Correctness Score": 1})";
  auto v = trm::parse_verdicts(out, 1);
  REQUIRE(v.verdicts.size() == 1);
  CHECK(v.verdicts[0] == trm::TrmVerdict{1, "Matches the source.", 1});
  CHECK(v.source_text == out);
}

TEST_CASE("length mismatch") {
  const std::string out = R"([{"Faithfulness Score":1,"Correctness Score":1},{"Faithfulness Score":1,"Correctness Score":0}])";
  try {
    trm::parse_verdicts(out, 3);
    FAIL("expected LengthMismatch");
  } catch (const trm::LengthMismatchError& e) {
    CHECK(e.got() == 2);
    CHECK(e.expected() == 3);
  }
}

TEST_CASE("string digits are coerced") {
  auto v = trm::parse_verdicts(R"(Result: [{"Faithfulness Score": "1", "Correctness Score": "1"}])", 1);
  CHECK(v.verdicts[0].faithfulness == 1);
  CHECK(v.verdicts[0].correctness == 1);
}

TEST_CASE("domain errors") {
  try {
    trm::parse_verdicts(R"([{"Faithfulness Score": 2, "Correctness Score": 1}])", 1);
    FAIL("expected DomainError");
  } catch (const trm::DomainError& e) {
    CHECK(e.index() == 0);
    CHECK(e.field() == "Faithfulness Score");
  }
  CHECK_THROWS_AS(trm::parse_verdicts(R"([{"Faithfulness Score": 1}])", 1), trm::DomainError);
  CHECK_THROWS_AS(trm::parse_verdicts(R"([{"Faithfulness Score": 0.5, "Correctness Score": 1}])", 1),
                  trm::DomainError);
}

TEST_CASE("no array") {
  try {
    trm::parse_verdicts("I cannot evaluate this.", 1);
    FAIL("expected NoJsonArray");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kNoJsonArray);
  }
}

TEST_CASE("case study verdicts") {
  auto cases = nlohmann::json::parse(testutil::slurp(testutil::fixture("case_verdicts.json")));
  REQUIRE(cases.size() == 4);
  for (const auto& c : cases) {
    CAPTURE(c["name"].get<std::string>());
    auto v = trm::parse_verdicts(c["output"].get<std::string>(), 1);
    CHECK(v.verdicts[0].faithfulness == c["expected"][0].get<int>());
    CHECK(v.verdicts[0].correctness == c["expected"][1].get<int>());
  }
}

TEST_CASE("serialize/parse round trip") {
  std::vector<trm::TrmVerdict> vs;
  for (int i = 0; i < 12; ++i)
    vs.push_back({i % 2, "reason \"" + std::to_string(i) + "\"\n[x]", (i / 2) % 2});
  for (std::size_t n = 1; n <= vs.size(); ++n) {
    std::vector<trm::TrmVerdict> head(vs.begin(), vs.begin() + n);
    CHECK(trm::parse_verdicts(trm::serialize_verdicts(head), n).verdicts == head);
  }
}

TEST_CASE("prompt library from directory") {
  auto dir = std::filesystem::temp_directory_path() / "trm_prompt_dir";
  std::filesystem::create_directories(dir);
  for (auto name : {"trm_eval", "policy_answer", "judge_correctness", "judge_usefulness"}) {
    std::ofstream(dir / (std::string(name) + ".txt")) << "T " << name << " {{query}}";
  }
  auto lib = trm::PromptLibrary::from_directory(dir);
  CHECK(lib.render("policy_answer", {{"query", "Q"}}) == "T policy_answer Q");
  CHECK_THROWS_AS(lib.render("policy_answer", {}), trm::Error);
  CHECK_THROWS_AS(lib.render("nope", {{"query", "Q"}}), trm::Error);
  // Values are not re-expanded.
  CHECK(lib.render("policy_answer", {{"query", "{{query}}"}}) == "T policy_answer {{query}}");
  std::filesystem::remove_all(dir);
  CHECK(trm::PromptLibrary::builtin().version() == "v1");
}
