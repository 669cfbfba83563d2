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
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "trm/dataset.hpp"

using testutil::record_line;

namespace {

std::vector<trm::QueryRecord> parse_all(const std::string& text) {
  std::istringstream in(text);
  return trm::read_dataset(in);
}

}  // namespace

TEST_CASE("two-line dataset") {
  const std::string text = record_line("a", {{"a0", "One. Two.", {1, 1}}}) + "\n" +
                           record_line("b", {{"b0", "Three.", {0}}}) + "\n";
  auto ds = parse_all(text);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].query_id == "a");
  CHECK(ds[0].answers[0].segmented.segments.size() == 2);
  CHECK(ds[1].answers[0].labels[0].correctness == 0);
}

TEST_CASE("label count mismatch") {
  const std::string text = record_line("a", {{"a0", "One. Two. Three.", {1, 1}}});
  try {
    parse_all(text);
    FAIL("expected SchemaError");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kSchema);
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("label") != std::string::npos);
  }
}

TEST_CASE("label domain") {
  auto j = nlohmann::json::parse(record_line("a", {{"a0", "One.", {1}}}));
  j["answers"][0]["labels"][0]["correctness"] = 2;
  try {
    parse_all(j.dump());
    FAIL("expected SchemaError");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kSchema);
    CHECK(e.field().find("correctness") != std::string::npos);
  }
}

TEST_CASE("parse errors carry the line") {
  const std::string text = record_line("a", {{"a0", "One.", {1}}}) + "\n{not json\n";
  try {
    parse_all(text);
    FAIL("expected ParseError");
  } catch (const trm::DataError& e) {
    CHECK(e.code() == trm::ErrorCode::kParse);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("duplicate query ids") {
  const std::string line = record_line("a", {{"a0", "One.", {1}}});
  CHECK_THROWS_AS(parse_all(line + "\n" + line + "\n"), trm::DataError);
}

TEST_CASE("empty dataset") {
  CHECK(parse_all("\n\n").empty());
  try {
    trm::compute_stats({});
    FAIL("expected EmptyDataset");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kEmptyDataset);
  }
}

TEST_CASE("quadrants") {
  using trm::Quadrant;
  CHECK(trm::classify_quadrant({1, 0, ""}) == Quadrant::kFaithfulIncorrect);
  CHECK(trm::classify_quadrant({0, 1, ""}) == Quadrant::kUnfaithfulCorrect);
  CHECK(trm::classify_quadrant({1, 1, ""}) == Quadrant::kFaithfulCorrect);
  CHECK(trm::classify_quadrant({0, 0, ""}) == Quadrant::kUnfaithfulIncorrect);
}

TEST_CASE("stats") {
  auto ds = parse_all(record_line("a", {{"a0", "A. B. C. D.", {1, 1, 1, 0}}}));
  auto s = trm::compute_stats(ds);
  CHECK(s.queries == 1);
  CHECK(s.answers == 1);
  CHECK(s.sentences == 4);
  CHECK(s.positive_fraction == 0.75);
  CHECK(s.negative_fraction == 0.25);

  auto twice = ds;
  twice.push_back(ds[0]);
  auto d = trm::compute_stats(twice);
  CHECK(d.queries == 2);
  CHECK(d.sentences == 8);
  CHECK(d.positive_sentences == 6);
  CHECK(d.positive_fraction == 0.75);
}

TEST_CASE("search_result joins documents with a blank line") {
  auto ds = parse_all(record_line("a", {{"a0", "One.", {1}}}, {"First.", "Second."}));
  CHECK(ds[0].search_result() == "First.\n\nSecond.");
  auto none = parse_all(record_line("b", {{"b0", "One.", {1}}}, {}));
  CHECK(none[0].search_result().empty());
}

TEST_CASE("save/load round trip") {
  auto ds = trm::load_dataset(testutil::fixture("mini_dataset.jsonl"));
  REQUIRE(ds.size() == 10);
  auto path = std::filesystem::temp_directory_path() / "trm_dataset_roundtrip.jsonl";
  trm::save_dataset(path, ds);
  CHECK(trm::load_dataset(path) == ds);
  std::ostringstream a, b;
  trm::write_dataset(a, ds);
  trm::write_dataset(b, trm::load_dataset(path));
  CHECK(a.str() == b.str());
  std::filesystem::remove(path);
  CHECK(trm::parse_record(trm::serialize_record(ds[3]), 1) == ds[3]);
}

TEST_CASE("answer_index") {
  auto ds = parse_all(record_line("a", {{"x", "One.", {1}}, {"y", "Two.", {1}}}));
  CHECK(ds[0].answer_index("y") == 1);
  CHECK_THROWS_AS(ds[0].answer_index("z"), trm::Error);
}

TEST_CASE("validate_dataset reports every bad line") {
  const std::string good = record_line("a", {{"a0", "One.", {1}}});
  const std::string bad = record_line("b", {{"b0", "One. Two.", {1}}});
  std::istringstream in(good + "\n" + bad + "\n{oops\n");
  auto v = trm::validate_dataset(in);
  CHECK(v.valid_records == 1);
  REQUIRE(v.issues.size() == 2);
  CHECK(v.issues[0].line == 2);
  CHECK(v.issues[0].code == trm::ErrorCode::kSchema);
  CHECK(v.issues[1].line == 3);
  CHECK(v.issues[1].code == trm::ErrorCode::kParse);
}

TEST_CASE("missing file") {
  try {
    trm::load_dataset("/nonexistent/trm.jsonl");
    FAIL("expected IoError");
  } catch (const trm::Error& e) {
    CHECK(e.code() == trm::ErrorCode::kIo);
  }
}
