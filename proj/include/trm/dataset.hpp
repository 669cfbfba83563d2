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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trm/error.hpp"
#include "trm/segmenter.hpp"

namespace trm {

/// Gold annotation for one answer sentence.
struct SentenceLabel {
  int faithfulness = 1;  // 1 faithful, 0 unfaithful
  int correctness = 1;   // 1 correct, 0 incorrect
  std::string rationale;

  bool operator==(const SentenceLabel&) const = default;
};

struct AnnotatedAnswer {
  std::string answer_id;
  SegmentedAnswer segmented;
  std::vector<SentenceLabel> labels;

  bool operator==(const AnnotatedAnswer&) const = default;
};

struct QueryRecord {
  std::string query_id;
  std::string query;
  std::string now_time;
  std::vector<std::string> documents;
  std::vector<AnnotatedAnswer> answers;

  /// Documents joined with a blank line, as the prompts' `search_result`.
  std::string search_result() const;

  /// Index of the answer with this id; throws Error(kInvalidArgument).
  std::size_t answer_index(std::string_view answer_id) const;

  bool operator==(const QueryRecord&) const = default;
};

enum class Quadrant {
  kFaithfulCorrect,
  kUnfaithfulCorrect,
  kFaithfulIncorrect,
  kUnfaithfulIncorrect,
};

const char* quadrant_name(Quadrant q);
Quadrant classify_quadrant(const SentenceLabel& label);

struct DatasetStats {
  std::size_t queries = 0;
  std::size_t answers = 0;
  std::size_t sentences = 0;
  std::size_t positive_sentences = 0;
  double positive_fraction = 0.0;
  double negative_fraction = 0.0;
};

/// Throws Error(kEmptyDataset) for an empty list.
DatasetStats compute_stats(const std::vector<QueryRecord>& records);

/// Validates every record invariant; the 1-based `line` is attached to the
/// DataError thrown on failure.
QueryRecord parse_record(std::string_view json_line, std::size_t line);
std::string serialize_record(const QueryRecord& record);

/// Throws on the first bad line, including a repeated query_id.
std::vector<QueryRecord> read_dataset(std::istream& in);

struct DatasetIssue {
  std::size_t line = 0;
  std::string field;
  ErrorCode code = ErrorCode::kSchema;
  std::string message;
};

struct DatasetValidation {
  std::size_t valid_records = 0;
  std::vector<DatasetIssue> issues;
};

/// Checks every line instead of stopping at the first failure.
DatasetValidation validate_dataset(std::istream& in);
std::vector<QueryRecord> load_dataset(const std::filesystem::path& path);

/// Canonical JSONL: one record per line, fixed key order, trailing newline.
void write_dataset(std::ostream& out, const std::vector<QueryRecord>& records);
void save_dataset(const std::filesystem::path& path, const std::vector<QueryRecord>& records);

}  // namespace trm
