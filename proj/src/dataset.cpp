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

#include "trm/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "trm/error.hpp"

namespace trm {
namespace {

using nlohmann::json;

class RecordReader {
 public:
  explicit RecordReader(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& reason) const {
    throw DataError(ErrorCode::kSchema, line_, field, reason);
  }

  const json& member(const json& obj, const char* key, const std::string& path) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + key, "missing field");
    return *it;
  }

  std::string string_field(const json& obj, const char* key, const std::string& path,
                           bool required = true) const {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + key, "missing field");
      return {};
    }
    if (!it->is_string()) fail(path + key, "expected a string");
    return it->get<std::string>();
  }

  int bit_field(const json& obj, const char* key, const std::string& path) const {
    const json& v = member(obj, key, path);
    if (!v.is_number_integer()) fail(path + key, "expected integer 0 or 1");
    const auto n = v.get<long long>();
    if (n != 0 && n != 1) fail(path + key, "value " + std::to_string(n) + " outside {0,1}");
    return static_cast<int>(n);
  }

  SegmentedAnswer segments(const json& answer, const std::string& path) const {
    if (auto it = answer.find("answer_order"); it != answer.end()) {
      if (!it->is_array()) fail(path + "answer_order", "expected an array");
      std::vector<Segment> segs;
      for (std::size_t k = 0; k < it->size(); ++k) {
        const json& s = (*it)[k];
        const std::string sp = path + "answer_order[" + std::to_string(k) + "].";
        if (!s.is_object()) fail(sp, "expected an object");
        Segment seg;
        seg.text = string_field(s, "text", sp);
        if (seg.text.find_first_not_of(" \t\r\n\v\f") == std::string::npos)
          fail(sp + "text", "segment text is blank");
        if (auto ix = s.find("index"); ix != s.end()) {
          if (!ix->is_number_integer() || ix->get<long long>() != static_cast<long long>(k))
            fail(sp + "index", "indices must be consecutive from 0");
        }
        if (auto kd = s.find("kind"); kd != s.end()) {
          if (!kd->is_string()) fail(sp + "kind", "expected a string");
          try {
            seg.kind = parse_segment_kind(kd->get<std::string>());
          } catch (const Error& e) {
            fail(sp + "kind", e.what());
          }
        }
        segs.push_back(std::move(seg));
      }
      if (segs.empty()) fail(path + "answer_order", "answer has no segments");
      return make_segmented(std::move(segs));
    }
    // Unsegmented answers are accepted and split with the stock rules.
    const std::string text = string_field(answer, "answer_text", path);
    try {
      return segment(text);
    } catch (const Error& e) {
      fail(path + "answer_text", e.what());
    }
  }

 private:
  std::size_t line_;
};

}  // namespace

std::string QueryRecord::search_result() const {
  std::string out;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (i > 0) out.append("\n\n");
    out.append(documents[i]);
  }
  return out;
}

std::size_t QueryRecord::answer_index(std::string_view answer_id) const {
  for (std::size_t i = 0; i < answers.size(); ++i)
    if (answers[i].answer_id == answer_id) return i;
  throw Error(ErrorCode::kInvalidArgument,
              "query '" + query_id + "' has no answer '" + std::string(answer_id) + "'");
}

const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::kFaithfulCorrect: return "faithful_correct";
    case Quadrant::kUnfaithfulCorrect: return "unfaithful_correct";
    case Quadrant::kFaithfulIncorrect: return "faithful_incorrect";
    case Quadrant::kUnfaithfulIncorrect: return "unfaithful_incorrect";
  }
  return "faithful_correct";
}

Quadrant classify_quadrant(const SentenceLabel& label) {
  if (label.correctness == 1)
    return label.faithfulness == 1 ? Quadrant::kFaithfulCorrect : Quadrant::kUnfaithfulCorrect;
  return label.faithfulness == 1 ? Quadrant::kFaithfulIncorrect : Quadrant::kUnfaithfulIncorrect;
}

DatasetStats compute_stats(const std::vector<QueryRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset has no records");
  DatasetStats s;
  s.queries = records.size();
  for (const auto& r : records) {
    s.answers += r.answers.size();
    for (const auto& a : r.answers) {
      s.sentences += a.labels.size();
      for (const auto& l : a.labels) s.positive_sentences += l.correctness == 1 ? 1 : 0;
    }
  }
  if (s.sentences > 0) {
    s.positive_fraction =
        static_cast<double>(s.positive_sentences) / static_cast<double>(s.sentences);
    s.negative_fraction = static_cast<double>(s.sentences - s.positive_sentences) /
                          static_cast<double>(s.sentences);
  }
  return s;
}

QueryRecord parse_record(std::string_view json_line, std::size_t line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DataError(ErrorCode::kParse, line, "", e.what());
  }
  const RecordReader rd(line);
  if (!j.is_object()) rd.fail("", "record must be a JSON object");

  QueryRecord rec;
  rec.query_id = rd.string_field(j, "query_id", "");
  if (rec.query_id.empty()) rd.fail("query_id", "must be non-empty");
  rec.query = rd.string_field(j, "query", "");
  rec.now_time = rd.string_field(j, "now_time", "", false);

  if (auto it = j.find("search_result"); it != j.end()) {
    if (it->is_string()) {
      rec.documents.push_back(it->get<std::string>());
    } else if (it->is_array()) {
      for (std::size_t d = 0; d < it->size(); ++d) {
        if (!(*it)[d].is_string())
          rd.fail("search_result[" + std::to_string(d) + "]", "expected a string");
        rec.documents.push_back((*it)[d].get<std::string>());
      }
    } else {
      rd.fail("search_result", "expected a list of strings");
    }
  }

  const json& answers = rd.member(j, "answers", "");
  if (!answers.is_array()) rd.fail("answers", "expected an array");
  if (answers.empty()) rd.fail("answers", "record needs at least one answer");
  std::set<std::string> seen;
  for (std::size_t a = 0; a < answers.size(); ++a) {
    const json& aj = answers[a];
    const std::string path = "answers[" + std::to_string(a) + "].";
    if (!aj.is_object()) rd.fail(path, "expected an object");
    AnnotatedAnswer ans;
    ans.answer_id = rd.string_field(aj, "answer_id", path);
    if (!seen.insert(ans.answer_id).second)
      rd.fail(path + "answer_id", "duplicate answer_id '" + ans.answer_id + "'");
    ans.segmented = rd.segments(aj, path);

    const json& labels = rd.member(aj, "labels", path);
    if (!labels.is_array()) rd.fail(path + "labels", "expected an array");
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::string lp = path + "labels[" + std::to_string(k) + "].";
      if (!labels[k].is_object()) rd.fail(lp, "expected an object");
      SentenceLabel l;
      l.faithfulness = rd.bit_field(labels[k], "faithfulness", lp);
      l.correctness = rd.bit_field(labels[k], "correctness", lp);
      l.rationale = rd.string_field(labels[k], "rationale", lp, false);
      ans.labels.push_back(std::move(l));
    }
    if (ans.labels.size() != ans.segmented.segments.size())
      rd.fail(path + "labels", "label count " + std::to_string(ans.labels.size()) +
                                   " != segment count " +
                                   std::to_string(ans.segmented.segments.size()));
    rec.answers.push_back(std::move(ans));
  }
  return rec;
}

std::string serialize_record(const QueryRecord& record) {
  using ojson = nlohmann::ordered_json;
  ojson j = ojson::object();
  j["query_id"] = record.query_id;
  j["query"] = record.query;
  j["now_time"] = record.now_time;
  j["search_result"] = record.documents;
  ojson answers = ojson::array();
  for (const auto& a : record.answers) {
    ojson aj = ojson::object();
    aj["answer_id"] = a.answer_id;
    ojson order = ojson::array();
    for (const auto& s : a.segmented.segments) {
      ojson sj = ojson::object();
      sj["index"] = s.index;
      sj["text"] = s.text;
      sj["kind"] = segment_kind_name(s.kind);
      order.push_back(std::move(sj));
    }
    aj["answer_order"] = std::move(order);
    ojson labels = ojson::array();
    for (const auto& l : a.labels) {
      ojson lj = ojson::object();
      lj["faithfulness"] = l.faithfulness;
      lj["correctness"] = l.correctness;
      lj["rationale"] = l.rationale;
      labels.push_back(std::move(lj));
    }
    aj["labels"] = std::move(labels);
    answers.push_back(std::move(aj));
  }
  j["answers"] = std::move(answers);
  return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

std::vector<QueryRecord> read_dataset(std::istream& in) {
  std::vector<QueryRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    QueryRecord rec = parse_record(line, n);
    if (!ids.insert(rec.query_id).second)
      throw DataError(ErrorCode::kSchema, n, "query_id", "duplicate query_id '" + rec.query_id + "'");
    out.push_back(std::move(rec));
  }
  return out;
}

DatasetValidation validate_dataset(std::istream& in) {
  DatasetValidation v;
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      QueryRecord rec = parse_record(line, n);
      if (!ids.insert(rec.query_id).second)
        throw DataError(ErrorCode::kSchema, n, "query_id", "duplicate query_id '" + rec.query_id + "'");
      ++v.valid_records;
    } catch (const DataError& e) {
      v.issues.push_back({e.line(), e.field(), e.code(), e.what()});
    }
  }
  return v;
}

std::vector<QueryRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const std::vector<QueryRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

void save_dataset(const std::filesystem::path& path, const std::vector<QueryRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write dataset " + path.string());
  write_dataset(out, records);
}

}  // namespace trm
