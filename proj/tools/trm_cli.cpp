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

// trm: command-line front end over the trmkit C API.

#include <openssl/evp.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trm/trm.h"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw CliError{kExitUsage, msg}; }
[[noreturn]] void data_error(const std::string& msg) { throw CliError{kExitData, msg}; }

void check(trm_status s) {
  if (s == TRM_OK) return;
  std::string msg = std::string(trm_status_name(s)) + ": " + trm_last_error();
  if (s == TRM_E_INVALID_ARGUMENT) usage_error(msg);
  data_error(msg);
}

// Owns a string handed out by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { trm_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct DatasetDeleter {
  void operator()(trm_dataset* d) const { trm_dataset_free(d); }
};
struct ContextDeleter {
  void operator()(trm_context* c) const { trm_context_free(c); }
};
struct JudgeDeleter {
  void operator()(trm_judge* j) const { trm_judge_free(j); }
};
using DatasetPtr = std::unique_ptr<trm_dataset, DatasetDeleter>;
using ContextPtr = std::unique_ptr<trm_context, ContextDeleter>;
using JudgePtr = std::unique_ptr<trm_judge, JudgeDeleter>;

// ---- files ------------------------------------------------------------

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) data_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) data_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    data_error("cannot move output into place: " + path.string());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    data_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- layered configuration -------------------------------------------

// Every key with its default. Environment variables are TRM_ plus the key
// upper-cased with dots turned into underscores.
const std::map<std::string, std::string>& config_defaults() {
  static const std::map<std::string, std::string> kDefaults = {
      {"endpoint.base_url", "mock://longer"},
      {"endpoint.model_name", "judge"},
      {"endpoint.api_key_env", "TRM_API_KEY"},
      {"endpoint.timeout_ms", "60000"},
      {"endpoint.max_retries", "2"},
      {"endpoint.temperature", "0"},
      {"endpoint.top_k", "40"},
      {"endpoint.backoff_ms", "500"},
      {"endpoint.max_in_flight", "4"},
      {"prompts.dir", ""},
      {"judge.hints", ""},
      {"reward.variant", "RL_CF_PLUS"},
      {"reward.alpha", ""},
      {"reward.bonus_hit", ""},
      {"reward.penalty_miss", ""},
      {"reward.beta", "2.0"},
      {"grpo.aggregation", "mean"},
      {"grpo.credit_policy", "uniform"},
      {"grpo.epsilon", "1e-8"},
      {"grpo.kl_coefficient", "0.01"},
      {"sim.class_prior_correct", "0.8686"},
      {"sim.faith_correct_coupling", "0.85"},
      {"sim.steps", "400"},
      {"sim.learning_rate", "0.1"},
      {"sim.seed", "1"},
      {"sim.batch_size", "2048"},
      {"sim.signal_strength", "1.0"},
      {"sim.init_correct_logit", "3.0"},
      {"sim.init_faith_logit", "0.0"},
      {"sim.test_seed", "12345"},
  };
  return kDefaults;
}

std::string env_name(const std::string& key) {
  std::string out = "TRM_";
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(c)));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Config {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage_error("cannot open config file " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        usage_error(path + ":" + std::to_string(n) + ": expected key = value");
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), path + ":" + std::to_string(n));
    }
  }

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!config_defaults().count(key)) usage_error(origin + ": unknown config key '" + key + "'");
    values_[key] = value;
  }

  void apply_env() {
    for (const auto& [key, _] : config_defaults())
      if (const char* v = std::getenv(env_name(key).c_str())) values_[key] = v;
  }

  std::string get(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() ? it->second : config_defaults().at(key);
  }

  double real(const std::string& key) const {
    const std::string v = get(key);
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    usage_error("config '" + key + "' is not a number: '" + v + "'");
  }

  long long integer(const std::string& key) const {
    const std::string v = get(key);
    try {
      std::size_t used = 0;
      const long long d = std::stoll(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    usage_error("config '" + key + "' is not an integer: '" + v + "'");
  }

  // Resolved config restricted to the given prefixes, in key order.
  ojson resolved(const std::vector<std::string>& prefixes) const {
    ojson o = ojson::object();
    for (const auto& [key, _] : config_defaults())
      for (const auto& p : prefixes)
        if (key.rfind(p, 0) == 0) o[key] = get(key);
    return o;
  }

 private:
  std::map<std::string, std::string> values_;
};

// ---- run bookkeeping --------------------------------------------------

struct Run {
  std::string command;
  Config config;
  std::vector<std::string> config_sections;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest

  std::string input(const std::string& path) {
    std::string data = read_input(path);
    inputs.emplace_back(path, sha256_hex(data));
    return data;
  }

  // Writes the artifact, or prints it when no path was given.
  void output(const std::optional<std::string>& path, const std::string& content) {
    if (!path || *path == "-") {
      std::cout << content;
      return;
    }
    write_atomic(*path, content);
    const ojson cfg = config.resolved(config_sections);
    ojson m = ojson::object();
    m["command"] = command;
    m["tool_version"] = trm_version();
    m["timestamp"] = utc_timestamp();
    m["config"] = cfg;
    m["config_digest"] = sha256_hex(cfg.dump());
    ojson in = ojson::array();
    for (const auto& [p, d] : inputs) in.push_back(ojson{{"path", p}, {"sha256", d}});
    m["input_digests"] = std::move(in);
    m["output"] = *path;
    m["output_sha256"] = sha256_hex(content);
    write_atomic(*path + ".manifest.json", m.dump(2) + '\n');
  }

  bool to_file(const std::optional<std::string>& path) const { return path && *path != "-"; }
};

DatasetPtr load_dataset(Run& run, const std::string& path) {
  const std::string data = run.input(path);
  trm_dataset* ds = nullptr;
  check(trm_dataset_parse(data.data(), data.size(), &ds));
  return DatasetPtr(ds);
}

ContextPtr make_context(const Config& cfg) {
  trm_context* ctx = nullptr;
  const std::string dir = cfg.get("prompts.dir");
  check(trm_context_new(dir.empty() ? nullptr : dir.c_str(), &ctx));
  return ContextPtr(ctx);
}

JudgePtr make_judge(const Config& cfg, const trm_context* ctx) {
  ojson e = ojson::object();
  e["base_url"] = cfg.get("endpoint.base_url");
  e["model_name"] = cfg.get("endpoint.model_name");
  e["api_key_env"] = cfg.get("endpoint.api_key_env");
  e["timeout_ms"] = cfg.integer("endpoint.timeout_ms");
  e["max_retries"] = cfg.integer("endpoint.max_retries");
  e["temperature"] = cfg.real("endpoint.temperature");
  e["top_k"] = cfg.integer("endpoint.top_k");
  e["backoff_ms"] = cfg.integer("endpoint.backoff_ms");
  const long long in_flight = cfg.integer("endpoint.max_in_flight");
  if (in_flight < 1) usage_error("endpoint.max_in_flight must be >= 1");
  e["max_in_flight"] = in_flight;
  trm_judge* judge = nullptr;
  check(trm_judge_new(e.dump().c_str(), ctx, &judge));
  return JudgePtr(judge);
}

// Flags that override config keys, collected per subcommand.
struct Overrides {
  std::vector<std::pair<std::string, std::shared_ptr<std::string>>> flags;

  void add(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    auto slot = std::make_shared<std::string>();
    sub->add_option(flag, *slot, help + " [" + key + "]");
    flags.emplace_back(key, slot);
  }

  void apply(Config& cfg) const {
    for (const auto& [key, slot] : flags)
      if (!slot->empty()) cfg.set(key, *slot, "flag");
  }
};

void add_endpoint_flags(CLI::App* sub, Overrides& o) {
  o.add(sub, "--base-url", "endpoint.base_url", "Judge endpoint URL or mock://...");
  o.add(sub, "--model", "endpoint.model_name", "Model name sent with each request");
  o.add(sub, "--api-key-env", "endpoint.api_key_env", "Environment variable holding the API key");
  o.add(sub, "--timeout-ms", "endpoint.timeout_ms", "Per-request timeout");
  o.add(sub, "--max-retries", "endpoint.max_retries", "Retries after a transport failure");
  o.add(sub, "--temperature", "endpoint.temperature", "Sampling temperature");
  o.add(sub, "--top-k", "endpoint.top_k", "Top-k sampling (0 to omit)");
  o.add(sub, "--backoff-ms", "endpoint.backoff_ms", "First retry delay, doubled per retry");
  o.add(sub, "--max-in-flight", "endpoint.max_in_flight", "Concurrent request cap");
  o.add(sub, "--prompts", "prompts.dir", "Directory of prompt template overrides");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trmkit: sentence-level reward model toolkit"};
  app.set_version_flag("--version", std::string(trm_version()));
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");

  Run run;
  std::map<CLI::App*, Overrides> overrides;
  std::map<CLI::App*, std::vector<std::string>> sections_of;
  std::function<int()> action;

  auto sub = [&](const std::string& name, const std::string& help,
                 std::vector<std::string> sections) {
    CLI::App* s = app.add_subcommand(name, help);
    overrides[s];
    sections_of[s] = std::move(sections);
    return s;
  };

  // segment
  std::string seg_in = "-";
  std::optional<std::string> seg_out;
  bool seg_marked = false;
  bool seg_strip = false;
  CLI::App* c_segment = sub("segment", "Split an answer into sentence units", {});
  c_segment->add_option("--in", seg_in, "Answer text file (- for stdin)");
  c_segment->add_option("--out", seg_out, "Output file (default stdout)");
  c_segment->add_flag("--marked", seg_marked, "Emit only the marked text");
  c_segment->add_flag("--strip", seg_strip, "Input is marked text; emit the original");
  c_segment->final_callback([&] {
    action = [&] {
      const std::string text = run.input(seg_in);
      LibString out;
      if (seg_strip) {
        check(trm_strip_markers(text.data(), text.size(), out.out()));
        run.output(seg_out, out.str());
        return 0;
      }
      check(trm_segment(text.data(), text.size(), out.out()));
      const auto j = ojson::parse(out.str());
      if (seg_marked) {
        run.output(seg_out, j["marked_text"].get<std::string>());
      } else {
        run.output(seg_out, out.str());
      }
      if (run.to_file(seg_out)) std::cout << j["segments"].size() << " segments\n";
      return 0;
    };
  });

  // validate-dataset
  std::string val_dataset;
  std::optional<std::string> val_out;
  CLI::App* c_validate = sub("validate-dataset", "Check every record of a dataset", {});
  c_validate->add_option("--dataset,dataset", val_dataset, "Dataset JSONL")->required();
  c_validate->add_option("--out", val_out, "Write the validation result as JSON");
  c_validate->final_callback([&] {
    action = [&] {
      const std::string data = run.input(val_dataset);
      LibString out;
      check(trm_dataset_validate(data.data(), data.size(), out.out()));
      const auto j = ojson::parse(out.str());
      if (run.to_file(val_out)) run.output(val_out, out.str() + "\n");
      for (const auto& issue : j["issues"])
        std::cerr << val_dataset << ": " << issue["message"].get<std::string>() << "\n";
      const std::size_t bad = j["issues"].size();
      std::cout << j["valid_records"].get<std::size_t>() << " valid records, " << bad
                << " invalid\n";
      return bad == 0 ? 0 : kExitData;
    };
  });

  // stats
  std::string st_dataset;
  std::optional<std::string> st_out;
  CLI::App* c_stats = sub("stats", "Dataset size and label balance", {});
  c_stats->add_option("--dataset,dataset", st_dataset, "Dataset JSONL")->required();
  c_stats->add_option("--out", st_out, "Output JSON file");
  c_stats->final_callback([&] {
    action = [&] {
      auto ds = load_dataset(run, st_dataset);
      LibString out;
      check(trm_dataset_stats(ds.get(), out.out()));
      run.output(st_out, out.str() + "\n");
      if (run.to_file(st_out)) {
        const auto j = ojson::parse(out.str());
        std::cout << j["queries"] << " queries, " << j["answers"] << " answers, "
                  << j["sentences"] << " sentences, positive fraction "
                  << fmt(j["positive_fraction"].get<double>()) << "\n";
      }
      return 0;
    };
  });

  // parse-verdicts
  std::string pv_in;
  std::string pv_dataset;
  std::optional<std::string> pv_out;
  CLI::App* c_parse = sub("parse-verdicts", "Parse raw reward-model outputs into verdict rows", {});
  c_parse->add_option("--in", pv_in, "Rows {query_id, answer_id, output}")->required();
  c_parse->add_option("--dataset", pv_dataset, "Dataset supplying sentence counts");
  c_parse->add_option("--out", pv_out, "Output JSONL");
  c_parse->final_callback([&] {
    action = [&] {
      DatasetPtr ds;
      if (!pv_dataset.empty()) ds = load_dataset(run, pv_dataset);
      const std::string rows = run.input(pv_in);
      LibString out;
      check(trm_parse_verdict_rows(ds.get(), rows.data(), rows.size(), out.out()));
      run.output(pv_out, out.str());
      if (run.to_file(pv_out)) std::cout << count_lines(out.str()) << " verdict rows\n";
      return 0;
    };
  });

  // reward
  std::string rw_mode = "trm";
  std::string rw_dataset;
  std::string rw_in;
  std::optional<std::string> rw_out;
  CLI::App* c_reward = sub("reward", "Shaped reward-model rewards, policy rewards or anchors",
                           {"reward."});
  c_reward->add_option("--mode", rw_mode, "trm | policy | anchor")
      ->check(CLI::IsMember({"trm", "policy", "anchor"}));
  c_reward->add_option("--dataset", rw_dataset, "Dataset with gold labels (trm, anchor)");
  c_reward->add_option("--in,--verdicts", rw_in, "Verdict rows, or policy rows")->required();
  c_reward->add_option("--out", rw_out, "Output JSONL");
  overrides[c_reward].add(c_reward, "--variant", "reward.variant", "RL_C | RL_CF | RL_CF_PLUS");
  overrides[c_reward].add(c_reward, "--alpha", "reward.alpha", "Faithfulness weight");
  overrides[c_reward].add(c_reward, "--bonus-hit", "reward.bonus_hit", "Bonus for a caught error");
  overrides[c_reward].add(c_reward, "--penalty-miss", "reward.penalty_miss",
                          "Penalty for a missed error");
  overrides[c_reward].add(c_reward, "--beta", "reward.beta", "Preference weight");
  c_reward->final_callback([&] {
    action = [&] {
      const Config& cfg = run.config;
      LibString out;
      if (rw_mode == "policy") {
        const std::string rows = run.input(rw_in);
        check(trm_policy_reward_rows(rows.data(), rows.size(), cfg.real("reward.beta"), out.out()));
      } else {
        if (rw_dataset.empty()) usage_error("--dataset is required for --mode " + rw_mode);
        auto ds = load_dataset(run, rw_dataset);
        const std::string rows = run.input(rw_in);
        if (rw_mode == "anchor") {
          check(trm_anchor_rows(ds.get(), rows.data(), rows.size(), out.out()));
        } else {
          const std::string variant = cfg.get("reward.variant");
          trm_reward_config rc{};
          check(trm_reward_preset(variant.c_str(), &rc));
          std::string label = variant;
          if (!cfg.get("reward.alpha").empty()) rc.alpha = cfg.real("reward.alpha"), label = "custom";
          if (!cfg.get("reward.bonus_hit").empty())
            rc.bonus_hit = cfg.real("reward.bonus_hit"), label = "custom";
          if (!cfg.get("reward.penalty_miss").empty())
            rc.penalty_miss = cfg.real("reward.penalty_miss"), label = "custom";
          check(trm_reward_rows(ds.get(), rows.data(), rows.size(), &rc, label.c_str(), out.out()));
        }
      }
      run.output(rw_out, out.str());
      if (run.to_file(rw_out)) std::cout << count_lines(out.str()) << " rows\n";
      return 0;
    };
  });

  // advantages
  std::string adv_in;
  std::optional<std::string> adv_out;
  CLI::App* c_adv = sub("advantages", "Group-relative advantages and token credit", {"grpo."});
  c_adv->add_option("--in", adv_in, "Rollout groups JSONL")->required();
  c_adv->add_option("--out", adv_out, "Output JSONL (header line first)");
  overrides[c_adv].add(c_adv, "--aggregation", "grpo.aggregation", "mean | sum");
  overrides[c_adv].add(c_adv, "--credit-policy", "grpo.credit_policy",
                       "uniform | sentence_weighted");
  overrides[c_adv].add(c_adv, "--epsilon", "grpo.epsilon", "Std floor below which advantages are 0");
  overrides[c_adv].add(c_adv, "--kl-coefficient", "grpo.kl_coefficient",
                       "Recorded in the header for the trainer");
  c_adv->final_callback([&] {
    action = [&] {
      const Config& cfg = run.config;
      const std::string groups = run.input(adv_in);
      LibString out;
      check(trm_advantage_rows(groups.data(), groups.size(), cfg.get("grpo.aggregation").c_str(),
                               cfg.get("grpo.credit_policy").c_str(), cfg.real("grpo.epsilon"),
                               cfg.real("grpo.kl_coefficient"), out.out()));
      run.output(adv_out, out.str());
      if (run.to_file(adv_out)) std::cout << count_lines(out.str()) - 1 << " rollouts\n";
      return 0;
    };
  });

  // score
  std::string sc_dataset;
  std::string sc_pred;
  std::string sc_name = "model";
  std::optional<std::string> sc_out;
  CLI::App* c_score = sub("score", "Score predicted correctness labels", {});
  c_score->add_option("--dataset", sc_dataset, "Dataset with gold labels")->required();
  c_score->add_option("--pred", sc_pred, "Predictions JSONL")->required();
  c_score->add_option("--name", sc_name, "Column name in the summary table");
  c_score->add_option("--out", sc_out, "Report JSON");
  c_score->final_callback([&] {
    action = [&] {
      auto ds = load_dataset(run, sc_dataset);
      const std::string preds = run.input(sc_pred);
      LibString report;
      check(trm_score(ds.get(), preds.data(), preds.size(), report.out()));
      run.output(sc_out, report.str() + "\n");
      if (run.to_file(sc_out)) {
        ojson table = ojson::array({ojson{{"name", sc_name}, {"report", ojson::parse(report.str())}}});
        LibString text;
        check(trm_report_table(table.dump().c_str(), text.out()));
        std::cout << text.str();
      }
      return 0;
    };
  });

  // judge-correctness
  std::string jc_dataset;
  std::string jc_answers;
  std::string jc_transcripts;
  std::string jc_hints_file;
  std::optional<std::string> jc_out;
  CLI::App* c_jc = sub("judge-correctness", "Judge the factual error ratio of answers",
                       {"endpoint.", "prompts.", "judge."});
  c_jc->add_option("--dataset", jc_dataset, "Dataset (questions and references)")->required();
  c_jc->add_option("--answers", jc_answers, "Rows {query_id, answer_text}")->required();
  c_jc->add_option("--transcripts", jc_transcripts, "Directory for raw judge transcripts");
  c_jc->add_option("--hints-file", jc_hints_file, "Text appended to the judge prompt");
  c_jc->add_option("--out", jc_out, "Output JSONL");
  overrides[c_jc].add(c_jc, "--hints", "judge.hints", "Text appended to the judge prompt");
  add_endpoint_flags(c_jc, overrides[c_jc]);
  c_jc->final_callback([&] {
    action = [&] {
      const Config& cfg = run.config;
      auto ds = load_dataset(run, jc_dataset);
      const std::string answers = run.input(jc_answers);
      std::string hints = cfg.get("judge.hints");
      if (!jc_hints_file.empty()) hints = run.input(jc_hints_file);
      auto ctx = make_context(cfg);
      auto judge = make_judge(cfg, ctx.get());
      LibString out;
      check(trm_judge_correctness_batch(judge.get(), ds.get(), answers.data(), answers.size(),
                                        hints.c_str(),
                                        jc_transcripts.empty() ? nullptr : jc_transcripts.c_str(),
                                        out.out()));
      run.output(jc_out, out.str());
      std::size_t ok = 0;
      std::size_t failed = 0;
      double score_sum = 0.0;
      std::istringstream rows(out.str());
      for (std::string line; std::getline(rows, line);) {
        const auto j = ojson::parse(line);
        if (j.contains("error")) {
          ++failed;
          std::cerr << j["query_id"].get<std::string>() << ": " << j["error"].get<std::string>()
                    << "\n";
        } else {
          ++ok;
          score_sum += j["derived_score"].get<double>();
        }
      }
      if (run.to_file(jc_out))
        std::cout << ok << " judged, " << failed << " failed, mean score "
                  << fmt(ok ? score_sum / static_cast<double>(ok) : 0.0) << "\n";
      return 0;
    };
  });

  // judge-usefulness
  std::string ju_dataset;
  std::string ju_candidates;
  std::string ju_anchors;
  std::string ju_transcripts;
  std::optional<std::string> ju_out;
  CLI::App* c_ju = sub("judge-usefulness", "Position-swapped usefulness duels against anchors",
                       {"endpoint.", "prompts."});
  c_ju->add_option("--dataset", ju_dataset, "Dataset (questions)")->required();
  c_ju->add_option("--candidates", ju_candidates, "Rows {query_id, answer_text}")->required();
  c_ju->add_option("--anchors", ju_anchors, "Rows {query_id, answer_text}")->required();
  c_ju->add_option("--transcripts", ju_transcripts, "Directory for raw judge transcripts");
  c_ju->add_option("--out", ju_out, "Output JSON");
  add_endpoint_flags(c_ju, overrides[c_ju]);
  c_ju->final_callback([&] {
    action = [&] {
      const Config& cfg = run.config;
      auto ds = load_dataset(run, ju_dataset);
      const std::string cand = run.input(ju_candidates);
      const std::string anch = run.input(ju_anchors);
      auto ctx = make_context(cfg);
      auto judge = make_judge(cfg, ctx.get());
      LibString out;
      check(trm_judge_usefulness_suite(judge.get(), ds.get(), cand.data(), cand.size(),
                                       anch.data(), anch.size(),
                                       ju_transcripts.empty() ? nullptr : ju_transcripts.c_str(),
                                       out.out()));
      run.output(ju_out, out.str() + "\n");
      const auto j = ojson::parse(out.str());
      for (const auto& row : j["per_query"])
        if (row.contains("error"))
          std::cerr << row["query_id"].get<std::string>() << ": "
                    << row["error"].get<std::string>() << "\n";
      if (run.to_file(ju_out)) {
        const auto& t = j["tally"];
        std::cout << "win " << t["win"] << "  lose " << t["lose"] << "  tie " << t["tie"]
                  << "  failed " << t["failed"] << "\n";
      }
      return 0;
    };
  });

  // simulate
  bool sim_compare = false;
  std::optional<std::string> sim_out;
  CLI::App* c_sim = sub("simulate", "Toy reward-shaping training run", {"sim.", "reward.variant"});
  c_sim->add_flag("--compare", sim_compare, "Run all three presets and rank them");
  c_sim->add_option("--out", sim_out, "CSV trajectory (JSON ranking with --compare)");
  overrides[c_sim].add(c_sim, "--variant", "reward.variant", "RL_C | RL_CF | RL_CF_PLUS");
  overrides[c_sim].add(c_sim, "--steps", "sim.steps", "Training steps");
  overrides[c_sim].add(c_sim, "--seed", "sim.seed", "Training seed");
  overrides[c_sim].add(c_sim, "--learning-rate", "sim.learning_rate", "Step size");
  overrides[c_sim].add(c_sim, "--class-prior", "sim.class_prior_correct",
                       "Fraction of correct sentences");
  overrides[c_sim].add(c_sim, "--coupling", "sim.faith_correct_coupling",
                       "P(faithfulness label equals correctness label)");
  overrides[c_sim].add(c_sim, "--batch-size", "sim.batch_size", "Sentences per step");
  c_sim->final_callback([&] {
    action = [&] {
      const Config& cfg = run.config;
      ojson sc = ojson::object();
      sc["class_prior_correct"] = cfg.real("sim.class_prior_correct");
      sc["faith_correct_coupling"] = cfg.real("sim.faith_correct_coupling");
      sc["steps"] = cfg.integer("sim.steps");
      sc["learning_rate"] = cfg.real("sim.learning_rate");
      const long long seed = cfg.integer("sim.seed");
      const long long test_seed = cfg.integer("sim.test_seed");
      if (seed < 0 || test_seed < 0) usage_error("seeds must be non-negative");
      sc["seed"] = static_cast<unsigned long long>(seed);
      sc["variant"] = cfg.get("reward.variant");
      sc["batch_size"] = cfg.integer("sim.batch_size");
      sc["signal_strength"] = cfg.real("sim.signal_strength");
      sc["init_correct_logit"] = cfg.real("sim.init_correct_logit");
      sc["init_faith_logit"] = cfg.real("sim.init_faith_logit");
      sc["test_seed"] = static_cast<unsigned long long>(test_seed);
      LibString out;
      if (sim_compare) {
        check(trm_simulate_compare(sc.dump().c_str(), out.out()));
        run.output(sim_out, out.str() + "\n");
        if (run.to_file(sim_out)) {
          for (const auto& v : ojson::parse(out.str()))
            std::cout << v["variant"].get<std::string>() << "  f1_incorrect "
                      << fmt(v["f1_incorrect"].get<double>()) << "  detection "
                      << fmt(v["detection_proxy"].get<double>()) << "  mean_reward "
                      << fmt(v["mean_reward"].get<double>()) << "\n";
        }
      } else {
        check(trm_simulate(sc.dump().c_str(), out.out()));
        run.output(sim_out, out.str());
        if (run.to_file(sim_out)) std::cout << count_lines(out.str()) - 1 << " steps\n";
      }
      return 0;
    };
  });

  // report
  std::vector<std::string> rp_reports;
  std::optional<std::string> rp_out;
  CLI::App* c_report = sub("report", "Side-by-side table of score reports", {});
  c_report->add_option("--report,reports", rp_reports, "NAME=report.json (repeatable)")
      ->required();
  c_report->add_option("--out", rp_out, "Write the table to a file");
  c_report->final_callback([&] {
    action = [&] {
      ojson arr = ojson::array();
      for (const auto& entry : rp_reports) {
        const auto eq = entry.find('=');
        const std::string name = eq == std::string::npos ? fs::path(entry).stem().string()
                                                         : entry.substr(0, eq);
        const std::string path = eq == std::string::npos ? entry : entry.substr(eq + 1);
        const std::string text = run.input(path);
        const auto j = ojson::parse(text, nullptr, false);
        if (j.is_discarded()) data_error(path + ": not valid JSON");
        arr.push_back(ojson{{"name", name}, {"report", j}});
      }
      LibString table;
      check(trm_report_table(arr.dump().c_str(), table.out()));
      run.output(rp_out, table.str());
      if (run.to_file(rp_out)) std::cout << table.str();
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    Config& cfg = run.config;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (CLI::App* s : app.get_subcommands()) {
      run.command = s->get_name();
      run.config_sections = sections_of[s];
      overrides[s].apply(cfg);
    }
    cfg.apply_env();
    if (!action) usage_error("no subcommand given");
    return action();
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
