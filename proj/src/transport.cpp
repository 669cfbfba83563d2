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

#include "httplib.h"

#include <cstdlib>

#include "lenient_json.hpp"
#include "trm/error.hpp"
#include "trm/judge.hpp"

namespace trm {
namespace {

using nlohmann::json;

class HttpTransport : public ChatTransport {
 public:
  explicit HttpTransport(const ChatEndpointConfig& cfg) : api_key_env_(cfg.api_key_env) {
    const std::string& url = cfg.base_url;
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/chat/completions";
  }

  std::string complete(const ChatRequest& request) override {
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!api_key_env_.empty()) {
      if (const char* key = std::getenv(api_key_env_.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(path_, headers, chat_request_body(request), "application/json");
    if (!res)
      throw Error(ErrorCode::kTransport, "request to " + origin_ + path_ +
                                             " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorCode::kTransport,
                  "HTTP " + std::to_string(res->status) + " from " + origin_ + path_);
    return chat_response_content(res->body);
  }

 private:
  std::string api_key_env_;
  std::string origin_;
  std::string path_;
};

// Offline judges. Each reads the input block at the end of the prompt, so
// it answers what the prompt actually asks.
class MockTransport : public ChatTransport {
 public:
  enum class Mode { kFirst, kSecond, kLonger, kRatio };

  MockTransport(Mode mode, double ratio) : mode_(mode), ratio_(ratio) {}

  std::string complete(const ChatRequest& request) override {
    const std::string& p = request.prompt;
    if (auto duel = input_block(p, "Answer 1")) return usefulness(*duel);
    if (input_block(p, "Answer to be Analyzed")) return correctness();
    if (auto trm = input_block(p, "answer_order")) return trm_list(*trm);
    throw Error(ErrorCode::kTransport, "mock judge does not recognise this prompt");
  }

 private:
  static std::optional<json> input_block(const std::string& prompt, const char* key) {
    return detail::first_json(prompt, '{', [key](const json& j) {
      return j.is_object() && j.contains(key) && j[key].is_string();
    });
  }

  std::string usefulness(const json& block) const {
    int order = 1;
    switch (mode_) {
      case Mode::kFirst: order = 1; break;
      case Mode::kSecond: order = 2; break;
      case Mode::kLonger:
      case Mode::kRatio: {
        const auto a = block["Answer 1"].get<std::string>().size();
        const auto b = block["Answer 2"].get<std::string>().size();
        order = b > a ? 2 : 1;
        break;
      }
    }
    json out = {{"Usefulness Comparative Analysis", "mock judge"},
                {"Final Partial Order", "Answer " + std::to_string(order)}};
    return out.dump(4);
  }

  std::string correctness() const {
    json out = {{"Error Analysis", json::array()},
                {"Error Ratio", mode_ == Mode::kRatio ? ratio_ : 0.0}};
    return out.dump(4);
  }

  static std::string trm_list(const json& block) {
    const std::string text = block["answer_order"].get<std::string>();
    std::size_t n = 0;
    for (auto pos = text.find(" [Sentence "); pos != std::string::npos;
         pos = text.find(" [Sentence ", pos + 1))
      ++n;
    json arr = json::array();
    for (std::size_t i = 0; i < n; ++i)
      arr.push_back({{"Faithfulness Score", 1},
                     {"Correctness Reason", "mock judge"},
                     {"Correctness Score", 1}});
    return arr.dump(4);
  }

  Mode mode_;
  double ratio_;
};

}  // namespace

std::shared_ptr<ChatTransport> make_transport(const ChatEndpointConfig& cfg) {
  const std::string& url = cfg.base_url;
  if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0)
    return std::make_shared<HttpTransport>(cfg);
  if (url.rfind("mock://", 0) != 0)
    throw Error(ErrorCode::kInvalidArgument, "unsupported endpoint URL '" + url + "'");
  const std::string name = url.substr(7);
  if (name == "first") return std::make_shared<MockTransport>(MockTransport::Mode::kFirst, 0.0);
  if (name == "second") return std::make_shared<MockTransport>(MockTransport::Mode::kSecond, 0.0);
  if (name == "longer") return std::make_shared<MockTransport>(MockTransport::Mode::kLonger, 0.0);
  if (name.rfind("ratio/", 0) == 0) {
    const auto r = detail::coerce_real(json(name.substr(6)));
    if (!r) throw Error(ErrorCode::kInvalidArgument, "bad mock ratio in '" + url + "'");
    return std::make_shared<MockTransport>(MockTransport::Mode::kRatio, *r);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mock judge '" + url + "'");
}

}  // namespace trm
