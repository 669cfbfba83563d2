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

#include "lenient_json.hpp"

#include <cmath>
#include <cstdlib>

namespace trm::detail {
namespace {

using nlohmann::json;

// End (exclusive) of the balanced span starting at `begin`, or npos.
std::size_t match_span(std::string_view text, std::size_t begin, char open, char close) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = begin; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      const std::size_t nl = text.find('\n', i);
      if (nl == std::string_view::npos) return std::string_view::npos;
      i = nl;
    } else if (c == open) {
      ++depth;
    } else if (c == close) {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<json> first_json(std::string_view text, char open,
                               const std::function<bool(const json&)>& accept) {
  const char close = open == '[' ? ']' : '}';
  for (std::size_t pos = text.find(open); pos != std::string_view::npos;
       pos = text.find(open, pos + 1)) {
    const std::size_t end = match_span(text, pos, open, close);
    if (end == std::string_view::npos) continue;
    json j = json::parse(text.substr(pos, end - pos), nullptr, /*allow_exceptions=*/false,
                         /*ignore_comments=*/true);
    if (j.is_discarded()) continue;
    if (accept(j)) return j;
  }
  return std::nullopt;
}

std::optional<int> coerce_bit(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) return static_cast<int>(n);
    return std::nullopt;
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == 0.0 || d == 1.0) return static_cast<int>(d);
    return std::nullopt;
  }
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    if (s == "0") return 0;
    if (s == "1") return 1;
  }
  return std::nullopt;
}

std::optional<double> coerce_real(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = trim(v.get<std::string>());
    bool percent = false;
    if (!s.empty() && s.back() == '%') {
      percent = true;
      s.pop_back();
    }
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(d)) return std::nullopt;
    return percent ? d / 100.0 : d;
  }
  return std::nullopt;
}

std::string as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string quote(std::string_view s) {
  return json(std::string(s)).dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace trm::detail
