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

#include "trm/prompts.hpp"

#include <fstream>
#include <sstream>

#include "prompt_data.hpp"
#include "trm/error.hpp"

namespace trm {

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary kBuiltin = [] {
    PromptLibrary lib;
    lib.version_ = std::string(detail::builtin_prompt_version());
    for (const auto& [name, text] : detail::builtin_prompt_sources())
      lib.templates_.emplace(std::string(name), std::string(text));
    return lib;
  }();
  return kBuiltin;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::kIo, "prompt directory not found: " + dir.string());
  PromptLibrary lib = builtin();
  lib.version_ = "custom:" + dir.filename().string();
  for (auto& [name, text] : lib.templates_) {
    const auto file = dir / (name + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read prompt " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return lib;
}

const std::string& PromptLibrary::source(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end())
    throw Error(ErrorCode::kInvalidArgument, "unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

std::string PromptLibrary::render(
    std::string_view name, const std::map<std::string, std::string, std::less<>>& values) const {
  const std::string& tpl = source(name);
  std::string out;
  out.reserve(tpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const std::size_t open = tpl.find("{{", pos);
    if (open == std::string::npos) break;
    const std::size_t close = tpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    const std::string_view key(tpl.data() + open + 2, close - open - 2);
    auto it = values.find(key);
    if (it == values.end())
      throw Error(ErrorCode::kInvalidArgument, "template '" + std::string(name) +
                                                   "' needs a value for {{" + std::string(key) +
                                                   "}}");
    out.append(tpl, pos, open - pos);
    out.append(it->second);
    pos = close + 2;
  }
  out.append(tpl, pos, std::string::npos);
  return out;
}

}  // namespace trm
