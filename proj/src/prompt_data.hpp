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

#include <string_view>
#include <utility>
#include <vector>

namespace trm::detail {

// Defined in the build-generated prompt_data.cpp (see cmake/EmbedPrompts.cmake).
std::string_view builtin_prompt_version();
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_prompt_sources();

}  // namespace trm::detail
