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

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace trm::detail {

/// Scans free text for balanced `open`...`close` spans (string- and
/// comment-aware), parses each with comments allowed, and returns the first
/// value accepted by `accept`.
std::optional<nlohmann::json> first_json(
    std::string_view text, char open,
    const std::function<bool(const nlohmann::json&)>& accept);

/// 0/1 coercion used for model-emitted scores: integers, booleans, floats
/// equal to 0 or 1 and the strings "0"/"1". Empty optional otherwise.
std::optional<int> coerce_bit(const nlohmann::json& v);

/// Real-valued coercion: numbers, or strings holding a number.
std::optional<double> coerce_real(const nlohmann::json& v);

/// String value, or the compact dump of a non-string value.
std::string as_text(const nlohmann::json& v);

/// JSON string literal with invalid UTF-8 replaced rather than rejected.
std::string quote(std::string_view s);

}  // namespace trm::detail
