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
#include <string>
#include <string_view>
#include <vector>

namespace trm {

enum class SegmentKind { kPlain, kHeading, kListItem };

const char* segment_kind_name(SegmentKind kind);
/// Throws Error(kInvalidArgument) on an unknown name.
SegmentKind parse_segment_kind(std::string_view name);

struct Segment {
  std::size_t index = 0;
  // Original bytes, including any whitespace that preceded the unit and the
  // terminal punctuation (or newline) that closed it.
  std::string text;
  SegmentKind kind = SegmentKind::kPlain;

  bool operator==(const Segment&) const = default;
};

struct SegmentedAnswer {
  std::vector<Segment> segments;
  std::string marked_text;

  bool operator==(const SegmentedAnswer&) const = default;
};

/// Splits an answer into sentence units.
///
/// Plain text is split after terminal punctuation (. ! ? 。 ！ ？ ；). Lines
/// that open with a heading marker ("#", "**Title**", "一、") or a list
/// marker ("1.", "1、", "(1)", "-", "•", "*") form one unit each, closed by
/// their newline. Whitespace between units belongs to the following unit;
/// trailing whitespace belongs to the last one. Every input byte ends up in
/// exactly one segment.
///
/// Throws Error(kEmptyInput) if `raw_answer` has no non-whitespace content.
SegmentedAnswer segment(std::string_view raw_answer);

/// Rebuilds a SegmentedAnswer from stored segments (e.g. loaded from JSONL):
/// re-indexes and recomputes `marked_text`.
SegmentedAnswer make_segmented(std::vector<Segment> segments);

/// Marker text for the i-th unit, e.g. "[Sentence 2]".
std::string sentence_marker(std::size_t index);

/// Each segment followed by " [Sentence i]". Literal markers already present
/// in the source are escaped so they survive `strip_markers`.
std::string render_marked(const SegmentedAnswer& answer);
std::string render_marked(const std::vector<Segment>& segments);

/// Inverse of render_marked: drops inserted markers with their separator and
/// unescapes literal ones.
std::string strip_markers(std::string_view marked_text);

}  // namespace trm
