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

#include "trm/segmenter.hpp"

#include <array>
#include <cstdint>

#include "trm/error.hpp"

namespace trm {
namespace {

// U+241B SYMBOL FOR ESCAPE, reserved for literal markers in marked text.
constexpr std::string_view kEscape = "\xE2\x90\x9B";
constexpr std::string_view kMarkerOpen = "[Sentence";

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0)
      return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0)
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) |
                                    (c2 << 6) | c3),
              4};
  }
  // Invalid sequence: consume one byte so scanning always advances.
  return {0xFFFD, 1};
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' ||
         c == U'\f' || c == 0x00A0 || c == 0x3000;
}

bool is_ascii_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

bool is_cjk_terminal(char32_t c) {
  return c == 0x3002 || c == 0xFF01 || c == 0xFF1F || c == 0xFF1B;
}

bool is_terminal_char(char32_t c) { return is_ascii_terminal(c) || is_cjk_terminal(c); }

bool is_closer(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U')': case U']':
    case 0x201D: case 0x2019: case 0xFF09: case 0x300D:
    case 0x300F: case 0x3011: case 0x300B: case 0x3009:
      return true;
    default:
      return false;
  }
}

bool is_cjk_numeral(char32_t c) {
  constexpr std::array<char32_t, 10> kNumerals = {
      0x4E00, 0x4E8C, 0x4E09, 0x56DB, 0x4E94, 0x516D, 0x4E03, 0x516B, 0x4E5D, 0x5341};
  for (char32_t n : kNumerals)
    if (c == n) return true;
  return false;
}

constexpr char32_t kIdeographicComma = 0x3001;  // 、

bool all_space(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const auto cp = decode(s, i);
    if (!is_space(cp.value)) return false;
    i += cp.length;
  }
  return true;
}

std::string_view trim_right_space(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Classifies one line (without its newline) by its leading marker.
// Returns kPlain when the line carries no structural marker.
SegmentKind classify_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size()) {
    const auto cp = decode(line, i);
    if (cp.value != U' ' && cp.value != U'\t' && cp.value != 0x3000) break;
    i += cp.length;
  }
  const std::string_view rest = line.substr(i);
  if (rest.empty()) return SegmentKind::kPlain;

  // Markdown heading: 1-6 '#' then blank or end.
  if (rest[0] == '#') {
    std::size_t h = 0;
    while (h < rest.size() && rest[h] == '#') ++h;
    if (h <= 6 && (h == rest.size() || rest[h] == ' ' || rest[h] == '\t'))
      return SegmentKind::kHeading;
  }
  // Bold-only line: **Title**, optionally followed by a colon.
  if (rest.starts_with("**")) {
    std::string_view t = trim_right_space(rest);
    if (t.ends_with(":")) t.remove_suffix(1);
    else if (t.ends_with("\xEF\xBC\x9A")) t.remove_suffix(3);  // ：
    if (t.size() > 4 && t.ends_with("**") &&
        t.substr(2, t.size() - 4).find("**") == std::string_view::npos)
      return SegmentKind::kHeading;
  }
  // Chinese section numbering: 一、 二、 ...
  {
    std::size_t j = 0;
    bool any = false;
    while (j < rest.size()) {
      const auto cp = decode(rest, j);
      if (!is_cjk_numeral(cp.value)) break;
      any = true;
      j += cp.length;
    }
    if (any && j < rest.size() && decode(rest, j).value == kIdeographicComma)
      return SegmentKind::kHeading;
  }
  // Numbered items: 1.  1、  1)  1）  1．
  {
    std::size_t d = 0;
    while (d < rest.size() && d < 4 && rest[d] >= '0' && rest[d] <= '9') ++d;
    if (d >= 1 && d <= 3 && d < rest.size()) {
      const auto cp = decode(rest, d);
      const std::size_t after = d + cp.length;
      if (cp.value == U'.') {
        if (after == rest.size() || !(rest[after] >= '0' && rest[after] <= '9'))
          return SegmentKind::kListItem;
      } else if (cp.value == kIdeographicComma || cp.value == U')' ||
                 cp.value == 0xFF09 || cp.value == 0xFF0E) {
        return SegmentKind::kListItem;
      }
    }
  }
  // Parenthesised numbers: (1)  （1）
  {
    const auto open = decode(rest, 0);
    if (open.value == U'(' || open.value == 0xFF08) {
      std::size_t d = open.length;
      while (d < rest.size() && rest[d] >= '0' && rest[d] <= '9') ++d;
      const std::size_t digits = d - open.length;
      if (digits >= 1 && digits <= 3 && d < rest.size()) {
        const auto close = decode(rest, d);
        if (close.value == U')' || close.value == 0xFF09) return SegmentKind::kListItem;
      }
    }
  }
  // Bullets.
  {
    const auto cp = decode(rest, 0);
    if (cp.value == 0x2022) return SegmentKind::kListItem;  // •
    if ((cp.value == U'-' || cp.value == U'*') && rest.size() > 1 &&
        (rest[1] == ' ' || rest[1] == '\t'))
      return SegmentKind::kListItem;
  }
  return SegmentKind::kPlain;
}

class Splitter {
 public:
  explicit Splitter(std::string_view text) : text_(text) {}

  std::vector<Segment> run() {
    std::size_t pos = 0;
    while (pos < text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      const std::size_t line_stop = nl == std::string_view::npos ? text_.size() : nl + 1;
      const std::string_view line =
          text_.substr(pos, (nl == std::string_view::npos ? text_.size() : nl) - pos);

      const SegmentKind kind = classify_line(line);
      if (kind != SegmentKind::kPlain) {
        if (pending_content_) emit(pos, SegmentKind::kPlain);
        emit(line_stop, kind);
      } else if (all_space(line)) {
        // A blank line closes an unpunctuated fragment at the previous newline.
        if (pending_content_) emit(pos, SegmentKind::kPlain);
      } else {
        scan_plain(pos, line_stop);
      }
      pos = line_stop;
    }
    if (pending_content_) {
      emit(text_.size(), SegmentKind::kPlain);
    } else if (unit_start_ < text_.size() && !out_.empty()) {
      out_.back().text.append(text_.substr(unit_start_));
    }
    return std::move(out_);
  }

 private:
  void scan_plain(std::size_t begin, std::size_t end) {
    std::size_t i = begin;
    while (i < end) {
      const auto cp = decode(text_, i);
      if (!is_space(cp.value)) pending_content_ = true;
      if (is_terminal_char(cp.value) && closes_sentence(cp, i)) {
        std::size_t j = i + cp.length;
        while (j < end) {
          const auto next = decode(text_, j);
          if (!is_terminal_char(next.value) && !is_closer(next.value)) break;
          j += next.length;
        }
        emit(j, SegmentKind::kPlain);
        i = j;
        continue;
      }
      i += cp.length;
    }
  }

  bool closes_sentence(CodePoint cp, std::size_t at) const {
    if (is_cjk_terminal(cp.value)) return true;
    const std::size_t next = at + cp.length;
    if (next >= text_.size()) return true;
    const auto n = decode(text_, next);
    return is_space(n.value) || is_closer(n.value) || is_terminal_char(n.value);
  }

  void emit(std::size_t stop, SegmentKind kind) {
    Segment seg;
    seg.index = out_.size();
    seg.text = std::string(text_.substr(unit_start_, stop - unit_start_));
    seg.kind = kind;
    out_.push_back(std::move(seg));
    unit_start_ = stop;
    pending_content_ = false;
  }

  std::string_view text_;
  std::vector<Segment> out_;
  std::size_t unit_start_ = 0;
  bool pending_content_ = false;
};

void append_escaped(std::string& out, std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const std::string_view rest = text.substr(i);
    if (rest.starts_with(kEscape)) {
      out.append(kEscape);
      out.append(kEscape);
      i += kEscape.size();
    } else {
      if (rest.starts_with(kMarkerOpen)) out.append(kEscape);
      out.push_back(text[i]);
      ++i;
    }
  }
}

// Length of an inserted " [Sentence N]" at the start of `s`, or 0.
std::size_t inserted_marker_length(std::string_view s) {
  if (!s.starts_with(" [Sentence ")) return 0;
  std::size_t i = 11;
  const std::size_t digits_begin = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == digits_begin || i >= s.size() || s[i] != ']') return 0;
  return i + 1;
}

}  // namespace

const char* segment_kind_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kPlain: return "plain";
    case SegmentKind::kHeading: return "heading";
    case SegmentKind::kListItem: return "list_item";
  }
  return "plain";
}

SegmentKind parse_segment_kind(std::string_view name) {
  if (name == "plain") return SegmentKind::kPlain;
  if (name == "heading") return SegmentKind::kHeading;
  if (name == "list_item") return SegmentKind::kListItem;
  throw Error(ErrorCode::kInvalidArgument, "unknown segment kind '" + std::string(name) + "'");
}

SegmentedAnswer segment(std::string_view raw_answer) {
  if (all_space(raw_answer))
    throw Error(ErrorCode::kEmptyInput, "answer text is empty or whitespace-only");
  return make_segmented(Splitter(raw_answer).run());
}

SegmentedAnswer make_segmented(std::vector<Segment> segments) {
  for (std::size_t i = 0; i < segments.size(); ++i) segments[i].index = i;
  SegmentedAnswer answer;
  answer.marked_text = render_marked(segments);
  answer.segments = std::move(segments);
  return answer;
}

std::string sentence_marker(std::size_t index) {
  return "[Sentence " + std::to_string(index) + "]";
}

std::string render_marked(const SegmentedAnswer& answer) {
  return render_marked(answer.segments);
}

std::string render_marked(const std::vector<Segment>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    append_escaped(out, segments[i].text);
    out.push_back(' ');
    out.append(sentence_marker(i));
  }
  return out;
}

std::string strip_markers(std::string_view marked_text) {
  std::string out;
  out.reserve(marked_text.size());
  std::size_t i = 0;
  while (i < marked_text.size()) {
    const std::string_view rest = marked_text.substr(i);
    if (rest.starts_with(kEscape)) {
      i += kEscape.size();
      if (marked_text.substr(i).starts_with(kEscape)) {
        out.append(kEscape);
        i += kEscape.size();
      } else if (i < marked_text.size()) {
        // Escaped literal "[": copy it so it cannot open a marker.
        out.push_back(marked_text[i]);
        ++i;
      }
      continue;
    }
    if (const std::size_t n = inserted_marker_length(rest); n > 0) {
      i += n;
      continue;
    }
    out.push_back(marked_text[i]);
    ++i;
  }
  return out;
}

}  // namespace trm
