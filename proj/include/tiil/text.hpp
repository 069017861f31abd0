/* Copyright 2026 The TIIL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tiil {

// A word of the input text with byte offsets [begin, end).
struct WordToken {
  std::string lower;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on anything that is not an ASCII letter, digit or apostrophe. Bytes
// >= 0x80 are kept inside words so UTF-8 sequences are never split.
std::vector<WordToken> tokenize_words(std::string_view text);

bool is_stopword(std::string_view lower_word);

// Character range [char_start, char_end) of a text with its surface string.
struct WordSpan {
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string surface;
  double similarity = 0.0;

  bool operator==(const WordSpan&) const = default;
};

// True when the span is non-empty, inside `text`, and slices to `surface`.
bool span_matches(const WordSpan& span, std::string_view text);

bool spans_overlap(const WordSpan& a, const WordSpan& b);

}  // namespace tiil
